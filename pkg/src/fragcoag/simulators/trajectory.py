"""
Results of chain simulations: a single replica trajectory and an immutable set of replicas.
"""
from collections import UserList
from typing import List, Sequence

import numpy as np

from ..state import Composition
from .events import EventLogEntry


class Trajectory():
    """
    Sampled path of the chain X^h(t) for one replica

    Args:
        times (array[float]): Observation times
        states (list[Composition]): State at each observation time (piecewise constant between events)
        event_counts (array[int]): Number of events in each decision window [k*tau, (k+1)*tau)
        decisions (array[float]): Control used in each decision window
        tau (float): Decision step
        seed: Seed or replica index that produced the trajectory
        events (list[EventLogEntry], optional): Full event log, if recorded
    """

    def __init__(self, times: Sequence[float], states: List[Composition], event_counts, decisions, tau: float, seed=None, events: List[EventLogEntry] = None):
        self.times = np.asarray(times, dtype=float)
        self.states = states
        self.event_counts = np.asarray(event_counts, dtype=int)
        self.decisions = np.asarray(decisions, dtype=float)
        self.tau = tau
        self.seed = seed
        self.events = events

    def __len__(self) -> int:
        return len(self.times)

    def __eq__(self, other) -> bool:
        return isinstance(other, Trajectory) and np.array_equal(self.times, other.times) \
            and self.states == other.states and np.array_equal(self.decisions, other.decisions) \
            and np.array_equal(self.event_counts, other.event_counts)

    def __str__(self) -> str:
        return "Trajectory with {} savepoints, {} events".format(len(self.times), int(self.event_counts.sum()))

    def snapshot(self, time_index: int) -> Composition:
        return self.states[time_index]

    @property
    def final_state(self) -> Composition:
        return self.states[-1]

    def dense(self, K_max: int) -> np.ndarray:
        """Array of shape (len(times), K_max) with the rescaled states x = h*n"""
        return np.array([c.to_array(K_max) for c in self.states]).reshape(len(self.states), K_max)

    def m(self) -> np.ndarray:
        """Norm m(x) = h * sum_k n_k at each observation time"""
        return np.array([c.m for c in self.states])

    def mass(self) -> np.ndarray:
        """Mass norm h*N at each observation time"""
        return np.array([c.x_mass for c in self.states])

    def affine_interpolation(self, K_max: int, query_times: Sequence[float]) -> np.ndarray:
        """
        Affine interpolation of the observed states, evaluated at query_times

        With observation times k*tau this is the continuous interpolation of the chain between decision times.
        """
        dense = self.dense(K_max)
        query_times = np.asarray(query_times, dtype=float)
        return np.column_stack([np.interp(query_times, self.times, dense[:, k]) for k in range(K_max)])


class ReplicaSet(UserList):
    """
    Immutable collection of replica trajectories sharing their observation times. Objects of this class can be iterated and indexed like a list, where replicas[r] is the trajectory of replica r.

    Args:
        times (array[float]): Common observation times
        data (list[Trajectory]): One trajectory per replica
    """

    def __init__(self, times: Sequence[float], data: List[Trajectory]):
        super().__init__(data)
        self.times = np.asarray(times, dtype=float)
        self.__transformed = False

    def __calculate_transform(self):
        # Lazy: data[replica][time] -> data[time][replica]
        self.__transform = [[traj.states[k] for traj in self.data] for k in range(len(self.times))]
        self.__transformed = True

    def __str__(self) -> str:
        return "ReplicaSet with {} replicas and {} savepoints".format(len(self.data), len(self.times))

    def snapshot(self, time_index: int) -> List[Composition]:
        """States of every replica at times[time_index]"""
        if not self.__transformed:
            self.__calculate_transform()
        return self.__transform[time_index]

    def mean(self, K_max: int) -> np.ndarray:
        """Mean rescaled state at each time, shape (len(times), K_max)"""
        return np.mean([traj.dense(K_max) for traj in self.data], axis=0)

    def final_m(self) -> np.ndarray:
        """Terminal norm m(x) of each replica"""
        return np.array([traj.states[-1].m for traj in self.data])

    def __not_implemented(self, *args, **kw):
        raise ValueError("ReplicaSet is immutable (i.e., read only)")

    append = __not_implemented
    extend = __not_implemented
    clear = __not_implemented
    reverse = __not_implemented
    remove = __not_implemented
    insert = __not_implemented
    pop = __not_implemented
    __setitem__ = __not_implemented
    __delitem__ = __not_implemented
