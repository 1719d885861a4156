"""
Exact event-driven simulation of the controlled merging/splitting chain X^h and Monte-Carlo drift estimation.
"""
import logging
from copy import deepcopy
from typing import Sequence

import numpy as np

from ..exceptions import AbsorbingStateError, FragCoagInputException, FragCoagTypeError
from ..kernels import RateKernel, control_value
from ..state import Composition
from ..utils import mean_and_se, replica_rng, run_replicas
from .events import MERGE, SPLIT, EventLogEntry, RateSource, apply_event, event_table, sample_event
from .schedule import as_schedule, decision_count, window_count
from .trajectory import ReplicaSet, Trajectory

logger = logging.getLogger(__name__)


class CTMCSimulator():
    """
    Gillespie-type simulator of the chain on compositions.

    From state n under control b the chain waits an Exponential(s(x, b)) time, then performs merge (i, j) with probability h*C_ij*n_i*n_j/s or split (i, j) with probability F_ij*n_i/s. The control changes only at decision times k*tau; waiting times are redrawn at each decision time.

    The following configuration parameters are supported (as kwargs in constructor or in each method):

    Configuration Parameters
    ------------------------------
    literal_generator : bool
        Weight self-pair merges by n_i**2 instead of n_i*(n_i - 1). Default False.
    cache_rates : bool
        Cache rates of state-independent kernels per control value. Default True.
    record_events : bool
        Keep the full event log in each trajectory. Default False.
    n_workers : int
        Threads used for replica runs. Default 1.

    Args:
        kernel (RateKernel): Controlled rate kernel
    """

    default_parameters = {
        'literal_generator': False,
        'cache_rates': True,
        'record_events': False,
        'n_workers': 1,
    }

    def __init__(self, kernel: RateKernel, **kwargs):
        if not isinstance(kernel, RateKernel):
            raise FragCoagTypeError("kernel must be a RateKernel, was {}".format(type(kernel).__name__))
        self.kernel = kernel
        self.parameters = deepcopy(self.default_parameters)
        self.parameters.update(kwargs)

    def _params(self, kwargs) -> dict:
        params = deepcopy(self.parameters)
        params.update(kwargs)
        return params

    def _source(self, params) -> RateSource:
        return RateSource(self.kernel, params['cache_rates'])

    def total_rate(self, c: Composition, b, **kwargs) -> float:
        """
        Total jump rate s(x, b) = sum_{i,j} h*C_ij*n_i*n_j + sum_i sum_{j<i} F_ij*n_i

        Args:
            c (Composition): State
            b: Control value

        Returns:
            float: s(x, b); 0 for the empty composition
        """
        params = self._params(kwargs)
        return event_table(dict(c.counts), c.h, self._source(params), b, params['literal_generator']).total

    def step(self, c: Composition, b, rng: np.random.Generator, t: float = 0.0, **kwargs):
        """
        One jump of the chain from c under control b

        Args:
            c (Composition): Current state
            b: Control value
            rng (numpy.random.Generator): Random source
            t (float, optional): Current time, used to stamp the event. Defaults to 0.

        Returns:
            tuple: (waiting time, EventLogEntry, new Composition)

        Raises:
            AbsorbingStateError: No event is enabled
        """
        params = self._params(kwargs)
        counts = dict(c.counts)
        table = event_table(counts, c.h, self._source(params), b, params['literal_generator'])
        s = table.total
        if s <= 0:
            raise AbsorbingStateError("No event enabled from {} under b = {}".format(c, control_value(b)))
        wait = rng.standard_exponential() / s
        e = sample_event(table, rng.uniform() * s)
        (kind, i, j) = table.key(e)
        entry = EventLogEntry(t + wait, kind, i, j, c.coalition_count)
        apply_event(counts, kind, i, j)
        return (wait, entry, Composition._trusted(counts, c.h, c.N, c.R))

    def simulate(self, x0: Composition, control, T: float, tau: float = None, times: Sequence[float] = None, rng: np.random.Generator = None, seed=None, **kwargs) -> Trajectory:
        """
        Simulate one trajectory on [0, T]

        Args:
            x0 (Composition): Initial state
            control: Constant b (float or ControlPoint), action function (sampled at k*tau) or ControlSchedule/Policy (evaluated at X(k*tau))
            T (float): Horizon
            tau (float, optional): Decision step. Defaults to T (one window).
            times (Sequence[float], optional): Observation times in [0, T]. Defaults to the decision times k*tau plus T.
            rng (numpy.random.Generator, optional): Random source. Built from seed if not given.
            seed (optional): Seed used when rng is not given; stored on the trajectory

        Returns:
            Trajectory: states at the observation times, per-window event counts and decisions
        """
        params = self._params(kwargs)
        if T < 0:
            raise FragCoagInputException("Horizon T must be nonnegative, was {}".format(T))
        if tau is None:
            tau = T if T > 0 else 1.0
        schedule = as_schedule(control, tau)
        n = decision_count(T, tau)
        windows = window_count(T, tau)
        if times is None:
            times = sorted(set([k * tau for k in range(windows)] + [T]))
        times = np.asarray(times, dtype=float)
        if np.any(np.diff(times) < 0) or (len(times) and (times[0] < 0 or times[-1] > T)):
            raise FragCoagInputException("Observation times must be sorted and lie in [0, T]")
        if rng is None:
            rng = np.random.default_rng(seed)

        source = self._source(params)
        literal = params['literal_generator']
        record = params['record_events']
        (h, N, R) = (x0.h, x0.N, x0.R)
        counts = dict(x0.counts)
        states = []
        events = [] if record else None
        event_counts = np.zeros(windows, dtype=int)
        decisions = np.zeros(windows)
        obs = 0
        t = 0.0

        def observe_before(limit: float, inclusive: bool = False):
            nonlocal obs
            snapshot = None
            while obs < len(times) and (times[obs] < limit or (inclusive and times[obs] <= limit)):
                if snapshot is None:
                    snapshot = Composition._trusted(counts, h, N, R)
                states.append(snapshot)
                obs += 1

        for k in range(windows):
            end = T if k == windows - 1 else (k + 1) * tau
            observe_before(t)
            b = schedule.decide(min(k, max(n - 1, 0)), Composition._trusted(counts, h, N, R))
            decisions[k] = b
            while True:
                table = event_table(counts, h, source, b, literal)
                s = table.total
                if s <= 0:
                    break
                wait = rng.standard_exponential() / s
                if t + wait >= end:
                    break
                t += wait
                observe_before(t)
                e = sample_event(table, rng.uniform() * s)
                (kind, i, j) = table.key(e)
                if record:
                    events.append(EventLogEntry(t, kind, i, j, sum(counts.values())))
                apply_event(counts, kind, i, j)
                event_counts[k] += 1
            t = end
        observe_before(T, inclusive=True)

        if __debug__:
            assert sum(k * n_k for (k, n_k) in counts.items()) == N, "mass not conserved"
        logger.debug("Simulated %d events over [0, %g]", int(event_counts.sum()), T)
        return Trajectory(times, states, event_counts, decisions, tau, seed, events)

    def simulate_replicas(self, x0: Composition, control, T: float, tau: float = None, times: Sequence[float] = None, seed: int = 0, replicas: int = 1, **kwargs) -> ReplicaSet:
        """
        Independent replicas of simulate; replica r uses the generator derived from (seed, r)

        Returns:
            ReplicaSet: trajectories in replica order
        """
        params = self._params(kwargs)

        def body(r: int, rng: np.random.Generator) -> Trajectory:
            return self.simulate(x0, control, T, tau, times, rng=rng, seed=(seed, r), **kwargs)

        data = run_replicas(body, seed, replicas, params['n_workers'])
        return ReplicaSet(data[0].times if data else [], data)

    def drift_estimate(self, x: Composition, b, tau: float, replicas: int, seed: int = 0, K_max: int = None, **kwargs):
        """
        Monte-Carlo estimate of the drift F^h(x, b) = E[X^h(tau, x, b) - x]

        Args:
            x (Composition): Starting state
            b: Constant control
            tau (float): Time step
            replicas (int): Number of replicas M (at least 2)
            seed (int, optional): Master seed. Defaults to 0.
            K_max (int, optional): Length of the returned vectors. Defaults to N (largest reachable size).

        Returns:
            tuple: (mean displacement array, componentwise standard error array)
        """
        if replicas < 2:
            raise FragCoagInputException("drift_estimate needs at least 2 replicas")
        K_max = max(x.N, 1) if K_max is None else K_max
        x0 = x.to_array(K_max)
        if tau == 0:
            return (np.zeros(K_max), np.zeros(K_max))
        params = self._params(kwargs)

        def body(r: int, rng: np.random.Generator) -> np.ndarray:
            traj = self.simulate(x, b, tau, tau, [tau], rng=rng, **kwargs)
            return traj.final_state.to_array(K_max) - x0

        return mean_and_se(run_replicas(body, seed, replicas, params['n_workers']))

    def event_count_experiment(self, x0: Composition, b, tau: float, windows: int, replicas: int, seed: int = 0, **kwargs) -> dict:
        """
        Per-window event counts Delta(k) against their Poisson envelopes s_h*tau (first moment) and s_h*tau*(1 + s_h*tau) (second moment), with s_h = (C R^2 + F)/h from the kernel's declared bounds

        Args:
            x0 (Composition): Initial state
            b: Constant control (or schedule)
            tau (float): Window length
            windows (int): Number of windows per replica
            replicas (int): Number of replicas (at least 2)
            seed (int, optional): Master seed. Defaults to 0.

        Returns:
            dict: 'mean', 'mean_se', 'second_moment', 'second_moment_se' (over all windows and replicas), 's_h', 's_h_safe', and the envelopes for both rates
        """
        if replicas < 2 or windows < 1:
            raise FragCoagInputException("event_count_experiment needs replicas >= 2 and windows >= 1")
        params = self._params(kwargs)

        def body(r: int, rng: np.random.Generator) -> np.ndarray:
            return self.simulate(x0, b, windows * tau, tau, [windows * tau], rng=rng, **kwargs).event_counts.astype(float)

        counts = np.concatenate(run_replicas(body, seed, replicas, params['n_workers']))
        (mean, mean_se) = mean_and_se(counts)
        (second, second_se) = mean_and_se(counts ** 2)
        bounds = self.kernel.bounds
        R = x0.R if x0.R is not None else x0.x_mass
        s_h = (bounds.C * R ** 2 + bounds.F) / x0.h
        s_h_safe = max(bounds.C * R ** 2 + bounds.F, bounds.C * R ** 2 + bounds.F * R) / x0.h
        report = {'mean': float(mean), 'mean_se': float(mean_se), 'second_moment': float(second), 'second_moment_se': float(second_se),
                  's_h': s_h, 's_h_safe': s_h_safe}
        for (name, rate) in (('', s_h), ('_safe', s_h_safe)):
            report['envelope_mean' + name] = rate * tau
            report['envelope_second' + name] = rate * tau * (1 + rate * tau)
        logger.info("Event counts over %d windows: mean %g (envelope %g)", len(counts), report['mean'], report['envelope_mean_safe'])
        return report


def total_rate(c: Composition, kernel: RateKernel, b, literal_generator: bool = False) -> float:
    """Total jump rate s(x, b) of the chain at c"""
    return CTMCSimulator(kernel, literal_generator=literal_generator).total_rate(c, b)


def step(c: Composition, kernel: RateKernel, b, rng: np.random.Generator, literal_generator: bool = False):
    """One jump from c: (waiting time, EventLogEntry, new Composition)"""
    return CTMCSimulator(kernel, literal_generator=literal_generator).step(c, b, rng)


def simulate(x0: Composition, kernel: RateKernel, control, T: float, tau: float = None, times: Sequence[float] = None, seed: int = 0, **kwargs) -> Trajectory:
    """Simulate one trajectory with the generator derived from seed"""
    return CTMCSimulator(kernel, **kwargs).simulate(x0, control, T, tau, times, rng=replica_rng(seed, 0), seed=seed)


def drift_estimate(x: Composition, kernel: RateKernel, b, tau: float, replicas: int, seed: int = 0, **kwargs):
    """Monte-Carlo drift estimate and standard error, see CTMCSimulator.drift_estimate"""
    return CTMCSimulator(kernel, **kwargs).drift_estimate(x, b, tau, replicas, seed)


def event_count_experiment(x0: Composition, kernel: RateKernel, b, tau: float, windows: int, replicas: int, seed: int = 0, **kwargs) -> dict:
    """Per-window event-count moments against their envelopes, see CTMCSimulator.event_count_experiment"""
    return CTMCSimulator(kernel, **kwargs).event_count_experiment(x0, b, tau, windows, replicas, seed)


__all__ = ['CTMCSimulator', 'total_rate', 'step', 'simulate', 'drift_estimate', 'event_count_experiment', 'MERGE', 'SPLIT']
