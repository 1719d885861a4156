"""
Exact finite-horizon dynamic programming for the N-player chain on an enumerated state space (iterates of the Shapley operator), exact evaluation of Markov policies and exhaustive policy search.
"""
import itertools
import json
import logging
from copy import deepcopy
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from ..exceptions import FragCoagInputException, StateSpaceError
from ..kernels import RateKernel, control_value
from ..simulators import generator_matrix
from ..state import Composition, StateSpace
from .policy import Policy, TablePolicy
from .reward import RewardModel

logger = logging.getLogger(__name__)


class DPResult():
    """
    Output of the backward recursion

    Args:
        space (StateSpace): Enumerated S(h)
        values (array): values[k, s] = V_k(state s), the optimal value with k steps to go
        policy (TablePolicy): Greedy policy; rule k uses the argmax computed with n - k steps to go
    """

    def __init__(self, space: StateSpace, values: np.ndarray, policy: TablePolicy):
        self.space = space
        self.values = values
        self.policy = policy

    @property
    def n(self) -> int:
        return self.values.shape[0] - 1

    def value(self, x0: Composition) -> float:
        """Optimal value V_n^h(x0)"""
        return float(self.values[-1, self.space.index(x0)])

    def to_json(self) -> dict:
        """State -> (value, first decision)"""
        return {json.dumps([list(pair) for pair in c.key()]): {'value': float(self.values[-1, s]),
                                                               'action': float(self.policy.table[0, s]) if self.n > 0 else None}
                for (s, c) in enumerate(self.space)}


class ShapleyDP():
    """
    Backward recursion V_k = max_{b in E_grid} [tau*B(., b) + P_tau^b V_{k-1}], V_0 = terminal reward, where P_tau^b = exp(tau*Q_b) is the one-step transition operator of the chain under constant control b.

    The following configuration parameters are supported (as kwargs in constructor or in each method):

    Configuration Parameters
    ------------------------------
    state_cap : int
        Largest enumerated state space accepted. Default 10000.
    literal_generator : bool
        Self-pair convention of the chain. Default False.
    tie_tolerance : float
        Relative tolerance under which two controls are considered tied; the smallest index wins. Default 1e-12.
    candidate_cap : int
        Largest number of candidate policies in exhaustive searches. Default 100000.

    Args:
        kernel (RateKernel): Rate kernel
        E_grid (Sequence[float]): Finite control set
        tau (float): Decision step
    """

    default_parameters = {
        'state_cap': 10000,
        'literal_generator': False,
        'tie_tolerance': 1e-12,
        'candidate_cap': 100000,
    }

    def __init__(self, kernel: RateKernel, E_grid: Sequence[float], tau: float, **kwargs):
        if len(E_grid) == 0:
            raise FragCoagInputException("E_grid must contain at least one control")
        if not tau > 0:
            raise FragCoagInputException("tau must be positive")
        self.kernel = kernel
        self.E_grid = np.array([control_value(b) for b in E_grid])
        self.tau = tau
        self.parameters = deepcopy(self.default_parameters)
        self.parameters.update(kwargs)
        self._operators = {}

    def space(self, N: int, h: float = None) -> StateSpace:
        """Enumerated S(h) for N players, refused beyond the configured cap"""
        return StateSpace(N, h, self.parameters['state_cap'])

    def operators(self, space: StateSpace) -> np.ndarray:
        """Array of shape (|E_grid|, |S|, |S|) of one-step transition matrices"""
        key = (space.N, space.h)
        if key not in self._operators:
            literal = self.parameters['literal_generator']
            self._operators[key] = np.array([expm(self.tau * generator_matrix(space, self.kernel, b, literal)) for b in self.E_grid])
            logger.debug("Built %d transition operators on %d states", len(self.E_grid), len(space))
        return self._operators[key]

    def reward_tables(self, space: StateSpace, reward: RewardModel):
        """(running[b, s] = B(state s, b), terminal[s] = V0(state s))"""
        running = np.array([[reward.running(c, b) for c in space] for b in self.E_grid])
        terminal = np.array([reward.terminal(c) for c in space])
        return (running, terminal)

    def _backup(self, P: np.ndarray, running: np.ndarray, W: np.ndarray) -> np.ndarray:
        # candidate[b, s] = tau*B(s, b) + (P_b W)(s)
        return self.tau * running + P @ W

    def solve(self, space: StateSpace, reward: RewardModel, n: int) -> DPResult:
        """
        Optimal values V_0..V_n and the greedy policy

        Args:
            space (StateSpace): Enumerated S(h)
            reward (RewardModel): Rewards
            n (int): Number of decision steps

        Returns:
            DPResult: value table and argmax policy (ties: smallest control index)
        """
        if n < 0:
            raise FragCoagInputException("n must be nonnegative")
        P = self.operators(space) if n > 0 else None
        (running, terminal) = self.reward_tables(space, reward)
        values = np.empty((n + 1, len(space)))
        values[0] = terminal
        table = np.zeros((n, len(space)))
        tol = self.parameters['tie_tolerance']
        for k in range(1, n + 1):
            candidates = self._backup(P, running, values[k - 1])
            best = candidates.max(axis=0)
            slack = tol * np.abs(candidates).max(axis=0)
            choice = np.argmax(candidates >= best - slack, axis=0)
            values[k] = best
            table[n - k] = self.E_grid[choice]
        policy = TablePolicy(space, table, self.tau, {'kind': 'dynamic programming', 'E_grid': self.E_grid.tolist()})
        return DPResult(space, values, policy)

    def evaluate(self, space: StateSpace, policy: Policy, reward: RewardModel, n: int) -> np.ndarray:
        """
        Exact value of a Markov policy at every state, by backward recursion. Policy controls must belong to E_grid.

        Returns:
            array: V_pi(state s) for each s
        """
        indices = np.zeros((n, len(space)), dtype=int)
        for k in range(n):
            for (s, c) in enumerate(space):
                b = policy.decide(k, c)
                match = np.flatnonzero(np.isclose(self.E_grid, b, rtol=0, atol=1e-12))
                if len(match) == 0:
                    raise FragCoagInputException("Policy control {} is not in E_grid {}".format(b, self.E_grid.tolist()))
                indices[k, s] = match[0]
        return self._evaluate_indices(space, indices, reward)

    def _evaluate_indices(self, space: StateSpace, indices: np.ndarray, reward: RewardModel, tables=None) -> np.ndarray:
        P = self.operators(space) if len(indices) else None
        (running, terminal) = self.reward_tables(space, reward) if tables is None else tables
        W = terminal
        states = np.arange(len(space))
        for k in reversed(range(len(indices))):
            candidates = self._backup(P, running, W)
            W = candidates[indices[k], states]
        return W

    def exhaustive_search(self, space: StateSpace, reward: RewardModel, n: int, x0: Composition):
        """
        Best deterministic Markov policy for x0 by exhaustive enumeration of all |E_grid|^(|S|*n) decision tables, each evaluated exactly

        Returns:
            tuple: (best value, best control table of shape (n, |S|))

        Raises:
            StateSpaceError: more candidates than candidate_cap
        """
        count = len(self.E_grid) ** (len(space) * n)
        if count > self.parameters['candidate_cap']:
            raise StateSpaceError("{} candidate policies, more than the cap of {}".format(count, self.parameters['candidate_cap']))
        tables = self.reward_tables(space, reward)
        start = space.index(x0)
        (best_value, best) = (-np.inf, None)
        for flat in itertools.product(range(len(self.E_grid)), repeat=len(space) * n):
            indices = np.array(flat, dtype=int).reshape(n, len(space))
            value = self._evaluate_indices(space, indices, reward, tables)[start]
            if value > best_value:
                (best_value, best) = (value, indices)
        return (float(best_value), self.E_grid[best] if best is not None else np.zeros((0, len(space))))

    def openloop_values(self, space: StateSpace, reward: RewardModel, n: int, x0: Composition) -> dict:
        """Exact value at x0 of every state-independent control sequence in E_grid^n"""
        tables = self.reward_tables(space, reward)
        start = space.index(x0)
        values = {}
        for seq in itertools.product(range(len(self.E_grid)), repeat=n):
            indices = np.repeat(np.array(seq, dtype=int)[:, None], len(space), axis=1).reshape(n, len(space))
            values[tuple(self.E_grid[list(seq)])] = float(self._evaluate_indices(space, indices, reward, tables)[start])
        return values


def shapley_dp(N: int, E_grid: Sequence[float], reward: RewardModel, tau: float, n: int, kernel: RateKernel, h: float = None, **kwargs) -> DPResult:
    """
    Optimal values and greedy policy on S(h) for N players, see ShapleyDP

    Raises:
        StateSpaceError: S(h) larger than the configured state_cap
    """
    dp = ShapleyDP(kernel, E_grid, tau, **kwargs)
    return dp.solve(dp.space(N, h), reward, n)


def evaluate_policy_exact(N: int, policy: Policy, reward: RewardModel, tau: float, n: int, kernel: RateKernel, E_grid: Sequence[float], h: float = None, **kwargs) -> np.ndarray:
    """Exact value of a Markov policy at every state of S(h)"""
    dp = ShapleyDP(kernel, E_grid, tau, **kwargs)
    return dp.evaluate(dp.space(N, h), policy, reward, n)


def exhaustive_policy_search(N: int, E_grid: Sequence[float], reward: RewardModel, tau: float, n: int, kernel: RateKernel, x0: Composition, **kwargs):
    """Best Markov policy value at x0 by enumeration, see ShapleyDP.exhaustive_search"""
    dp = ShapleyDP(kernel, E_grid, tau, **kwargs)
    return dp.exhaustive_search(dp.space(N, x0.h), reward, n, x0)
