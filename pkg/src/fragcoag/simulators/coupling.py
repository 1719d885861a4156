"""
Markovian couplings of two copies of the chain driven by the same kernel and control.
"""
import logging
import math
from abc import ABC, abstractmethod
from copy import deepcopy
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import stats

from ..bounds import kernel_constants
from ..exceptions import AbsorbingStateError, FragCoagInputException, FragCoagTypeError
from ..kernels import RateKernel, control_value
from ..state import Composition, random_composition
from ..utils import mean_and_se, run_replicas
from .ctmc import CTMCSimulator
from .events import EventLogEntry, RateSource, apply_event, event_table

logger = logging.getLogger(__name__)

JOINT = 'joint'
LONE_X = 'x'
LONE_Y = 'y'


@dataclass(frozen=True)
class CoupledState:
    """
    Pair (X, Y) of compositions on the same scale h
    """
    X: Composition
    Y: Composition

    def __post_init__(self):
        if self.X.h != self.Y.h:
            raise FragCoagInputException("Coupled components must share h ({} vs {})".format(self.X.h, self.Y.h))

    @property
    def coalesced(self) -> bool:
        return self.X == self.Y

    def distance(self) -> float:
        """l2 distance ||h*(n_X - n_Y)||"""
        sizes = set(self.X) | set(self.Y)
        return self.X.h * math.sqrt(sum((self.X.get(k) - self.Y.get(k)) ** 2 for k in sizes))


class Coupling(ABC):
    """
    Interface class for Markovian couplings

    A coupling assigns rates to moves (move, kind, i, j): 'joint' moves apply event (kind, i, j) to both components, 'x' and 'y' moves to one of them. Summing the joint and lone rates of an event for one component must give that component's single-chain rate.

    Configuration Parameters
    ------------------------------
    literal_generator : bool
        Self-pair convention, as for CTMCSimulator. Default False.
    n_workers : int
        Threads used for replica runs. Default 1.

    Args:
        kernel (RateKernel): Common rate kernel
    """
    default_parameters = {
        'literal_generator': False,
        'n_workers': 1,
    }

    def __init__(self, kernel: RateKernel, **kwargs):
        if not isinstance(kernel, RateKernel):
            raise FragCoagTypeError("kernel must be a RateKernel, was {}".format(type(kernel).__name__))
        self.kernel = kernel
        self.parameters = deepcopy(self.default_parameters)
        self.parameters.update(kwargs)
        self._source = RateSource(kernel)

    def marginal_rates(self, c: Composition, b) -> Dict[Tuple[str, int, int], float]:
        """Single-chain rates of one component, keyed by (kind, i, j)"""
        return event_table(dict(c.counts), c.h, self._source, b, self.parameters['literal_generator']).as_dict()

    @abstractmethod
    def rate_table(self, s: CoupledState, b) -> Dict[Tuple[str, str, int, int], float]:
        """Positive rates of all coupled moves, keyed by (move, kind, i, j)"""

    def coupled_step(self, s: CoupledState, b, rng: np.random.Generator, t: float = 0.0):
        """
        One jump of the coupled process

        Returns:
            tuple: (waiting time, (move, EventLogEntry), new CoupledState)

        Raises:
            AbsorbingStateError: No move is enabled
        """
        table = self.rate_table(s, control_value(b))
        keys = sorted(table)
        rates = np.array([table[k] for k in keys])
        total = rates.sum()
        if total <= 0:
            raise AbsorbingStateError("No coupled move enabled")
        wait = rng.standard_exponential() / total
        e = min(int(np.searchsorted(np.cumsum(rates), rng.uniform() * total, side='right')), len(keys) - 1)
        (move, kind, i, j) = keys[e]
        x_counts = dict(s.X.counts)
        y_counts = dict(s.Y.counts)
        if move in (JOINT, LONE_X):
            apply_event(x_counts, kind, i, j)
        if move in (JOINT, LONE_Y):
            apply_event(y_counts, kind, i, j)
        entry = EventLogEntry(t + wait, kind, i, j, s.X.coalition_count if move != LONE_Y else s.Y.coalition_count)
        new_state = CoupledState(Composition._trusted(x_counts, s.X.h, s.X.N, s.X.R),
                                 Composition._trusted(y_counts, s.Y.h, s.Y.N, s.Y.R))
        return (wait, (move, entry), new_state)

    def simulate(self, s: CoupledState, b, T: float, times: Sequence[float], rng: np.random.Generator) -> list:
        """
        Coupled path on [0, T] under constant control b

        Returns:
            list[CoupledState]: state at each observation time
        """
        times = np.asarray(times, dtype=float)
        out = []
        t = 0.0
        obs = 0
        while obs < len(times):
            try:
                (wait, _, nxt) = self.coupled_step(s, b, rng, t)
            except AbsorbingStateError:
                (wait, nxt) = (math.inf, s)
            t_next = t + wait
            # Observations before the next jump; all remaining ones if it falls after T
            limit = t_next if t_next <= T else math.inf
            while obs < len(times) and times[obs] < limit:
                out.append(s)
                obs += 1
            (t, s) = (t_next, nxt)
        return out


class MarchingSoldiersCoupling(Coupling):
    """
    Coupling of marching soldiers: for each event (kind, i, j) with rates q_x and q_y in the two components, both jump together at rate min(q_x, q_y) and the component with the larger rate jumps alone at rate |q_x - q_y|. Once X = Y the components move in lockstep.
    """

    def rate_table(self, s: CoupledState, b) -> Dict[Tuple[str, str, int, int], float]:
        rx = self.marginal_rates(s.X, b)
        ry = self.marginal_rates(s.Y, b)
        table = {}
        for key in set(rx) | set(ry):
            (a, c) = (rx.get(key, 0.0), ry.get(key, 0.0))
            joint = min(a, c)
            if joint > 0:
                table[(JOINT,) + key] = joint
            if a > c:
                table[(LONE_X,) + key] = a - c
            elif c > a:
                table[(LONE_Y,) + key] = c - a
        return table


class IndependentCoupling(Coupling):
    """
    Independent coupling: the two components never jump together
    """

    def rate_table(self, s: CoupledState, b) -> Dict[Tuple[str, str, int, int], float]:
        table = {(LONE_X,) + key: rate for (key, rate) in self.marginal_rates(s.X, b).items()}
        table.update({(LONE_Y,) + key: rate for (key, rate) in self.marginal_rates(s.Y, b).items()})
        return table


def coupled_step(s: CoupledState, kernel: RateKernel, b, rng: np.random.Generator, **kwargs) -> CoupledState:
    """One marching-soldiers jump from s"""
    return MarchingSoldiersCoupling(kernel, **kwargs).coupled_step(s, b, rng)[2]


def contraction_experiment(x: Composition, y: Composition, kernel: RateKernel, b, tau: float, replicas: int, seed: int = 0,
                           points: int = 8, coupling: Coupling = None, R: float = None) -> dict:
    """
    Mean coupled distance E||X(s) - Y(s)|| on the grid s = tau, 2*tau, ..., points*tau against the envelope e^{M2*sqrt(N)*s}*||x - y||

    Args:
        x, y (Composition): Starting states of equal mass
        kernel (RateKernel): Common kernel
        b: Constant control
        tau (float): Grid spacing
        replicas (int): Number of coupled replicas
        seed (int, optional): Master seed. Defaults to 0.
        points (int, optional): Grid size. Defaults to 8.
        coupling (Coupling, optional): Defaults to MarchingSoldiersCoupling
        R (float, optional): Radius used for M2. Defaults to the mass h*N.

    Returns:
        dict: times, mean, se, envelope, violations (grid points where mean - 3*se exceeds the envelope), alpha

    Raises:
        FragCoagInputException: x and y have different mass
    """
    if x.N != y.N or x.h != y.h:
        raise FragCoagInputException("Coupled states must have the same mass and scale (N {} vs {})".format(x.N, y.N))
    coupling = MarchingSoldiersCoupling(kernel) if coupling is None else coupling
    R = x.x_mass if R is None else R
    alpha = kernel_constants(kernel.bounds, R)['M2'] * math.sqrt(x.N)
    times = tau * np.arange(1, points + 1)
    start = CoupledState(x, y)

    def body(r: int, rng: np.random.Generator) -> np.ndarray:
        return np.array([s.distance() for s in coupling.simulate(start, b, times[-1], times, rng)])

    (mean, se) = mean_and_se(run_replicas(body, seed, replicas, coupling.parameters['n_workers']))
    envelope = np.exp(alpha * times) * start.distance()
    violations = [int(k) for k in np.flatnonzero(mean - 3 * se > envelope)]
    logger.info("Contraction experiment: %d violation(s) over %d grid points", len(violations), points)
    return {'times': times, 'mean': mean, 'se': se, 'envelope': envelope, 'violations': violations, 'alpha': alpha}


def marginality_check(x: Composition, y: Composition, kernel: RateKernel, b, T: float, replicas: int, seed: int = 0, coupling: Coupling = None) -> dict:
    """
    Chi-square test of the X-marginal of a coupling against the single chain: terminal states of X over coupled runs versus terminal states of independent single-chain runs

    Returns:
        dict: {'statistic', 'p_value', 'dof', 'categories'}
    """
    coupling = MarchingSoldiersCoupling(kernel) if coupling is None else coupling
    start = CoupledState(x, y)
    coupled = run_replicas(lambda r, rng: coupling.simulate(start, b, T, [T], rng)[-1].X.key(), seed, replicas)
    simulator = CTMCSimulator(kernel, literal_generator=coupling.parameters['literal_generator'])
    single = run_replicas(lambda r, rng: simulator.simulate(x, b, T, T, [T], rng=rng).final_state.key(), seed + 1, replicas)
    categories = sorted(set(coupled) | set(single))
    if len(categories) < 2:
        return {'statistic': 0.0, 'p_value': 1.0, 'dof': 0, 'categories': len(categories)}
    table = np.array([[coupled.count(c) for c in categories], [single.count(c) for c in categories]])
    (statistic, p_value, dof, _) = stats.chi2_contingency(table)
    return {'statistic': float(statistic), 'p_value': float(p_value), 'dof': int(dof), 'categories': len(categories)}


def drift_lipschitz_check(N: int, h: float, kernel: RateKernel, b, tau: float, pairs: int, replicas: int, seed: int = 0, L1: float = None, R: float = None) -> dict:
    """
    ||F^h(x, b) - F^h(y, b)|| against L1*tau*||x - y|| for random same-mass pairs (x, y)

    Args:
        N (int): Number of players
        h (float): Scale
        kernel (RateKernel): Kernel
        b: Constant control
        tau (float): Time step of the drift
        pairs (int): Number of random pairs
        replicas (int): Replicas per drift estimate
        seed (int, optional): Master seed
        L1 (float, optional): Lipschitz constant. Defaults to K*e^{M2*sqrt(N)*tau} for radius R.
        R (float, optional): Radius. Defaults to h*N.

    Returns:
        dict: lists 'lhs', 'rhs', 'se' and the number of 'violations' (lhs - 3*se > rhs)
    """
    R = h * N if R is None else R
    if L1 is None:
        constants = kernel_constants(kernel.bounds, R)
        L1 = constants['K'] * math.exp(constants['M2'] * math.sqrt(N) * tau)
    simulator = CTMCSimulator(kernel)
    rng = np.random.default_rng(seed)
    (lhs, rhs, ses) = ([], [], [])
    for k in range(pairs):
        x = random_composition(N, h, rng)
        y = random_composition(N, h, rng)
        (fx, se_x) = simulator.drift_estimate(x, b, tau, replicas, seed=seed + 2 * k, K_max=N)
        (fy, se_y) = simulator.drift_estimate(y, b, tau, replicas, seed=seed + 2 * k + 1, K_max=N)
        lhs.append(float(np.linalg.norm(fx - fy)))
        rhs.append(L1 * tau * float(np.linalg.norm(x.to_array(N) - y.to_array(N))))
        ses.append(float(np.sqrt(np.sum(se_x ** 2 + se_y ** 2))))
    violations = sum(1 for (a, c, s) in zip(lhs, rhs, ses) if a - 3 * s > c)
    return {'lhs': lhs, 'rhs': rhs, 'se': ses, 'violations': violations, 'L1': L1}
