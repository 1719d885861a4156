"""
Fixed-step fourth-order integration of the mean-field ODE under an action function, with the running reward accumulated on the same stages.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Sequence
from warnings import warn

import numpy as np

from ..exceptions import FragCoagInputException, NumericalInstabilityError
from ..kernels import RateKernel, control_value
from ..state import Composition, MeanFieldState, to_mean_field
from .smoluchowski import SmoluchowskiField

logger = logging.getLogger(__name__)

# Grid points closer than this are merged
GRID_RESOLUTION = 1e-12
LEAK_WARNING = 1e-6


@dataclass(frozen=True)
class OdeConfig:
    """
    Integrator settings

    Args:
        K_max (int): Truncation index
        dt (float): Largest step; steps are shortened at action breakpoints and alignment times
        scheme (str): Only 'rk4' (classical fourth-order Runge-Kutta)
        clip_tolerance (float): Largest total mass of negative components clipped to 0 before the run aborts
    """
    K_max: int
    dt: float = 1e-3
    scheme: str = 'rk4'
    clip_tolerance: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise FragCoagInputException("dt must be positive, was {}".format(self.dt))
        if self.K_max < 1:
            raise FragCoagInputException("K_max must be at least 1, was {}".format(self.K_max))
        if self.scheme != 'rk4':
            raise FragCoagInputException("Unknown scheme '{}' (supported: rk4)".format(self.scheme))


def default_K_max(x0: MeanFieldState, N: int = None) -> int:
    """N for a state matched to an N-player chain, otherwise 4 times the largest occupied size"""
    if N is not None:
        return max(int(N), 1)
    occupied = np.flatnonzero(x0.x > 0)
    return 4 * (int(occupied[-1]) + 1) if len(occupied) else 1


class MeanFieldPath():
    """
    Path X(t, x0, alpha) on the integration grid

    Args:
        times (array): Grid times
        states (array): States, shape (len(times), K_max)
        running (array): Running reward integral from 0 to each time
        clipped (float): Total mass of negative components clipped to 0
        leak (float): Mass lost above K_max over the run
    """

    def __init__(self, times, states, running, clipped: float, leak: float):
        self.times = np.asarray(times)
        self.states = np.asarray(states)
        self.running = np.asarray(running)
        self.clipped = clipped
        self.leak = leak

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def reward(self) -> float:
        """Integral of the running reward over the whole horizon"""
        return float(self.running[-1])

    def m(self) -> np.ndarray:
        """sum_k x_k at each grid time"""
        return self.states.sum(axis=1)

    def mass(self) -> np.ndarray:
        """sum_k k*x_k at each grid time"""
        return self.states @ np.arange(1, self.states.shape[1] + 1)

    def at(self, times: Sequence[float]) -> np.ndarray:
        """Piecewise-linear evaluation of the path, shape (len(times), K_max)"""
        times = np.asarray(times, dtype=float)
        return np.column_stack([np.interp(times, self.times, self.states[:, k]) for k in range(self.states.shape[1])])


class _ConstantAction():
    def __init__(self, b):
        self.b = control_value(b)

    def at(self, t: float, within: float = None) -> float:
        return self.b

    def breakpoints(self) -> list:
        return []


def _as_action(alpha):
    if isinstance(alpha, (int, float, np.floating)):
        return _ConstantAction(alpha)
    if not (hasattr(alpha, 'at') and hasattr(alpha, 'breakpoints')):
        raise FragCoagInputException("alpha must be a number or an action function")
    return alpha


def step_grid(T: float, dt: float, extra: Sequence[float] = ()) -> np.ndarray:
    """Uniform grid of spacing dt on [0, T] refined with the extra points inside (0, T)"""
    points = np.concatenate([np.arange(0.0, T, dt), [T], [t for t in extra if 0 < t < T]])
    points = np.unique(points)
    keep = np.concatenate([[True], np.diff(points) > GRID_RESOLUTION])
    points = points[keep]
    points[-1] = T
    return points


def rk4_step(fn: Callable, t: float, y, dt: float):
    """Classical Runge-Kutta step for y' = fn(t, y); returns (y_next, (k1, k2, k3, k4))"""
    k1 = fn(t, y)
    k2 = fn(t + dt / 2, y + dt / 2 * k1)
    k3 = fn(t + dt / 2, y + dt / 2 * k2)
    k4 = fn(t + dt, y + dt * k3)
    return (y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4), (k1, k2, k3, k4))


def integrate(x0, alpha, T: float, cfg: OdeConfig, kernel: RateKernel, reward=None, align: Sequence[float] = ()) -> MeanFieldPath:
    """
    Integrate X(t) = x0 + int_0^t f(X(s), alpha(s)) ds on [0, T]

    Args:
        x0 (MeanFieldState or array): Initial state (padded or cut to cfg.K_max)
        alpha: Constant control or action function (object with at(t, within) and breakpoints())
        T (float): Horizon
        cfg (OdeConfig): Truncation and step size
        kernel (RateKernel): Rate kernel
        reward (optional): Object with running(x, b); its integral is accumulated with the same stage weights
        align (Sequence[float], optional): Extra times the grid must contain (e.g. decision times k*tau)

    Returns:
        MeanFieldPath: states on the grid and the running reward integral

    Raises:
        NumericalInstabilityError: Mass clipped from negative components exceeds cfg.clip_tolerance
    """
    if T < 0:
        raise FragCoagInputException("Horizon T must be nonnegative")
    if not isinstance(x0, MeanFieldState):
        x0 = MeanFieldState(x0)
    x = x0.padded(cfg.K_max).x.copy()
    action = _as_action(alpha)
    field = SmoluchowskiField(kernel, cfg.K_max)
    sizes = field.sizes
    grid = step_grid(T, cfg.dt, list(action.breakpoints()) + list(align)) if T > 0 else np.array([0.0])

    states = np.empty((len(grid), cfg.K_max))
    running = np.zeros(len(grid))
    states[0] = x
    clipped = 0.0
    leak = 0.0
    for k in range(len(grid) - 1):
        (t0, t1) = (grid[k], grid[k + 1])
        dt = t1 - t0
        mid = (t0 + t1) / 2

        def fn(t, y):
            b = action.at(t, mid)
            # y carries [x, reward, leak]
            species = y[:-2]
            (f, flux) = field(species, b)
            gain = reward.running(species, b) if reward is not None else 0.0
            return np.concatenate([f, [gain, flux]])

        (y, _) = rk4_step(fn, t0, np.concatenate([x, [0.0, 0.0]]), dt)
        x = y[:-2]
        running[k + 1] = running[k] + y[-2]
        leak += y[-1]
        negative = x < 0
        if np.any(negative):
            clipped += float(-(sizes[negative] @ x[negative]))
            x[negative] = 0.0
            if clipped > cfg.clip_tolerance:
                raise NumericalInstabilityError("Clipped mass {:.3g} exceeds {:.3g} at t={:.6g}; reduce dt (now {})".format(clipped, cfg.clip_tolerance, t1, cfg.dt))
        states[k + 1] = x
    if leak > LEAK_WARNING:
        warn("Mass {:.3g} left the truncation K_max={}; increase K_max".format(leak, cfg.K_max))
    elif leak > 0:
        logger.debug("Mass leaked above K_max=%d: %.3g", cfg.K_max, leak)
    return MeanFieldPath(grid, states, running, clipped, leak)


def value_deterministic(x0, alpha, T: float, reward, cfg: OdeConfig, kernel: RateKernel) -> float:
    """
    Value of the limiting system v_alpha(x0) = int_0^T B(X(s), alpha(s)) ds + V0(X(T))

    Args:
        reward: Object with running(x, b) and terminal(x)
    """
    path = integrate(x0, alpha, T, cfg, kernel, reward)
    return path.reward + float(reward.terminal(path.final_state))


def limit_value_for_action(x0, alpha, T: float, reward, kernel: RateKernel, K_max: int = None, dt: float = 1e-3) -> float:
    """
    v_alpha(x0) for a chain state or a mean-field state, truncated at N for a composition unless K_max is given
    """
    if isinstance(x0, Composition):
        K_max = max(x0.N, 1) if K_max is None else K_max
        x0 = to_mean_field(x0, K_max)
    elif not isinstance(x0, MeanFieldState):
        x0 = MeanFieldState(x0)
    cfg = OdeConfig(default_K_max(x0) if K_max is None else K_max, dt)
    return value_deterministic(x0, alpha, T, reward, cfg, kernel)
