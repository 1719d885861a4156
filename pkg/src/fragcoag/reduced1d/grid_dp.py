"""
Explicit upwind solver for the one-dimensional Hamilton-Jacobi-Bellman equation of the norm-reduced problem with general intensities f_C, f_B and a running reward B(m, b).
"""
from copy import deepcopy
import logging
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from ..exceptions import CFLError, FragCoagInputException
from ..kernels import control_value

logger = logging.getLogger(__name__)


def _on_grid(f: Callable, *args) -> np.ndarray:
    """Evaluate f on broadcast numpy arguments, falling back to elementwise calls for scalar-only callables"""
    shape = np.broadcast(*args).shape
    try:
        values = np.broadcast_to(np.asarray(f(*args), dtype=float), shape)
    except (TypeError, ValueError):
        values = np.vectorize(lambda *a: float(f(*a)), otypes=[float])(*args)
    return np.array(values, dtype=float)


class GridHJBResult():
    """
    Value and feedback tables of a grid solve

    Args:
        times (array): t_0 = 0 < ... < t_K = T
        m_grid (array): Norm grid
        b_grid (array): Control grid
        values (array): values[i, j] = u(t_i, m_j)
        actions (array): actions[i, j] = argmax control on [t_i, t_{i+1}) at m_j
    """

    def __init__(self, times: np.ndarray, m_grid: np.ndarray, b_grid: np.ndarray, values: np.ndarray, actions: np.ndarray):
        self.times = times
        self.m_grid = m_grid
        self.b_grid = b_grid
        self.values = values
        self.actions = actions

    def _time_index(self, t: float) -> int:
        return int(np.clip(np.searchsorted(self.times, t - 1e-12), 0, len(self.times) - 1))

    def value_at(self, t: float, m: float) -> float:
        """u(t, m), linear in m between grid points"""
        return float(np.interp(m, self.m_grid, self.values[self._time_index(t)]))

    def action_at(self, t: float, m: float) -> float:
        """Feedback control at the grid point nearest to m"""
        i = min(self._time_index(t), len(self.actions) - 1)
        return float(self.actions[i, np.argmin(np.abs(self.m_grid - m))])

    def to_frame(self, every: int = 1) -> pd.DataFrame:
        """Long table (t, m, value, b) on every `every`-th time step"""
        rows = []
        for i in range(0, len(self.times), every):
            b = self.actions[min(i, len(self.actions) - 1)] if len(self.actions) else np.full(len(self.m_grid), np.nan)
            rows.append(pd.DataFrame({'t': self.times[i], 'm': self.m_grid, 'value': self.values[i], 'b': b}))
        return pd.concat(rows, ignore_index=True)


class GridHJBSolver():
    """
    Backward explicit scheme for u_t + max_b { f(m, b) u_m + B(m, b) } = 0, u(T, .) = V0, where f(m, b) = -b f_C(m) m^2 + (1 - b) f_B(m) m.

    u_m is the forward difference where f > 0 and the backward difference elsewhere (backward at the top of the grid, forward at the bottom). The step must satisfy dt * max|f| <= min spacing of the m-grid.

    The following configuration parameters are supported (as kwargs in constructor or in solve):

    Configuration Parameters
    ------------------------------
    cfl_safety : float
        Fraction of the stability bound used when dt is not given. Default 0.9.
    tie_tolerance : float
        Relative tolerance under which two controls are tied; the smallest wins. Default 1e-12.

    Args:
        f_C, f_B (Callable[[float], float], optional): Intensities. Default to 1.
        running (Callable[[float, float], float], optional): Running reward B(m, b). Defaults to 0.
    """

    default_parameters = {
        'cfl_safety': 0.9,
        'tie_tolerance': 1e-12,
    }

    def __init__(self, f_C: Callable = None, f_B: Callable = None, running: Callable = None, **kwargs):
        self.f_C = f_C
        self.f_B = f_B
        self.running = running
        self.parameters = deepcopy(self.default_parameters)
        self.parameters.update(kwargs)

    def drift_table(self, m_grid: np.ndarray, b_grid: np.ndarray) -> np.ndarray:
        """f(m_j, b_l), shape (len(m_grid), len(b_grid))"""
        fC = np.ones(len(m_grid)) if self.f_C is None else _on_grid(self.f_C, m_grid)
        fB = np.ones(len(m_grid)) if self.f_B is None else _on_grid(self.f_B, m_grid)
        if np.any(fC < 0) or np.any(fB < 0):
            raise FragCoagInputException("Intensities must be nonnegative on the grid")
        b = b_grid[None, :]
        return -b * (fC * m_grid ** 2)[:, None] + (1.0 - b) * (fB * m_grid)[:, None]

    def stable_dt(self, m_grid: np.ndarray, b_grid: np.ndarray) -> float:
        """Largest stable step min(dm) / max|f|"""
        speed = np.abs(self.drift_table(m_grid, b_grid)).max()
        return np.inf if speed == 0 else float(np.diff(m_grid).min() / speed)

    def solve(self, V0: Callable, T: float, m_grid: Sequence[float], b_grid: Sequence[float], dt: float = None, **kwargs) -> GridHJBResult:
        """
        March u from t = T back to 0

        Args:
            V0 (Callable[[float], float]): Terminal reward
            T (float): Horizon
            m_grid (Sequence[float]): Increasing norm grid covering the reachable range
            b_grid (Sequence[float]): Controls in [0, 1]
            dt (float, optional): Time step; the horizon is split into ceil(T / dt) equal steps. Defaults to cfl_safety times the stability bound.

        Raises:
            CFLError: dt above the stability bound (see `required_dt`)
        """
        params = deepcopy(self.parameters)
        params.update(kwargs)
        m_grid = np.asarray(m_grid, dtype=float)
        b_grid = np.array([control_value(b) for b in b_grid])
        if len(m_grid) < 2 or np.any(np.diff(m_grid) <= 0) or m_grid[0] < 0:
            raise FragCoagInputException("m-grid must be nonnegative, strictly increasing, with at least two points")
        if len(b_grid) == 0 or not T > 0:
            raise FragCoagInputException("Need a nonempty b-grid and T > 0")

        f = self.drift_table(m_grid, b_grid)
        bound = self.stable_dt(m_grid, b_grid)
        if dt is None:
            dt = min(params['cfl_safety'] * bound, T)
        elif dt > bound * (1 + 1e-12):
            raise CFLError("dt={} exceeds the stability bound {}".format(dt, bound), required_dt=bound)
        steps = max(int(np.ceil(T / dt - 1e-9)), 1)
        dt = T / steps
        logger.debug("Grid HJB solve: %d m-points, %d controls, %d steps of %g", len(m_grid), len(b_grid), steps, dt)

        reward = np.zeros_like(f) if self.running is None else _on_grid(self.running, m_grid[:, None], b_grid[None, :])
        spacing = np.diff(m_grid)
        values = np.empty((steps + 1, len(m_grid)))
        actions = np.empty((steps, len(m_grid)))
        values[-1] = _on_grid(V0, m_grid)
        tol = params['tie_tolerance']
        for i in reversed(range(steps)):
            u = values[i + 1]
            slope = np.diff(u) / spacing
            forward = np.append(slope, slope[-1])
            backward = np.insert(slope, 0, slope[0])
            H = f * np.where(f > 0, forward[:, None], backward[:, None]) + reward
            best = H.max(axis=1)
            choice = np.argmax(H >= (best - tol * np.abs(H).max(axis=1))[:, None], axis=1)
            values[i] = u + dt * best
            actions[i] = b_grid[choice]
        return GridHJBResult(np.linspace(0.0, T, steps + 1), m_grid, b_grid, values, actions)


def grid_dp_generalized(f_C: Callable, f_B: Callable, V0: Callable, running: Callable, T: float,
                        m_grid: Sequence[float], b_grid: Sequence[float], dt: float = None, **kwargs) -> GridHJBResult:
    """Value and feedback tables on the (t, m) grid, see GridHJBSolver"""
    return GridHJBSolver(f_C, f_B, running, **kwargs).solve(V0, T, m_grid, b_grid, dt)
