"""
The norm-reduced dynamics m' = -b f_C(m) m^2 + (1 - b) f_B(m) m: closed-form flow for f_C = f_B = 1, numeric flow for the general class, and the control b* that steers m0 onto a target.
"""
import logging
from typing import Callable, Tuple

import numpy as np
from scipy.optimize import bisect

from ..exceptions import BranchError, FragCoagInputException
from ..kernels import KernelBounds, NormDependentKernel
from ..meanfield import rk4_step

logger = logging.getLogger(__name__)

GROW = 'grow'
REACH = 'reach'
SHRINK = 'shrink'

ROOT_TOLERANCE = 1e-14
DEFAULT_DT = 1e-3


def _check_flow_args(t, m0, b):
    (t, m0, b) = (np.asarray(t, dtype=float), np.asarray(m0, dtype=float), np.asarray(b, dtype=float))
    if np.any(t < 0) or np.any(m0 < 0):
        raise FragCoagInputException("m_flow needs t >= 0 and m0 >= 0")
    if np.any(b < 0) or np.any(b > 1) or np.any(np.isnan(b)):
        raise FragCoagInputException("Control must lie in [0, 1], was {}".format(b))
    return (t, m0, b)


def m_flow(t, m0, b):
    """
    Solution m(t, m0, b) of m' = -b m^2 + (1 - b) m, broadcast over array arguments

    With a = 1 - b this is the logistic solution m0 / (e^{-a t} + m0 b (1 - e^{-a t}) / a), which gives m0 e^t at b = 0 and m0 / (1 + t m0) at b = 1.

    Raises:
        FragCoagInputException: b outside [0, 1], t < 0 or m0 < 0
    """
    (t, m0, b) = _check_flow_args(t, m0, b)
    a = 1.0 - b
    growth = np.where(a > 0, -np.expm1(-a * t) / np.where(a > 0, a, 1.0), t)
    m = m0 / (np.exp(-a * t) + m0 * b * growth)
    return float(m) if m.ndim == 0 else m


def m_flow_uncorrected_denominator(t, m0, b):
    """
    Logistic formula with the factor b missing from the last denominator term, m0 a e^{a t} / (a - m0 b + m0 e^{a t}); kept to document the discrepancy.
    Its limit at b = 1 is m0 / (1 + m0 (1 + t)), so it disagrees with m_flow at both ends of [0, 1] whenever m0 > 0.
    """
    (t, m0, b) = _check_flow_args(t, m0, b)
    a = 1.0 - b
    safe = np.where(a > 0, a, 1.0)
    m = np.where(a > 0, m0 * safe * np.exp(safe * t) / (safe - m0 * b + m0 * np.exp(safe * t)), m0 / (1.0 + m0 * (1.0 + t)))
    return float(m) if m.ndim == 0 else m


def _norm_kernel(f_C: Callable, f_B: Callable) -> NormDependentKernel:
    one = (lambda m: 1.0)
    return NormDependentKernel(one if f_C is None else f_C, one if f_B is None else f_B, KernelBounds())


def integrate_norm(t: float, m0: float, b: float, f_C: Callable = None, f_B: Callable = None,
                   running: Callable = None, dt: float = DEFAULT_DT) -> Tuple[float, float]:
    """
    Fourth-order Runge-Kutta integration of the norm dynamics under the constant control b

    Args:
        t (float): Horizon
        m0 (float): Initial norm
        b (float): Constant control
        f_C, f_B (Callable, optional): Intensities. Default to 1.
        running (Callable, optional): Running reward B(m, b), integrated along the path
        dt (float, optional): Largest step. Defaults to 1e-3.

    Returns:
        tuple: (m(t), integral of B over [0, t])
    """
    (_, _, b) = _check_flow_args(t, m0, b)
    kernel = _norm_kernel(f_C, f_B)
    b = float(b)

    def fn(s, y):
        return np.array([kernel.norm_drift(y[0], b), 0.0 if running is None else running(y[0], b)])

    steps = max(int(np.ceil(t / dt)), 1)
    y = np.array([float(m0), 0.0])
    for k in range(steps):
        (y, _) = rk4_step(fn, k * t / steps, y, t / steps)
    return (float(y[0]), float(y[1]))


def m_flow_numeric(t: float, m0: float, b: float, f_C: Callable = None, f_B: Callable = None, dt: float = DEFAULT_DT) -> float:
    """m(t, m0, b) for general intensities by Runge-Kutta integration; reproduces m_flow when f_C = f_B = 1"""
    return integrate_norm(t, m0, b, f_C, f_B, dt=dt)[0]


def band(s: float, m_star: float) -> Tuple[float, float]:
    """
    Initial norms from which m_star is reachable within time s: [m_star e^{-s}, m_star / (1 - s m_star)], the upper end being +inf when s m_star >= 1
    """
    upper = np.inf if s * m_star >= 1 else m_star / (1.0 - s * m_star)
    return (m_star * np.exp(-s), upper)


def bstar(T: float, m0: float, m_star: float) -> float:
    """
    The control b* in [0, 1] with m_flow(T, m0, b*) = m_star, found by bisection

    Raises:
        BranchError: m_star is out of reach; `branch` is 'grow' (b = 0 still falls short) or 'shrink' (b = 1 still overshoots)
    """
    if not m_star > 0:
        raise FragCoagInputException("Target norm must be positive, was {}".format(m_star))
    tol = 1e-12 * max(1.0, m_star)
    gap0 = m_flow(T, m0, 0.0) - m_star
    gap1 = m_flow(T, m0, 1.0) - m_star
    if gap0 < -tol:
        raise BranchError("m*={} is above m(T, m0, 0)={}: use b = 0".format(m_star, gap0 + m_star), branch=GROW)
    if gap1 > tol:
        raise BranchError("m*={} is below m(T, m0, 1)={}: use b = 1".format(m_star, gap1 + m_star), branch=SHRINK)
    if gap0 <= tol:
        return 0.0
    if gap1 >= -tol:
        return 1.0
    return float(bisect(lambda b: m_flow(T, m0, b) - m_star, 0.0, 1.0, xtol=ROOT_TOLERANCE))


def optimal_branch(m0: float, T: float, m_star: float, t: float = 0.0) -> Tuple[str, float]:
    """
    Constant control optimal from (t, m0) for a terminal reward maximized at m_star, with horizon-to-go T - t

    Returns:
        tuple: ('grow', 0.0) below the reachable band, ('reach', b*) inside it, ('shrink', 1.0) above it
    """
    if t > T:
        raise FragCoagInputException("Decision time {} is after the horizon {}".format(t, T))
    try:
        return (REACH, bstar(T - t, m0, m_star))
    except BranchError as e:
        logger.debug("Target not reachable from m0=%g: %s", m0, e)
        return (e.branch, 0.0 if e.branch == GROW else 1.0)
