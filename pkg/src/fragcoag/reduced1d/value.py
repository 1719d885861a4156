"""
Terminal rewards of the norm-reduced problem, the explicit value function and the optimal constant action.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..control import ActionFunction
from ..exceptions import FragCoagInputException
from ..kernels import scalar_function
from .flow import band, optimal_branch


@dataclass(frozen=True)
class TerminalSpec:
    """
    Strictly concave terminal reward V0(m) with maximizer m_star

    Args:
        m_star (float): Maximizer of V0, positive
        V0 (Callable[[float], float]): Terminal reward as a function of the norm
        check (bool, optional): Spot-check maximality and strict concavity on sample points. Defaults to True.

    Raises:
        FragCoagInputException: m_star is not positive or the spot checks fail
    """
    m_star: float
    V0: Callable[[float], float]
    check: bool = True

    def __post_init__(self):
        if not self.m_star > 0:
            raise FragCoagInputException("m_star must be positive, was {}".format(self.m_star))
        if self.check:
            self.spot_check()

    def spot_check(self, points: int = 41):
        sample = np.linspace(0.0, 4 * self.m_star + 1.0, points)
        top = self.V0(self.m_star)
        for m in sample:
            if self.V0(m) > top + 1e-12 * max(1.0, abs(top)):
                raise FragCoagInputException("V0({}) exceeds V0(m*={})".format(m, self.m_star))
        for (a, c) in zip(sample[:-2], sample[2:]):
            if not self.V0((a + c) / 2) > (self.V0(a) + self.V0(c)) / 2:
                raise FragCoagInputException("V0 is not strictly concave on [{}, {}]".format(a, c))

    def __call__(self, m: float) -> float:
        return float(self.V0(m))

    @classmethod
    def from_expression(cls, V0: str, m_star: float, check: bool = True) -> "TerminalSpec":
        """TerminalSpec from an expression in m, e.g. "-(m - 1)**2" """
        return cls(float(m_star), scalar_function(V0, 'm'), check)

    @classmethod
    def quadratic(cls, m_star: float) -> "TerminalSpec":
        """V0(m) = -(m - m_star)^2"""
        return cls.from_expression("-(m - {!r})**2".format(float(m_star)), m_star)

    def to_json(self) -> dict:
        expr = getattr(self.V0, 'expression', None)
        if expr is None:
            raise NotImplementedError("Terminal reward has no expression form")
        return {'V0': expr.text, 'm_star': self.m_star}


def value_closed_form(t: float, m: float, T: float, spec: TerminalSpec) -> float:
    """
    Optimal value V(t, m) of the norm-reduced problem with f_C = f_B = 1 and no running reward:
    V0(m e^{T-t}) below the reachable band, V0(m*) inside it, V0(m / (1 + (T-t) m)) above it

    Raises:
        FragCoagInputException: m < 0 or t outside [0, T]
    """
    if m < 0 or t < -1e-12 or t > T + 1e-12:
        raise FragCoagInputException("value_closed_form needs m >= 0 and 0 <= t <= T (t={}, m={}, T={})".format(t, m, T))
    s = max(T - t, 0.0)
    (lower, upper) = band(s, spec.m_star)
    if m < lower:
        return spec(m * np.exp(s))
    if m > upper:
        return spec(m / (1.0 + s * m))
    return spec(spec.m_star)


def optimal_action(m0: float, T: float, spec: TerminalSpec, t: float = 0.0) -> ActionFunction:
    """
    Optimal constant action on [t, T] (expressed on [0, T - t]): b = 0 below the band, b* inside, b = 1 above
    """
    if not m0 > 0:
        raise FragCoagInputException("optimal_action needs m0 > 0, was {}".format(m0))
    (_, b) = optimal_branch(m0, T, spec.m_star, t)
    return ActionFunction.constant(b, T - t)
