"""
Truncated real state of the mean-field limit, the norms used throughout the package and the scaling map from the chain.
"""
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException, StateSpaceError
from .composition import Composition, MASS_TOLERANCE


class MeanFieldState():
    """
    Nonnegative sequence x = (x_1, ..., x_Kmax) in S = B+(L,R]. Index k-1 of the underlying array holds x_k.

    Args:
        x (array_like): Values x_1..x_Kmax
        R (float, optional): Radius of S. If given, states with mass norm sum_k k*x_k > R are rejected.

    Raises:
        FragCoagInputException: Negative component or empty sequence
        StateSpaceError: Mass norm exceeds R
    """

    def __init__(self, x, R: float = None):
        x = np.array(x, dtype=float)
        if x.ndim != 1 or len(x) < 1:
            raise FragCoagInputException("State must be a nonempty 1-d sequence")
        if np.any(x < 0):
            raise FragCoagInputException("State components must be nonnegative, min was {}".format(x.min()))
        x.setflags(write=False)
        self._x = x
        self.R = R
        if R is not None and self.mass > R + MASS_TOLERANCE:
            raise StateSpaceError("Mass norm {} exceeds R = {}".format(self.mass, R))

    @property
    def x(self) -> np.ndarray:
        """Read-only array of components"""
        return self._x

    @property
    def K_max(self) -> int:
        return len(self._x)

    @property
    def sizes(self) -> np.ndarray:
        return np.arange(1, self.K_max + 1)

    @property
    def m(self) -> float:
        """l1 norm, sum_k x_k"""
        return float(self._x.sum())

    @property
    def mass(self) -> float:
        """Mass norm, sum_k k*x_k"""
        return float(self.sizes @ self._x)

    def __len__(self) -> int:
        return self.K_max

    def __getitem__(self, k: int) -> float:
        """Component x_k (1-based size index)"""
        if k < 1:
            raise IndexError("Sizes start at 1")
        return float(self._x[k - 1]) if k <= self.K_max else 0.0

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeanFieldState):
            return NotImplemented
        return np.array_equal(self._x, other._x)

    def __repr__(self) -> str:
        return "MeanFieldState(K_max={}, m={:.6g}, mass={:.6g})".format(self.K_max, self.m, self.mass)

    def padded(self, K_max: int) -> "MeanFieldState":
        """Same state on a longer truncation"""
        if K_max < self.K_max and np.any(self._x[K_max:] > 0):
            raise FragCoagInputException("Cannot shorten a state with support beyond K_max = {}".format(K_max))
        x = np.zeros(K_max)
        n = min(K_max, self.K_max)
        x[:n] = self._x[:n]
        return MeanFieldState(x, self.R)

    def to_json(self) -> list:
        return self._x.tolist()

    @classmethod
    def from_json(cls, data, R: float = None) -> "MeanFieldState":
        """Build from the JSON array form [x_1, x_2, ...]"""
        if not isinstance(data, list):
            raise ConfigError("Mean-field state JSON must be an array, was {}".format(type(data).__name__))
        return cls(data, R)


@dataclass(frozen=True)
class NormReport:
    """
    Norms of a state: l1 = sum|x_k|, l1L = sum k|x_k| (mass norm), l2 = (sum x_k^2)^(1/2). For x in S, l2 <= l1 <= l1L.
    """
    l1: float
    l1L: float
    l2: float


def to_mean_field(c: Composition, K_max: int) -> MeanFieldState:
    """
    Rescale a composition into the mean-field state x = h*n

    Args:
        c (Composition): Chain state
        K_max (int): Truncation index of the result

    Returns:
        MeanFieldState: x with x_k = h*n_k for k <= K_max

    Raises:
        TruncationError: K_max smaller than the largest occupied size
    """
    return MeanFieldState(c.to_array(max(K_max, 1)), c.R)


def norms(x: Union[MeanFieldState, Composition, np.ndarray]) -> NormReport:
    """
    Compute the l1, l1(L) and l2 norms of a state

    For a Composition, the mass norm is computed from the integer count and scaled once (h*N).
    """
    if isinstance(x, Composition):
        l1 = x.h * x.coalition_count
        l1L = x.h * x.N
        l2 = x.h * float(np.sqrt(sum(n_k * n_k for n_k in x.values())))
        return NormReport(l1, l1L, l2)
    values = x.x if isinstance(x, MeanFieldState) else np.asarray(x, dtype=float)
    a = np.abs(values)
    return NormReport(float(a.sum()), float(np.arange(1, len(a) + 1) @ a), float(np.sqrt(a @ a)))
