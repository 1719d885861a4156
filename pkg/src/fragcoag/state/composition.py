"""
Exact integer state of the N-player chain: coalition counts by size together with the rescaling parameter h.
"""
from collections.abc import Mapping
from types import MappingProxyType
from typing import Dict, Iterator, Tuple

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException, StateSpaceError, TruncationError

# Tolerance used when comparing the rescaled mass h*N against the radius R
MASS_TOLERANCE = 1e-12


class Composition(Mapping):
    """
    Sparse composition n of the small players into coalitions, with scale h. The rescaled chain state is x = h*n.

    Objects of this class behave like a read-only mapping size -> count. Only strictly positive counts are stored.

    Args:
        counts (Mapping[int, int]): Coalition size k -> number of coalitions n_k of that size. Zero entries are dropped.
        h (float): Rescaling parameter (positive)
        R (float, optional): Radius of the state space. If given, a composition with h*N > R is rejected.

    Raises:
        FragCoagInputException: Non-positive size, negative or non-integer count, or non-positive h
        StateSpaceError: Mass h*N exceeds R

    Example:
        c = Composition({1: 4}, h=0.25)
        c.N  # 4
        c.x_mass  # 1.0
    """

    __slots__ = ('_counts', '_h', '_N', '_R')

    def __init__(self, counts: Mapping, h: float, R: float = None):
        if not h > 0:
            raise FragCoagInputException("h must be positive, was {}".format(h))
        cleaned = {}
        total = 0
        for (k, n_k) in dict(counts).items():
            k_int = int(k)
            if k_int != float(k) or k_int < 1:
                raise FragCoagInputException("Coalition sizes must be positive integers, got {}".format(k))
            if int(n_k) != n_k or n_k < 0:
                raise FragCoagInputException("Counts must be nonnegative integers, got n_{}={}".format(k, n_k))
            if n_k > 0:
                cleaned[k_int] = int(n_k)
                total += k_int * int(n_k)
        self._counts = dict(sorted(cleaned.items()))
        self._h = float(h)
        self._N = total
        self._R = R
        if R is not None and self._h * total > R + MASS_TOLERANCE:
            raise StateSpaceError("Composition mass h*N = {} exceeds R = {}".format(self._h * total, R))

    @classmethod
    def singletons(cls, N: int, h: float, R: float = None) -> "Composition":
        """Initial state in which every one of the N players is alone"""
        return cls({1: N} if N > 0 else {}, h, R)

    @classmethod
    def _trusted(cls, counts: Dict[int, int], h: float, N: int, R: float = None) -> "Composition":
        # Internal constructor for the simulators: counts already validated and mass known
        obj = cls.__new__(cls)
        obj._counts = dict(sorted((k, v) for (k, v) in counts.items() if v > 0))
        obj._h = h
        obj._N = N
        obj._R = R
        return obj

    # Mapping interface
    def __getitem__(self, k: int) -> int:
        return self._counts[k]

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def get(self, k, default=0):
        return self._counts.get(k, default)

    @property
    def counts(self) -> Mapping:
        """Read-only view of size -> count"""
        return MappingProxyType(self._counts)

    @property
    def h(self) -> float:
        return self._h

    @property
    def R(self) -> float:
        return self._R

    @property
    def N(self) -> int:
        """Total number of small players, sum_k k*n_k"""
        return self._N

    @property
    def x_mass(self) -> float:
        """Mass norm of the rescaled state, ||x||_{l1(L)} = h*N"""
        return self._h * self._N

    @property
    def coalition_count(self) -> int:
        """Number of coalitions, sum_k n_k"""
        return sum(self._counts.values())

    @property
    def m(self) -> float:
        """l1 norm of the rescaled state, h * sum_k n_k"""
        return self._h * self.coalition_count

    @property
    def max_size(self) -> int:
        return max(self._counts) if self._counts else 0

    def key(self) -> Tuple[Tuple[int, int], ...]:
        """Hashable (size, count) tuple sorted by size"""
        return tuple(self._counts.items())

    def __hash__(self) -> int:
        return hash((self.key(), self._h))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Composition):
            return NotImplemented
        return self._h == other._h and self._counts == other._counts

    def __repr__(self) -> str:
        return "Composition({}, h={})".format(self._counts, self._h)

    def to_array(self, K_max: int) -> np.ndarray:
        """
        Dense rescaled vector x of length K_max, x[k-1] = h*n_k

        Raises:
            TruncationError: K_max smaller than the largest occupied size
        """
        if K_max < self.max_size:
            raise TruncationError("K_max = {} is smaller than the largest occupied size {}".format(K_max, self.max_size))
        x = np.zeros(K_max)
        for (k, n_k) in self._counts.items():
            x[k - 1] = self._h * n_k
        return x

    def with_counts(self, counts: Mapping) -> "Composition":
        """New composition on the same scale and radius"""
        return Composition(counts, self._h, self._R)

    def to_json(self) -> dict:
        return {'h': self._h, 'counts': {str(k): n_k for (k, n_k) in self._counts.items()}}

    @classmethod
    def from_json(cls, data: dict, R: float = None) -> "Composition":
        """
        Build from the JSON form {"h": real, "counts": {"k": n_k}}
        """
        try:
            return cls({int(k): v for (k, v) in data['counts'].items()}, data['h'], R)
        except (KeyError, TypeError, AttributeError) as e:
            raise ConfigError("Composition JSON must have keys 'h' and 'counts': {}".format(e)) from e
