"""
Interface for controlled rate kernels C_ij(x, b) (merging) and F_ij(x, b) (splitting).
"""
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, fields
from typing import Union

import numpy as np

from ..exceptions import FragCoagInputException, FragCoagTypeError, InvalidKernelError
from ..state import Composition, MeanFieldState
from .control_point import control_value


@dataclass(frozen=True)
class KernelBounds:
    """
    Declared sup constants of a kernel over S x E. C and F bound the rates (F bounds the split row sum), C1/F1 the first derivatives and C2/F2 the second derivatives in x.
    """
    C: float = 0.0
    F: float = 0.0
    C1: float = 0.0
    F1: float = 0.0
    C2: float = 0.0
    F2: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None or not value >= 0:
                raise FragCoagInputException("Kernel bound {} must be a nonnegative number, was {}".format(f.name, value))

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "KernelBounds":
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise FragCoagInputException("Unknown kernel bound(s): {}".format(sorted(unknown)))
        return cls(**{k: float(v) for (k, v) in data.items()})


class StateView():
    """
    State handed to kernel evaluators. The norm m(x) = sum_k x_k is computed once; the dense vector is built lazily.
    """
    __slots__ = ('m', '_source', '_x')

    def __init__(self, source):
        self._source = source
        self._x = None
        if isinstance(source, Composition):
            self.m = source.m
        elif isinstance(source, MeanFieldState):
            self.m = source.m
            self._x = source.x
        elif source is None:
            self.m = 0.0
            self._x = np.zeros(1)
        else:
            self._x = np.asarray(source, dtype=float)
            self.m = float(self._x.sum())

    @classmethod
    def from_counts(cls, counts: dict, h: float) -> "StateView":
        """View of the rescaled chain state x = h*n without building a Composition"""
        view = cls.__new__(cls)
        view.m = h * sum(counts.values())
        view._source = (counts, h)
        view._x = None
        return view

    @property
    def x(self) -> np.ndarray:
        if self._x is None and isinstance(self._source, tuple):
            (counts, h) = self._source
            self._x = np.zeros(max(counts, default=1))
            for (k, n_k) in counts.items():
                self._x[k - 1] = h * n_k
        if self._x is None:
            self._x = self._source.to_array(max(self._source.max_size, 1))
        return self._x


def as_view(x) -> StateView:
    return x if isinstance(x, StateView) else StateView(x)


StateLike = Union[StateView, Composition, MeanFieldState, np.ndarray]


class RateKernel(ABC):
    """
    Interface class for controlled rate kernels

    Abstract base class for merging/splitting rate families. Subclasses implement the vectorized evaluators `_coagulation` and `_fragmentation`; index validation, nonnegativity checks and matrix assembly are provided here.

    Rates must satisfy C_ij = C_ji and F_ij = F_{i,i-j}. F is only defined for 1 <= j < i.

    Args:
        bounds (KernelBounds): Declared bound constants consumed by the bounds ledger

    Attributes:
        state_dependent (bool): False if the rates do not depend on x. The chain simulator caches rates of such kernels per control value.
    """
    state_dependent = True

    def __init__(self, bounds: KernelBounds):
        if not isinstance(bounds, KernelBounds):
            raise FragCoagTypeError("bounds must be KernelBounds, was {}".format(type(bounds).__name__))
        self.bounds = bounds

    @abstractmethod
    def _coagulation(self, i: np.ndarray, j: np.ndarray, x: StateView, b: float) -> np.ndarray:
        """Merge rates C_ij(x, b) broadcast over integer arrays i, j"""

    @abstractmethod
    def _fragmentation(self, i: np.ndarray, j: np.ndarray, x: StateView, b: float) -> np.ndarray:
        """Split rates F_ij(x, b) broadcast over integer arrays i, j with 1 <= j < i"""

    def coagulation(self, i, j, x: StateLike, b) -> Union[float, np.ndarray]:
        """
        Merge rate C_ij(x, b)

        Args:
            i, j (int or array[int]): Coalition sizes (broadcast together)
            x: State (Composition, MeanFieldState, array or StateView)
            b: Control value

        Raises:
            InvalidKernelError: Negative rate produced
        """
        i, j, scalar = _indices(i, j)
        if np.any(i < 1) or np.any(j < 1):
            raise FragCoagInputException("Coalition sizes must be >= 1")
        rates = np.broadcast_to(self._coagulation(i, j, as_view(x), control_value(b)), np.broadcast(i, j).shape)
        _check_nonnegative(rates, 'C')
        return float(rates) if scalar else rates

    def fragmentation(self, i, j, x: StateLike, b) -> Union[float, np.ndarray]:
        """
        Split rate F_ij(x, b): a coalition of size i splits into sizes j and i - j

        Raises:
            FragCoagInputException: Some j is not in 1..i-1 (this includes every call with i = 1)
            InvalidKernelError: Negative rate produced
        """
        i, j, scalar = _indices(i, j)
        if np.any(j < 1) or np.any(j >= i):
            raise FragCoagInputException("Split rates are only defined for 1 <= j < i")
        rates = np.broadcast_to(self._fragmentation(i, j, as_view(x), control_value(b)), np.broadcast(i, j).shape)
        _check_nonnegative(rates, 'F')
        return float(rates) if scalar else rates

    def fragmentation_row(self, i: int, x: StateLike, b) -> np.ndarray:
        """F_i1, ..., F_i(i-1); empty for i = 1"""
        if i <= 1:
            return np.zeros(0)
        return np.atleast_1d(self.fragmentation(np.full(i - 1, i), np.arange(1, i), x, b))

    def fragmentation_total(self, i: int, x: StateLike, b) -> float:
        """sum_{j<i} F_ij(x, b); zero for a singleton"""
        return float(self.fragmentation_row(i, x, b).sum())

    def coagulation_matrix(self, x: StateLike, b, K_max: int) -> np.ndarray:
        """K_max x K_max array with entry [i-1, j-1] = C_ij(x, b)"""
        sizes = np.arange(1, K_max + 1)
        return np.array(self.coagulation(sizes[:, None], sizes[None, :], x, b), dtype=float).reshape(K_max, K_max)

    def fragmentation_matrix(self, x: StateLike, b, K_max: int) -> np.ndarray:
        """K_max x K_max lower-triangular array with entry [i-1, j-1] = F_ij(x, b) for j < i and 0 elsewhere"""
        Fm = np.zeros((K_max, K_max))
        if K_max < 2:
            return Fm
        (rows, cols) = np.tril_indices(K_max, -1)
        Fm[rows, cols] = self.fragmentation(rows + 1, cols + 1, x, b)
        return Fm

    def to_json(self) -> dict:
        raise NotImplementedError("{} has no JSON form".format(type(self).__name__))


def _indices(i, j):
    scalar = np.isscalar(i) and np.isscalar(j)
    i = np.asarray(i)
    j = np.asarray(j)
    if not (np.issubdtype(i.dtype, np.integer) and np.issubdtype(j.dtype, np.integer)):
        if np.any(i != np.round(i)) or np.any(j != np.round(j)):
            raise FragCoagInputException("Coalition sizes must be integers")
        i = i.astype(int)
        j = j.astype(int)
    return (i, j, scalar)


def _check_nonnegative(rates: np.ndarray, name: str):
    if np.any(rates < 0) or np.any(np.isnan(rates)):
        raise InvalidKernelError("Kernel produced a negative or NaN {} rate (min {})".format(name, np.nanmin(rates) if rates.size else 0))


def check_kernel(kernel: RateKernel, rng: np.random.Generator, samples: int = 200, K_max: int = 12, R: float = 1.0, tol: float = 1e-12) -> dict:
    """
    Spot-check a kernel on random (i, j, x, b): symmetry of C and F, and the declared bounds C (pointwise) and F (split row sum).

    Args:
        kernel (RateKernel): Kernel to check
        rng (numpy.random.Generator): Random source
        samples (int, optional): Number of random states. Defaults to 200.
        K_max (int, optional): Largest size sampled. Defaults to 12.
        R (float, optional): Radius of S for the sampled states. Defaults to 1.
        tol (float, optional): Absolute tolerance. Defaults to 1e-12.

    Returns:
        dict: counts of violations for 'symmetry_C', 'symmetry_F', 'bound_C', 'bound_F'
    """
    report = {'symmetry_C': 0, 'symmetry_F': 0, 'bound_C': 0, 'bound_F': 0}
    sizes = np.arange(1, K_max + 1)
    for _ in range(samples):
        x = random_state(rng, K_max, R)
        b = rng.uniform()
        Cm = kernel.coagulation_matrix(x, b, K_max)
        report['symmetry_C'] += int(np.any(np.abs(Cm - Cm.T) > tol))
        report['bound_C'] += int(np.any(Cm > kernel.bounds.C + tol))
        Fm = kernel.fragmentation_matrix(x, b, K_max)
        for i in sizes[1:]:
            row = Fm[i - 1, :i - 1]
            report['symmetry_F'] += int(np.any(np.abs(row - row[::-1]) > tol))
        report['bound_F'] += int(np.any(Fm.sum(axis=1) > kernel.bounds.F + tol))
    return report


def random_state(rng: np.random.Generator, K_max: int, R: float = 1.0, support: int = None) -> np.ndarray:
    """
    Random point of S = B+(L,R] truncated at K_max, with mass drawn uniformly in (0, R]

    Args:
        support (int, optional): Largest occupied size. Defaults to K_max.
    """
    support = K_max if support is None else support
    x = np.zeros(K_max)
    x[:support] = rng.exponential(size=support)
    mass = np.arange(1, K_max + 1) @ x
    return x * (R * (1.0 - rng.uniform()) / mass)
