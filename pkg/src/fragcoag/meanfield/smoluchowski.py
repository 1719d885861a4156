"""
Truncated Smoluchowski vector field f(x, b) of the mean-field limit:

    f_i = sum_{j<i} C_{j,i-j} x_j x_{i-j} - 2 sum_j C_ij x_i x_j + 2 sum_{j>i} F_ji x_j - sum_{j<i} F_ij x_i

for sizes i <= K_max, with every sum truncated at K_max.
"""
from typing import Callable, Tuple

import numpy as np

from ..kernels import RateKernel, StateView, control_value
from ..state import MeanFieldState


class SmoluchowskiField():
    """
    Vector field for one kernel and truncation index. Merge and split matrices of state-independent kernels are cached per control value.

    Args:
        kernel (RateKernel): Rate kernel
        K_max (int): Truncation index
    """

    def __init__(self, kernel: RateKernel, K_max: int):
        self.kernel = kernel
        self.K_max = K_max
        self.sizes = np.arange(1, K_max + 1)
        index = np.arange(K_max)
        # a + c for 0-based sizes a, c: the merged size is a + c + 2
        self._index_sum = (index[:, None] + index[None, :]).ravel()
        self._cache = {}

    def matrices(self, x: np.ndarray, b: float) -> Tuple[np.ndarray, np.ndarray]:
        """(C matrix, F matrix) at state x"""
        if not self.kernel.state_dependent and b in self._cache:
            return self._cache[b]
        view = StateView(x)
        result = (self.kernel.coagulation_matrix(view, b, self.K_max), self.kernel.fragmentation_matrix(view, b, self.K_max))
        if not self.kernel.state_dependent:
            self._cache[b] = result
        return result

    def __call__(self, x: np.ndarray, b: float) -> Tuple[np.ndarray, float]:
        """
        Returns:
            tuple: (f(x, b) as an array of length K_max, mass flux lost above K_max)
        """
        (Cm, Fm) = self.matrices(x, b)
        K = self.K_max
        pairs = Cm * np.outer(x, x)
        produced = np.bincount(self._index_sum, weights=pairs.ravel(), minlength=2 * K - 1)
        f = np.zeros(K)
        f[1:] = produced[:K - 1]
        f -= 2 * x * (Cm @ x)
        f += 2 * (Fm.T @ x) - x * Fm.sum(axis=1)
        leak = float(np.arange(K + 1, 2 * K + 1) @ produced[K - 1:])
        return (f, leak)


def _dense(x) -> np.ndarray:
    return x.x if isinstance(x, MeanFieldState) else np.asarray(x, dtype=float)


def smoluchowski_rhs(x, kernel: RateKernel, b) -> Tuple[np.ndarray, float]:
    """
    Right-hand side f(x, b) of the mean-field ODE

    Args:
        x (MeanFieldState or array): State, truncated at K_max = len(x)
        kernel (RateKernel): Rate kernel
        b: Control value

    Returns:
        tuple: (f as an array of length K_max, truncation leak: mass per unit time flowing to sizes above K_max)

    Example:
        (f, leak) = smoluchowski_rhs([1, 0, 0], constant_example_kernel(), 1)
        f  # [-2, 1, 0]
    """
    x = _dense(x)
    return SmoluchowskiField(kernel, len(x))(x, control_value(b))


def mass_drift(x, kernel: RateKernel, b) -> float:
    """
    sum_k k*f_k(x, b). Zero up to rounding while the support of x stays below K_max/2; otherwise equal to minus the truncation leak.
    """
    x = _dense(x)
    (f, _) = smoluchowski_rhs(x, kernel, b)
    return float(np.arange(1, len(x) + 1) @ f)


def generator_apply(grad_G: Callable[[np.ndarray], np.ndarray], x, kernel: RateKernel, b) -> float:
    """
    Generator of the limit applied to a C^1 test function: Lambda_b G(x) = sum_i f_i(x, b) * dG/dx_i(x)

    Args:
        grad_G (Callable[[array], array]): Gradient of G, returning an array of length K_max
        x (MeanFieldState or array): State
        kernel (RateKernel): Rate kernel
        b: Control value
    """
    x = _dense(x)
    (f, _) = smoluchowski_rhs(x, kernel, b)
    return float(np.asarray(grad_G(x), dtype=float) @ f)
