"""
Built-in kernels: the norm-dependent family C_ij = b*f_C(m(x)), F_ij = (1-b)/(i-1)*f_B(m(x)) and its constant special case f_C = f_B = 1.
"""
from typing import Callable

import numpy as np

from ..exceptions import InvalidKernelError
from .rate_kernel import KernelBounds, RateKernel, StateView


class NormDependentKernel(RateKernel):
    """
    Kernel whose rates depend on the state only through its norm m(x) = sum_i x_i:

        C_ij(x, b) = b * f_C(m(x))
        F_ij(x, b) = (1 - b) / (i - 1) * f_B(m(x))

    Args:
        f_C (Callable[[float], float]): Merge intensity, nonnegative and Lipschitz on [0, R]
        f_B (Callable[[float], float]): Split intensity, nonnegative and Lipschitz on [0, R]
        bounds (KernelBounds): Declared constants (sup of f_C and f_B, and their derivative bounds)
        state_dependent (bool, optional): Set False when f_C and f_B are constant

    Raises:
        InvalidKernelError: f_C or f_B returned a negative value
    """

    def __init__(self, f_C: Callable[[float], float], f_B: Callable[[float], float], bounds: KernelBounds, state_dependent: bool = True):
        super().__init__(bounds)
        self.f_C = f_C
        self.f_B = f_B
        self.state_dependent = state_dependent

    def _intensity(self, f: Callable, name: str, m: float) -> float:
        value = float(f(m))
        if value < 0 or np.isnan(value):
            raise InvalidKernelError("{}(m={}) = {} is negative".format(name, m, value))
        return value

    def _coagulation(self, i, j, x: StateView, b: float):
        return b * self._intensity(self.f_C, 'f_C', x.m) * np.ones(np.broadcast(i, j).shape)

    def _fragmentation(self, i, j, x: StateView, b: float):
        return (1.0 - b) * self._intensity(self.f_B, 'f_B', x.m) / (i - 1.0) * np.ones(np.broadcast(i, j).shape)

    def norm_drift(self, m: float, b: float) -> float:
        """Right-hand side of the reduced norm dynamics, -b f_C(m) m^2 + (1-b) f_B(m) m"""
        return -b * self._intensity(self.f_C, 'f_C', m) * m * m + (1.0 - b) * self._intensity(self.f_B, 'f_B', m) * m

    def to_json(self) -> dict:
        (f_C, f_B) = (_expression_text(self.f_C), _expression_text(self.f_B))
        if f_C is None or f_B is None:
            return super().to_json()
        return {'type': 'norm_dependent', 'f_C': f_C, 'f_B': f_B, 'bounds': self.bounds.to_json()}


class ConstantExampleKernel(NormDependentKernel):
    """
    C_ij(x, b) = b, F_ij(x, b) = (1 - b)/(i - 1). Only merging happens at b = 1 and only splitting at b = 0.

    Declared bounds: C = 1, F = 1 (the split row sum is 1 - b), all derivative bounds 0.
    """

    def __init__(self):
        super().__init__(_one, _one, KernelBounds(C=1.0, F=1.0), state_dependent=False)

    def to_json(self) -> dict:
        return {'type': 'constant'}

    def __repr__(self) -> str:
        return "ConstantExampleKernel()"


def _one(m: float) -> float:
    return 1.0


def constant_example_kernel() -> ConstantExampleKernel:
    """
    The constant example kernel C_ij = b, F_ij = (1-b)/(i-1)

    Example:
        kernel = constant_example_kernel()
        kernel.coagulation(3, 5, x, 0.7)  # 0.7
        kernel.fragmentation(4, 1, x, 0.25)  # 0.25
    """
    return ConstantExampleKernel()


def norm_dependent_kernel(f_C: Callable[[float], float], f_B: Callable[[float], float], bounds: KernelBounds) -> NormDependentKernel:
    """
    Kernel C_ij = b*f_C(m(x)), F_ij = (1-b)/(i-1)*f_B(m(x)) with caller-declared bounds
    """
    return NormDependentKernel(f_C, f_B, bounds)


def _expression_text(f: Callable) -> str:
    expr = getattr(f, 'expression', None)
    return None if expr is None else expr.text
