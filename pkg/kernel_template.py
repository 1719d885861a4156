from fragcoag.kernels import KernelBounds, RateKernel, StateView
import numpy as np


class TemplateKernel(RateKernel):
    """
    Template class for a controlled merging/splitting rate kernel
    """

    # REPLACE THE FOLLOWING WITH THE BOUNDS OF YOUR RATES
    # C bounds every C_ij, F bounds every split row sum sum_j F_ij; C1/F1 and C2/F2 bound their first and second derivatives in x
    default_bounds = KernelBounds(C=1.0, F=1.0)

    # Set to False if the rates do not depend on the state (lets the chain simulator cache them per control value)
    state_dependent = True

    def __init__(self, bounds: KernelBounds = None):
        """
        Constructor (optional)
        """
        super().__init__(bounds or self.default_bounds)
        # ADD PARAMETER CHECKS HERE

    def _coagulation(self, i: np.ndarray, j: np.ndarray, x: StateView, b: float) -> np.ndarray:
        """
        Merge rates C_ij(x, b) for integer arrays i, j (broadcast together)

        Must be symmetric in (i, j) and nonnegative. x.m is the norm of the state; x.x is its dense vector.
        """
        # REPLACE WITH YOUR MERGE RATES
        return b * np.ones(np.broadcast(i, j).shape)

    def _fragmentation(self, i: np.ndarray, j: np.ndarray, x: StateView, b: float) -> np.ndarray:
        """
        Split rates F_ij(x, b) of a size-i coalition into sizes j and i - j, for 1 <= j < i

        Must satisfy F_ij = F_{i,i-j} and be nonnegative.
        """
        # REPLACE WITH YOUR SPLIT RATES
        return (1.0 - b) / (i - 1.0) * np.ones(np.broadcast(i, j).shape)
