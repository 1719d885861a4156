from .control_point import ControlPoint, ControlSpace, FiniteControlSpace, IntervalControlSpace, UNIT_INTERVAL, control_value
from .rate_kernel import KernelBounds, RateKernel, StateView, as_view, check_kernel, random_state
from .example_kernels import ConstantExampleKernel, NormDependentKernel, constant_example_kernel, norm_dependent_kernel
from .expression import Expression, ExpressionKernel, scalar_function
from .loading import load_kernel

__all__ = ['ControlPoint', 'ControlSpace', 'FiniteControlSpace', 'IntervalControlSpace', 'UNIT_INTERVAL', 'control_value',
           'KernelBounds', 'RateKernel', 'StateView', 'as_view', 'check_kernel', 'random_state',
           'ConstantExampleKernel', 'NormDependentKernel', 'constant_example_kernel', 'norm_dependent_kernel',
           'Expression', 'ExpressionKernel', 'scalar_function', 'load_kernel']
