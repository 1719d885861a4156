"""
Kernel construction from the JSON kernel spec
"""
from ..exceptions import ConfigError, FragCoagInputException, InvalidKernelError
from .example_kernels import ConstantExampleKernel, NormDependentKernel
from .expression import ExpressionKernel, scalar_function
from .rate_kernel import KernelBounds, RateKernel


def load_kernel(spec: dict) -> RateKernel:
    """
    Build a kernel from its JSON form

    Supported forms:
        {"type": "constant"}
        {"type": "norm_dependent", "f_C": "expr in m", "f_B": "expr in m", "bounds": {"C": ..., "F": ..., "C1": ..., "F1": ..., "C2": ..., "F2": ...}}
        {"type": "expr", "C": "expr in m, b, i, j", "F": "expr in m, b, i, j", "bounds": {...}}

    Raises:
        ConfigError: Unknown type, missing keys or invalid bounds
        InvalidKernelError: Expression that cannot be parsed or uses a name or construct outside the expression language
    """
    if not isinstance(spec, dict) or 'type' not in spec:
        raise ConfigError("Kernel spec must be an object with a 'type' key")
    kind = spec['type']
    if kind == 'constant':
        return ConstantExampleKernel()
    try:
        bounds = KernelBounds.from_json(spec.get('bounds', {}))
        if kind == 'norm_dependent':
            return NormDependentKernel(scalar_function(spec['f_C']), scalar_function(spec['f_B']), bounds)
        if kind == 'expr':
            return ExpressionKernel(spec['C'], spec['F'], bounds)
    except KeyError as e:
        raise ConfigError("Kernel spec of type '{}' is missing key {}".format(kind, e)) from e
    except FragCoagInputException as e:
        if isinstance(e, (ConfigError, InvalidKernelError)):
            raise
        raise ConfigError("Invalid kernel spec: {}".format(e)) from e
    raise ConfigError("Unknown kernel type '{}' (expected constant, norm_dependent or expr)".format(kind))
