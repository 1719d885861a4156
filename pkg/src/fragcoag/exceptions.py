class FragCoagException(Exception):
    """
    Base fragmentation-coagulation toolkit exception
    """


class FragCoagInputException(FragCoagException):
    """
    Input Exception - indicates the method input parameters were incorrect
    """


class FragCoagTypeError(FragCoagException, TypeError):
    """
    Type Error - indicates an object of the wrong kind was supplied (e.g., a kernel without rate evaluators)
    """


class TruncationError(FragCoagInputException):
    """
    Truncation index K_max is smaller than the largest occupied coalition size
    """


class StateSpaceError(FragCoagInputException):
    """
    State outside S = B+(L,R], or an enumeration larger than the configured cap
    """


class InvalidKernelError(FragCoagInputException):
    """
    Kernel produced a negative rate or could not be parsed
    """


class AbsorbingStateError(FragCoagException):
    """
    No event is enabled from the current state (total rate is zero)
    """


class NumericalInstabilityError(FragCoagException):
    """
    Integration aborted: clipped mass over tolerance or step size violating a stability bound
    """


class BranchError(FragCoagInputException):
    """
    Target norm is not reachable from the given state on the horizon; the optimal control is an extreme value
    """

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch


class ConfigError(FragCoagInputException):
    """
    Malformed configuration file or experiment specification
    """


class CFLError(NumericalInstabilityError):
    """
    Explicit scheme step larger than its stability bound; `required_dt` holds the largest admissible step
    """

    def __init__(self, message, required_dt=None):
        super().__init__(message)
        self.required_dt = required_dt
