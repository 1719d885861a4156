"""
Control schedules: the control in force on each decision window [k*tau, (k+1)*tau).
"""
from abc import ABC, abstractmethod

import numpy as np

from ..exceptions import FragCoagInputException, FragCoagTypeError
from ..kernels import ControlPoint, control_value
from ..state import Composition

# Slack when converting T/tau to a decision count, so that T = n*tau in floating point gives n
GRID_SLACK = 1e-9


def decision_count(T: float, tau: float) -> int:
    """n = floor(T / tau)"""
    if not tau > 0:
        raise FragCoagInputException("tau must be positive, was {}".format(tau))
    return int(np.floor(T / tau + GRID_SLACK))


def window_count(T: float, tau: float) -> int:
    """Number of windows [k*tau, (k+1)*tau) intersecting [0, T); the last one may be shorter"""
    if T <= 0:
        return 0
    return max(int(np.ceil(T / tau - GRID_SLACK)), 1)


class ControlSchedule(ABC):
    """
    Interface for anything that chooses the control at decision time k*tau
    """

    @abstractmethod
    def decide(self, k: int, state: Composition) -> float:
        """Control value for window k given the chain state at time k*tau"""


class ConstantSchedule(ControlSchedule):
    """The same control b in every window"""

    def __init__(self, b):
        self.b = control_value(b)

    def decide(self, k: int, state: Composition) -> float:
        return self.b

    def __repr__(self) -> str:
        return "ConstantSchedule({})".format(self.b)


class SampledActionSchedule(ControlSchedule):
    """
    State-independent schedule sampling an action function at the decision times: b_k = alpha(k*tau)
    """

    def __init__(self, action, tau: float):
        self.action = action
        self.tau = tau

    def decide(self, k: int, state: Composition) -> float:
        return control_value(self.action.at(k * self.tau))


def as_schedule(control, tau: float) -> ControlSchedule:
    """
    Schedule from a constant (float or ControlPoint), an action function (anything with `at(t)`) or a ControlSchedule
    """
    if isinstance(control, ControlSchedule):
        return control
    if isinstance(control, (int, float, np.floating, ControlPoint)):
        return ConstantSchedule(control)
    if hasattr(control, 'at'):
        return SampledActionSchedule(control, tau)
    raise FragCoagTypeError("control must be a number, ControlPoint, action function or ControlSchedule, was {}".format(type(control).__name__))
