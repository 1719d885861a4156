"""
Control spaces (E, d) of the major player and validated control points.
"""
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from ..exceptions import FragCoagInputException


class ControlSpace(ABC):
    """
    Interface for a compact metric control space (E, d)
    """

    @abstractmethod
    def __contains__(self, value) -> bool:
        pass

    @abstractmethod
    def distance(self, a, b) -> float:
        """Metric d(a, b)"""

    @abstractmethod
    def numeric(self, value) -> float:
        """Real number handed to the rate kernels for this control value"""

    def sup_norm(self, values) -> float:
        """sup of d(a, reference) over the given control values"""
        return max((self.distance(v, self.reference) for v in values), default=0.0)


class IntervalControlSpace(ControlSpace):
    """
    The interval [low, high] (default [0, 1]) with d(a, b) = |a - b| and reference point 0
    """

    def __init__(self, low: float = 0.0, high: float = 1.0):
        if not low < high:
            raise FragCoagInputException("Interval control space needs low < high, got [{}, {}]".format(low, high))
        self.low = float(low)
        self.high = float(high)
        self.reference = 0.0 if low <= 0.0 <= high else self.low

    def __contains__(self, value) -> bool:
        try:
            return self.low <= float(value) <= self.high
        except (TypeError, ValueError):
            return False

    def distance(self, a, b) -> float:
        return abs(float(a) - float(b))

    def numeric(self, value) -> float:
        return float(value)

    def grid(self, resolution: int) -> np.ndarray:
        """Uniform grid of `resolution` points including both ends"""
        if resolution < 1:
            raise FragCoagInputException("Grid resolution must be at least 1")
        if resolution == 1:
            return np.array([self.low])
        return np.linspace(self.low, self.high, resolution)

    def __repr__(self) -> str:
        return "IntervalControlSpace({}, {})".format(self.low, self.high)


class FiniteControlSpace(ControlSpace):
    """
    Finite set of labelled controls with a metric table

    Args:
        labels (Sequence[str]): Control labels
        values (Sequence[float]): Real value passed to the kernels for each label
        metric (array_like, optional): Symmetric distance table with zero diagonal. Defaults to |value_a - value_b|.
    """

    def __init__(self, labels: Sequence[str], values: Sequence[float], metric=None):
        if len(labels) != len(values) or len(labels) == 0:
            raise FragCoagInputException("Need one value per label and at least one label")
        if len(set(labels)) != len(labels):
            raise FragCoagInputException("Control labels must be unique")
        self.labels = list(labels)
        self.values = dict(zip(labels, (float(v) for v in values)))
        if metric is None:
            v = np.array([self.values[label] for label in self.labels])
            metric = np.abs(v[:, None] - v[None, :])
        metric = np.asarray(metric, dtype=float)
        if metric.shape != (len(labels), len(labels)) or not np.allclose(metric, metric.T) \
                or np.any(np.diag(metric) != 0) or np.any(metric < 0):
            raise FragCoagInputException("Metric table must be square, symmetric, nonnegative with zero diagonal")
        self.metric = metric
        self._pos = {label: k for (k, label) in enumerate(self.labels)}
        self.reference = self.labels[0]

    def __contains__(self, value) -> bool:
        return value in self._pos

    def distance(self, a, b) -> float:
        return float(self.metric[self._pos[a], self._pos[b]])

    def numeric(self, value) -> float:
        return self.values[value]

    def __repr__(self) -> str:
        return "FiniteControlSpace({})".format(self.labels)


UNIT_INTERVAL = IntervalControlSpace()


class ControlPoint():
    """
    A control value b in E, validated at construction

    Args:
        value: Real in the interval, or a label of a finite space
        space (ControlSpace, optional): Defaults to [0, 1]

    Raises:
        FragCoagInputException: value not in the space
    """
    __slots__ = ('value', 'space')

    def __init__(self, value, space: ControlSpace = UNIT_INTERVAL):
        if value not in space:
            raise FragCoagInputException("Control {} is not in {}".format(value, space))
        self.value = value
        self.space = space

    def __float__(self) -> float:
        return self.space.numeric(self.value)

    def __eq__(self, other) -> bool:
        if isinstance(other, ControlPoint):
            return self.value == other.value and self.space is other.space
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.value)

    def __repr__(self) -> str:
        return "ControlPoint({})".format(self.value)


def control_value(b) -> float:
    """
    Real control value from a float or ControlPoint, checked against [0, 1] for plain numbers

    Raises:
        FragCoagInputException: plain number outside [0, 1]
    """
    if isinstance(b, ControlPoint):
        return float(b)
    b = float(b)
    if not 0.0 <= b <= 1.0:
        raise FragCoagInputException("Control b must lie in [0, 1], was {}".format(b))
    return b
