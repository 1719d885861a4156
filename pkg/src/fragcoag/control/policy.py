"""
Policies: sequences of decision rules pi_k(x) applied at the decision times k*tau.
"""
from abc import abstractmethod
import json
from typing import Callable, Sequence

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException
from ..kernels import control_value
from ..simulators import ControlSchedule, decision_count
from ..state import Composition, StateSpace


class Policy(ControlSchedule):
    """
    Interface class for policies (pi_0, ..., pi_{n-1}) with n = floor(T / tau)

    Args:
        tau (float): Decision step
        n (int): Number of decision rules
        metadata (dict, optional): Free-form description (e.g. how the policy was built)
    """

    def __init__(self, tau: float, n: int, metadata: dict = None):
        if not tau > 0 or n < 0:
            raise FragCoagInputException("Policy needs tau > 0 and n >= 0 (tau={}, n={})".format(tau, n))
        self.tau = tau
        self.n = n
        self.metadata = dict(metadata or {})

    @abstractmethod
    def rule(self, k: int, state: Composition) -> float:
        """pi_k(state)"""

    def decide(self, k: int, state: Composition) -> float:
        if not 0 <= k < max(self.n, 1):
            raise FragCoagInputException("Decision index {} outside 0..{}".format(k, self.n - 1))
        return control_value(self.rule(k, state))

    def check_horizon(self, T: float):
        """Raise unless n = floor(T / tau)"""
        if decision_count(T, self.tau) != self.n:
            raise FragCoagInputException("Policy has n={} rules but floor(T/tau)={}".format(self.n, decision_count(T, self.tau)))


class StaticPolicy(Policy):
    """
    State-independent policy pi_k(x) = values[k]
    """

    def __init__(self, values: Sequence[float], tau: float, metadata: dict = None):
        super().__init__(tau, len(values), metadata)
        self.values = [control_value(v) for v in values]

    def rule(self, k: int, state: Composition) -> float:
        return self.values[k]

    def to_json(self) -> dict:
        return {'type': 'static', 'tau': self.tau, 'values': self.values, 'metadata': self.metadata}

    def __repr__(self) -> str:
        return "StaticPolicy({}, tau={})".format(self.values, self.tau)


class TablePolicy(Policy):
    """
    Lookup policy on an enumerated state space: pi_k(x) = table[k, index(x)]

    Args:
        space (StateSpace): Enumerated S(h)
        table (array): Controls, shape (n, |S(h)|)
        tau (float): Decision step
    """

    def __init__(self, space: StateSpace, table, tau: float, metadata: dict = None):
        table = np.asarray(table, dtype=float)
        if table.ndim != 2 or table.shape[1] != len(space):
            raise FragCoagInputException("Table must have shape (n, {}), was {}".format(len(space), table.shape))
        super().__init__(tau, table.shape[0], metadata)
        self.space = space
        self.table = table

    def rule(self, k: int, state: Composition) -> float:
        return self.table[k, self.space.index(state)]

    def to_json(self) -> dict:
        return {'type': 'table', 'tau': self.tau, 'N': self.space.N,
                'rules': [{json.dumps([list(pair) for pair in c.key()]): float(self.table[k, s]) for (s, c) in enumerate(self.space)} for k in range(self.n)],
                'metadata': self.metadata}


class FeedbackPolicy(Policy):
    """
    Policy given by a function rule(k, state) -> b
    """

    def __init__(self, rule: Callable[[int, Composition], float], tau: float, n: int, metadata: dict = None):
        super().__init__(tau, n, metadata)
        self._rule = rule

    def rule(self, k: int, state: Composition) -> float:
        return self._rule(k, state)


def threshold_policy(m_target: float, tau: float, n: int, below: float = 0.0, above: float = 1.0) -> FeedbackPolicy:
    """Feedback rule choosing `below` while m(x) < m_target and `above` otherwise"""
    return FeedbackPolicy(lambda k, c: below if c.m < m_target else above, tau, n,
                          {'kind': 'threshold', 'm_target': m_target, 'below': below, 'above': above})


def load_policy(data: dict):
    """
    Policy from JSON: {"type": "static", "tau": ..., "values": [...]} or {"type": "table", "tau": ..., "N": ..., "rules": [{"[[size, count], ...]": b}, ...]}
    """
    try:
        kind = data.get('type', 'static')
        if kind == 'static':
            return StaticPolicy(data['values'], float(data['tau']), data.get('metadata'))
        if kind == 'table':
            space = StateSpace(int(data['N']), data.get('h'))
            table = np.zeros((len(data['rules']), len(space)))
            for (k, rules) in enumerate(data['rules']):
                for (key, b) in rules.items():
                    table[k, space.index(dict(tuple(pair) for pair in json.loads(key)))] = b
            return TablePolicy(space, table, float(data['tau']), data.get('metadata'))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("Invalid policy JSON: {}".format(e)) from e
    raise ConfigError("Unknown policy type '{}'".format(kind))
