"""
Rewards of the major player: running reward B(x, b) and terminal reward V0(x).
"""
from typing import Callable

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException
from ..kernels import Expression
from ..state import Composition, MeanFieldState


def state_array(x) -> np.ndarray:
    """Dense rescaled vector of a Composition, MeanFieldState or array"""
    if isinstance(x, Composition):
        return x.to_array(max(x.max_size, 1))
    if isinstance(x, MeanFieldState):
        return x.x
    return np.asarray(x, dtype=float)


def state_norm(x) -> float:
    """m(x) = sum_k x_k"""
    if isinstance(x, Composition):
        return x.m
    return float(np.sum(state_array(x)))


class RewardModel():
    """
    Running reward B(x, b) and terminal reward V0(x) with declared Lipschitz constant K_B (l2 norm) and sup bound ||B||_inf

    Args:
        running (Callable[[array, float], float]): B(x, b) on dense states
        terminal (Callable[[array], float]): V0(x) on dense states
        K_B (float, optional): Declared Lipschitz constant. Defaults to 0.
        B_inf (float, optional): Declared bound on |B| and |V0|. Defaults to 0.
    """

    def __init__(self, running: Callable, terminal: Callable, K_B: float = 0.0, B_inf: float = 0.0):
        if K_B < 0 or B_inf < 0:
            raise FragCoagInputException("K_B and B_inf must be nonnegative")
        self._running = running
        self._terminal = terminal
        self.K_B = float(K_B)
        self.B_inf = float(B_inf)

    def running(self, x, b) -> float:
        return float(self._running(state_array(x), float(b)))

    def terminal(self, x) -> float:
        return float(self._terminal(state_array(x)))

    def scaled(self, factor: float) -> "RewardModel":
        """Same reward multiplied by a positive constant"""
        if not factor > 0:
            raise FragCoagInputException("Scale factor must be positive")
        return _ScaledReward(self, factor)

    def check_bounds(self, states, controls) -> int:
        """Number of sampled (x, b) where |B| or |V0| exceeds the declared B_inf"""
        violations = 0
        for x in states:
            violations += int(abs(self.terminal(x)) > self.B_inf)
            violations += sum(int(abs(self.running(x, b)) > self.B_inf) for b in controls)
        return violations


class _ScaledReward(RewardModel):
    def __init__(self, base: RewardModel, factor: float):
        super().__init__(None, None, base.K_B * factor, base.B_inf * factor)
        self.base = base
        self.factor = factor

    def running(self, x, b) -> float:
        return self.factor * self.base.running(x, b)

    def terminal(self, x) -> float:
        return self.factor * self.base.terminal(x)


class NormReward(RewardModel):
    """
    Reward depending on the state only through m(x) = sum_k x_k: B(m, b) and V0(m)

    Args:
        B (Callable[[float, float], float]): Running reward as a function of (m, b)
        V0 (Callable[[float], float]): Terminal reward as a function of m
    """

    def __init__(self, B: Callable[[float, float], float], V0: Callable[[float], float], K_B: float = 0.0, B_inf: float = 0.0):
        super().__init__(None, None, K_B, B_inf)
        self.B = B
        self.V0 = V0

    def running(self, x, b) -> float:
        return float(self.B(state_norm(x), float(b)))

    def terminal(self, x) -> float:
        return float(self.V0(state_norm(x)))

    @classmethod
    def from_expressions(cls, B: str, V0: str, K_B: float = 0.0, B_inf: float = 0.0) -> "NormReward":
        """
        Reward from expression strings: B in m and b, V0 in m

        Example:
            reward = NormReward.from_expressions("0", "-(m - 1)**2", K_B=4, B_inf=4)
        """
        B_expr = Expression(B, ['m', 'b'])
        V0_expr = Expression(V0, ['m'])
        reward = cls(lambda m, b: B_expr(m=m, b=b), lambda m: V0_expr(m=m), K_B, B_inf)
        reward.expressions = (B, V0)
        return reward

    def to_json(self) -> dict:
        (B, V0) = getattr(self, 'expressions', (None, None))
        if B is None:
            raise NotImplementedError("Only expression rewards have a JSON form")
        return {'B': B, 'V0': V0, 'K_B': self.K_B, 'Binf': self.B_inf}


def load_reward(data: dict) -> NormReward:
    """Reward from JSON: {"B": "expr in m,b", "V0": "expr in m", "K_B": ..., "Binf": ...}"""
    try:
        return NormReward.from_expressions(str(data.get('B', '0')), str(data['V0']), float(data.get('K_B', 0.0)), float(data.get('Binf', 0.0)))
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError("Invalid reward JSON: {}".format(e)) from e
