"""
Open-loop action functions alpha: [0, T] -> E of the major player, piecewise Lipschitz.
"""
import bisect
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from ..exceptions import ConfigError, FragCoagInputException
from ..kernels import control_value

# Tolerance when checking that pieces tile [0, T]
TILING_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ActionPiece:
    """
    alpha on [t0, t1]: constant b0 ('const') or linear from b0 to b1 ('linear')
    """
    t0: float
    t1: float
    kind: str = 'const'
    b0: float = 0.0
    b1: float = None

    def __post_init__(self):
        if not self.t1 > self.t0:
            raise FragCoagInputException("Piece needs t0 < t1, got [{}, {}]".format(self.t0, self.t1))
        if self.kind not in ('const', 'linear'):
            raise FragCoagInputException("Piece kind must be 'const' or 'linear', was '{}'".format(self.kind))
        control_value(self.b0)
        if self.kind == 'linear':
            if self.b1 is None:
                raise FragCoagInputException("Linear piece needs b1")
            control_value(self.b1)

    @property
    def end_value(self) -> float:
        return self.b0 if self.kind == 'const' else self.b1

    @property
    def lipschitz(self) -> float:
        return 0.0 if self.kind == 'const' else abs(self.b1 - self.b0) / (self.t1 - self.t0)

    def value(self, t: float) -> float:
        if self.kind == 'const':
            return self.b0
        s = min(max((t - self.t0) / (self.t1 - self.t0), 0.0), 1.0)
        return self.b0 + (self.b1 - self.b0) * s

    def to_json(self) -> dict:
        data = {'t0': self.t0, 't1': self.t1, 'kind': self.kind, 'b0': self.b0}
        if self.kind == 'linear':
            data['b1'] = self.b1
        return data


class ActionFunction():
    """
    Piecewise Lipschitz control alpha on [0, T]; right-continuous at breakpoints

    Args:
        pieces (Sequence[ActionPiece]): Pieces tiling [0, T] in order
        lipschitz (float, optional): Declared constant K_alpha. Defaults to the largest piece slope.
        discontinuities (int, optional): Declared count p. Defaults to the number of jumps between pieces.

    Example:
        alpha = ActionFunction.linear(0, 1, T=1)
        alpha.at(0.25)  # 0.25
    """

    def __init__(self, pieces: Sequence[ActionPiece], lipschitz: float = None, discontinuities: int = None):
        pieces = list(pieces)
        if not pieces:
            raise FragCoagInputException("An action function needs at least one piece")
        if abs(pieces[0].t0) > TILING_TOLERANCE:
            raise FragCoagInputException("First piece must start at 0, starts at {}".format(pieces[0].t0))
        for (a, c) in zip(pieces, pieces[1:]):
            if abs(a.t1 - c.t0) > TILING_TOLERANCE:
                raise FragCoagInputException("Pieces must tile [0, T] without gap or overlap ({} vs {})".format(a.t1, c.t0))
        self.pieces = pieces
        self._starts = [p.t0 for p in pieces]
        jumps = sum(1 for (a, c) in zip(pieces, pieces[1:]) if a.end_value != c.b0)
        self.lipschitz = max(p.lipschitz for p in pieces) if lipschitz is None else float(lipschitz)
        self.discontinuities = jumps if discontinuities is None else int(discontinuities)

    @property
    def T(self) -> float:
        return self.pieces[-1].t1

    def _piece(self, t: float) -> ActionPiece:
        return self.pieces[max(bisect.bisect_right(self._starts, t) - 1, 0)]

    def at(self, t: float, within: float = None) -> float:
        """
        alpha(t). With `within`, the piece containing that time is used (one-sided values at breakpoints).
        """
        return self._piece(t if within is None else within).value(t)

    def __call__(self, t: float) -> float:
        return self.at(t)

    def breakpoints(self) -> List[float]:
        return [p.t0 for p in self.pieces[1:]]

    def sup_norm(self) -> float:
        """sup |alpha(t)|"""
        return max(max(abs(p.b0), abs(p.end_value)) for p in self.pieces)

    def __eq__(self, other) -> bool:
        return isinstance(other, ActionFunction) and self.pieces == other.pieces

    def __repr__(self) -> str:
        return "ActionFunction({} piece(s) on [0, {}])".format(len(self.pieces), self.T)

    @classmethod
    def constant(cls, b: float, T: float) -> "ActionFunction":
        return cls([ActionPiece(0.0, T, 'const', control_value(b))])

    @classmethod
    def linear(cls, b0: float, b1: float, T: float) -> "ActionFunction":
        return cls([ActionPiece(0.0, T, 'linear', b0, b1)])

    @classmethod
    def staircase(cls, values: Sequence[float], tau: float) -> "ActionFunction":
        """Piecewise-constant function equal to values[k] on [k*tau, (k+1)*tau)"""
        if len(values) == 0:
            raise FragCoagInputException("Staircase needs at least one value")
        return cls([ActionPiece(k * tau, (k + 1) * tau, 'const', float(v)) for (k, v) in enumerate(values)])

    def to_json(self) -> dict:
        return {'pieces': [p.to_json() for p in self.pieces], 'lipschitz': self.lipschitz, 'discontinuities': self.discontinuities}

    @classmethod
    def from_json(cls, data: dict) -> "ActionFunction":
        """
        Build from {"pieces": [{"t0", "t1", "kind", "b0", "b1"}], "lipschitz": K_alpha, "discontinuities": p}
        """
        try:
            pieces = [ActionPiece(float(p['t0']), float(p['t1']), p.get('kind', 'const'), float(p['b0']),
                                  None if p.get('b1') is None else float(p['b1'])) for p in data['pieces']]
        except (KeyError, TypeError) as e:
            raise ConfigError("Invalid action function JSON: {}".format(e)) from e
        return cls(pieces, data.get('lipschitz'), data.get('discontinuities'))


def sample_times(tau: float, n: int) -> np.ndarray:
    """Decision times k*tau, k = 0..n-1"""
    return tau * np.arange(n)
