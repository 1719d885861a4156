"""
Q-matrix of the chain on an enumerated state space S(h), and the chain generator applied to a test function.
"""
from typing import Callable

import numpy as np

from ..kernels import RateKernel
from ..state import Composition, StateSpace
from .events import RateSource, apply_event, event_table


def generator_matrix(space: StateSpace, kernel: RateKernel, b, literal_generator: bool = False) -> np.ndarray:
    """
    Dense generator Q of the chain under the constant control b: Q[s, t] is the jump rate from state s to state t and each row sums to zero.

    Self-merges of a lone coalition under `literal_generator` do not move the state and are left out of Q.
    """
    source = RateSource(kernel)
    Q = np.zeros((len(space), len(space)))
    for (s, c) in enumerate(space):
        table = event_table(dict(c.counts), c.h, source, b, literal_generator)
        for e in np.flatnonzero(table.rates > 0):
            target = dict(c.counts)
            (kind, i, j) = table.key(e)
            if apply_event(target, kind, i, j):
                Q[s, space.index(target)] += table.rates[e]
        Q[s, s] = -Q[s].sum()
    return Q


def chain_generator_apply(G: Callable[[Composition], float], c: Composition, kernel: RateKernel, b, literal_generator: bool = False) -> float:
    """
    Lambda_{b,h} G(x) = sum over events of rate * (G(after) - G(before))
    """
    table = event_table(dict(c.counts), c.h, RateSource(kernel), b, literal_generator)
    base = G(c)
    total = 0.0
    for e in np.flatnonzero(table.rates > 0):
        target = dict(c.counts)
        (kind, i, j) = table.key(e)
        if apply_event(target, kind, i, j):
            total += table.rates[e] * (G(Composition._trusted(target, c.h, c.N, c.R)) - base)
    return total
