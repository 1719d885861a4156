"""
Enumeration of the finite state space S(h) of the chain: all compositions of N players, i.e. the integer partitions of N.
"""
from collections import Counter
from typing import Iterator, List, Tuple

import numpy as np

from ..exceptions import FragCoagInputException, StateSpaceError
from .composition import Composition

DEFAULT_STATE_CAP = 10000


def _partitions(N: int, largest: int) -> Iterator[Tuple[int, ...]]:
    # Non-increasing parts bounded by `largest`, in ascending lexicographic order
    if N == 0:
        yield ()
        return
    for first in range(1, min(N, largest) + 1):
        for rest in _partitions(N - first, first):
            yield (first,) + rest


def partition_count(N: int) -> int:
    """Number of integer partitions of N (Euler's recurrence)"""
    p = [1] + [0] * N
    for part in range(1, N + 1):
        for total in range(part, N + 1):
            p[total] += p[total - part]
    return p[N]


def enumerate_compositions(N: int, h: float, cap: int = DEFAULT_STATE_CAP) -> List[Composition]:
    """
    List every composition of N players at scale h, in lexicographic order of the non-increasing partition

    Args:
        N (int): Number of players
        h (float): Rescaling parameter
        cap (int, optional): Largest state space accepted. Defaults to 10000.

    Raises:
        StateSpaceError: The number of partitions of N exceeds cap
    """
    if N < 0:
        raise FragCoagInputException("N must be nonnegative, was {}".format(N))
    count = partition_count(N)
    if count > cap:
        raise StateSpaceError("S(h) for N = {} has {} states, more than the cap of {}".format(N, count, cap))
    return [Composition(Counter(parts), h) for parts in _partitions(N, N)]


class StateSpace():
    """
    Enumerated state space S(h) with an index map, used by the dynamic programming oracle and generator matrices.

    Args:
        N (int): Number of players
        h (float, optional): Rescaling parameter. Defaults to 1/N.
        cap (int, optional): Largest state space accepted
    """

    def __init__(self, N: int, h: float = None, cap: int = DEFAULT_STATE_CAP):
        if h is None:
            h = 1.0 / N
        self.N = N
        self.h = h
        self.states = enumerate_compositions(N, h, cap)
        self._index = {c.key(): i for (i, c) in enumerate(self.states)}

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self):
        return iter(self.states)

    def __getitem__(self, i: int) -> Composition:
        return self.states[i]

    def index(self, c) -> int:
        """Index of a composition (or of its key tuple)"""
        key = c.key() if isinstance(c, Composition) else tuple(sorted(dict(c).items()))
        try:
            return self._index[key]
        except KeyError:
            raise StateSpaceError("{} is not a composition of N = {}".format(c, self.N)) from None


def random_composition(N: int, h: float, rng, R: float = None) -> Composition:
    """
    Random composition of N players: cut 1..N at a uniform random subset of the N-1 gaps and count the part sizes
    """
    if N <= 0:
        return Composition({}, h, R)
    cuts = np.flatnonzero(rng.random(N - 1) < rng.uniform()) + 1
    parts = np.diff(np.concatenate(([0], cuts, [N])))
    return Composition(Counter(int(p) for p in parts), h, R)
