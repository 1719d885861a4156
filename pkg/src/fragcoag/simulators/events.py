"""
Event enumeration for the merging/splitting chain, shared by the simulator, the generator matrix and the couplings.

Events are keyed by (kind, i, j):
    merge (i, j): ordered pair of coalitions of sizes i and j merges, n -> n - e_i - e_j + e_{i+j}, at rate h*C_ij*n_i*n_j
    split (i, j): a coalition of size i splits into j and i - j (1 <= j < i), n -> n - e_i + e_j + e_{i-j}, at rate F_ij*n_i

For i = j the merge weight is n_i*(n_i - 1) (a coalition cannot merge with itself). With `literal_generator` the weight is n_i**2; a drawn self-merge with n_i = 1 then leaves the state unchanged.
"""
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from ..kernels import RateKernel, StateView, control_value

MERGE = 'merge'
SPLIT = 'split'


@dataclass(frozen=True)
class EventLogEntry:
    """
    One jump of the chain: time, kind ('merge' or 'split'), sizes (i, j) and the number of coalitions before the event
    """
    time: float
    kind: str
    i: int
    j: int
    coalitions_before: int

    @property
    def key(self) -> Tuple[str, int, int]:
        return (self.kind, self.i, self.j)

    def to_json(self) -> dict:
        return {'time': self.time, 'kind': self.kind, 'i': self.i, 'j': self.j, 'coalitions_before': self.coalitions_before}


class RateSource():
    """
    Kernel evaluation for the chain. For kernels that do not depend on x, merge matrices and split rows are cached per control value.

    Cached and uncached evaluation give bit-identical rates: the kernels are evaluated elementwise and the cache only stores those elements.

    Args:
        kernel (RateKernel): Rate kernel
        cache (bool, optional): Enable caching for state-independent kernels. Defaults to True.
    """

    def __init__(self, kernel: RateKernel, cache: bool = True):
        self.kernel = kernel
        self.cache = cache and not kernel.state_dependent
        self._coag = {}
        self._frag = {}

    def coagulation(self, sizes: np.ndarray, view: StateView, b: float) -> np.ndarray:
        if not self.cache:
            return np.asarray(self.kernel.coagulation(sizes[:, None], sizes[None, :], view, b), dtype=float).reshape(len(sizes), len(sizes))
        K = int(sizes[-1])
        full = self._coag.get(b)
        if full is None or full.shape[0] < K:
            full = self.kernel.coagulation_matrix(view, b, max(K, 2 * (full.shape[0] if full is not None else 1)))
            self._coag[b] = full
        idx = sizes - 1
        return full[np.ix_(idx, idx)]

    def fragmentation_row(self, i: int, view: StateView, b: float) -> np.ndarray:
        if not self.cache:
            return self.kernel.fragmentation_row(i, view, b)
        rows = self._frag.setdefault(b, {})
        row = rows.get(i)
        if row is None:
            row = self.kernel.fragmentation_row(i, view, b)
            rows[i] = row
        return row


@dataclass
class EventTable:
    """
    Enabled events of one state: parallel arrays of kinds (0 merge, 1 split), sizes i, j and rates
    """
    kinds: np.ndarray
    i: np.ndarray
    j: np.ndarray
    rates: np.ndarray

    @property
    def total(self) -> float:
        return float(self.rates.sum())

    def key(self, e: int) -> Tuple[str, int, int]:
        return (MERGE if self.kinds[e] == 0 else SPLIT, int(self.i[e]), int(self.j[e]))

    def as_dict(self) -> Dict[Tuple[str, int, int], float]:
        """Event key -> rate, positive rates only"""
        return {self.key(e): float(self.rates[e]) for e in range(len(self.rates)) if self.rates[e] > 0}


def event_table(counts: Dict[int, int], h: float, source: RateSource, b, literal_generator: bool = False) -> EventTable:
    """
    All events of the state n = counts with their rates, merges first (row-major over occupied sizes) then splits

    Args:
        counts (dict[int, int]): Composition n (positive counts)
        h (float): Rescaling parameter
        source (RateSource): Kernel evaluation
        b: Control value
        literal_generator (bool, optional): Use n_i**2 for self-pairs. Defaults to False.
    """
    b = control_value(b)
    if not counts:
        empty = np.zeros(0)
        return EventTable(np.zeros(0, dtype=int), np.zeros(0, dtype=int), np.zeros(0, dtype=int), empty)
    sizes = np.fromiter(sorted(counts), dtype=int)
    n = np.array([counts[k] for k in sizes], dtype=float)
    view = StateView.from_counts(counts, h)
    r = len(sizes)

    pair = np.outer(n, n)
    if not literal_generator:
        pair[np.diag_indices(r)] = n * (n - 1)
    merge_rates = (h * source.coagulation(sizes, view, b) * pair).ravel()
    merge_i = np.repeat(sizes, r)
    merge_j = np.tile(sizes, r)

    rates = [merge_rates]
    rows_i = [merge_i]
    rows_j = [merge_j]
    for (idx, i) in enumerate(sizes):
        if i < 2:
            continue
        rates.append(source.fragmentation_row(int(i), view, b) * n[idx])
        rows_i.append(np.full(i - 1, i))
        rows_j.append(np.arange(1, i))
    kinds = np.concatenate([np.zeros(r * r, dtype=int)] + [np.ones(len(a), dtype=int) for a in rows_i[1:]])
    return EventTable(kinds, np.concatenate(rows_i), np.concatenate(rows_j), np.concatenate(rates))


def apply_event(counts: Dict[int, int], kind: str, i: int, j: int) -> bool:
    """
    Apply an event to a mutable counts map in place. Returns False (and leaves counts unchanged) for a self-merge of a lone coalition.
    """
    if kind == MERGE:
        if counts.get(i, 0) < (2 if i == j else 1) or counts.get(j, 0) < 1:
            return False
        _add(counts, i, -1)
        _add(counts, j, -1)
        _add(counts, i + j, 1)
    else:
        _add(counts, i, -1)
        _add(counts, j, 1)
        _add(counts, i - j, 1)
    return True


def _add(counts: Dict[int, int], k: int, delta: int):
    value = counts.get(k, 0) + delta
    if value:
        counts[k] = value
    else:
        del counts[k]


def sample_event(table: EventTable, u: float) -> int:
    """Index of the event selected by u in [0, total)"""
    cumulative = np.cumsum(table.rates)
    e = int(np.searchsorted(cumulative, u, side='right'))
    if e >= len(cumulative):
        # u at the top end after rounding
        e = int(np.flatnonzero(table.rates)[-1])
    return e


def event_rates(c, kernel: RateKernel, b, literal_generator: bool = False) -> Dict[Tuple[str, int, int], float]:
    """
    Enabled events of a composition with their rates

    Example:
        event_rates(Composition({1: 2}, h=1), constant_example_kernel(), 1.0)  # {('merge', 1, 1): 2.0}
    """
    return event_table(dict(c.counts), c.h, RateSource(kernel), b, literal_generator).as_dict()
