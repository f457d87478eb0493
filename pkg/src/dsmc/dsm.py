"""Design structure matrix, coordination cost and bid auction.

The coordination cost of a clustering sums, over every unordered pair of
entities, the pair's two-way interaction ``w[j,k] + w[k,j]`` scaled by
``size(module) ** powcc`` when both sit in the same module and by
``n ** powcc`` otherwise.

All arithmetic runs in float64. For integer weights every intermediate value
is an integer below 2**53, so the full and incremental paths agree bit for
bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .graph_io import DesignGraph
from .partition import Partition


class Dsm:
    """Square non-negative interaction matrix with entity labels.

    ``weights[i, j]`` is the interaction from entity ``i`` to entity ``j``;
    the diagonal is always zero.
    """

    __slots__ = ("weights", "labels", "sym", "_index")

    def __init__(self, weights, labels: Sequence[str] | None = None):
        w = np.array(weights, dtype=np.float64, copy=True)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"DSM must be square, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ValueError("DSM weights must be finite")
        if np.any(w < 0):
            raise ValueError("DSM weights must be non-negative")
        np.fill_diagonal(w, 0.0)
        n = w.shape[0]
        if labels is None:
            labels = [str(i) for i in range(n)]
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError(f"{len(labels)} labels for a DSM of size {n}")
        if len(set(labels)) != n:
            raise ValueError("DSM labels must be unique")
        w.setflags(write=False)
        self.weights = w
        self.labels = labels
        # two-way pair interaction; every cost and bid only needs this
        self.sym = w + w.T
        self.sym.setflags(write=False)
        self._index = {label: i for i, label in enumerate(labels)}

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def index(self, label: str) -> int:
        return self._index[label]

    @property
    def total_raw(self) -> float:
        return 0.5 * math.fsum(self.sym.sum(axis=1))

    def partition(self, assignment: Sequence[int]) -> Partition:
        return Partition.from_assignment(self.labels, assignment)

    def __repr__(self) -> str:
        return f"Dsm(n={self.n})"


def build_dsm(graph: DesignGraph) -> Dsm:
    """Dense DSM in node-declaration order; self-loops are dropped."""
    ids = graph.ids
    index = {nid: i for i, nid in enumerate(ids)}
    w = np.zeros((len(ids), len(ids)))
    for src, dst, weight in graph.edges:
        w[index[src], index[dst]] += weight
    return Dsm(w, ids)


def _assignment(dsm: Dsm, partition) -> np.ndarray:
    if isinstance(partition, Partition):
        return partition.to_assignment(dsm.labels)
    assign = np.asarray(partition, dtype=np.intp)
    if assign.shape != (dsm.n,):
        raise ValueError(f"assignment of shape {assign.shape} does not match a DSM of size {dsm.n}")
    return assign


def _spow(base, exponent: float) -> float:
    return float(base) ** exponent


@dataclass
class CostState:
    """Decomposed coordination cost of one clustering.

    ``module_raw[m]`` is the summed two-way interaction over unordered pairs
    inside module ``m``; ``internal_raw`` is the sum of those, and
    ``total_raw`` the same sum over all pairs of the DSM.
    """

    intra_cost: float
    extra_cost: float
    module_raw: dict = field(default_factory=dict)
    total_raw: float = 0.0
    internal_raw: float = 0.0
    n: int = 0
    powcc: float = 1.0

    @property
    def tcc(self) -> float:
        return self.intra_cost + self.extra_cost

    def copy(self) -> "CostState":
        return CostState(
            self.intra_cost, self.extra_cost, dict(self.module_raw),
            self.total_raw, self.internal_raw, self.n, self.powcc,
        )

    def apply_move(self, dsm: Dsm, assignment: np.ndarray, entity: int, old: int, new: int) -> tuple:
        """Update in place for ``entity`` having moved from ``old`` to ``new``.

        ``assignment`` must already reflect the move. Runs in O(n) and
        returns a token for :meth:`restore`.
        """
        if old == new:
            raise ValueError("old and new cluster are the same")
        if assignment[entity] != new:
            raise ValueError(f"entity {entity} is not in cluster {new}; apply the move first")
        row = dsm.sym[entity]
        in_old = assignment == old
        in_new = assignment == new
        s_old = int(np.count_nonzero(in_old)) + 1
        s_new = int(np.count_nonzero(in_new)) - 1
        # row[entity] is 0, so the entity itself adds nothing to r_new
        r_old = float(row[in_old].sum())
        r_new = float(row[in_new].sum())

        w_old = self.module_raw.get(old)
        w_new = self.module_raw.get(new)
        token = (self.intra_cost, self.extra_cost, self.internal_raw, old, w_old, new, w_new)
        w_old = w_old or 0.0
        w_new = w_new or 0.0
        w_old2 = w_old - r_old
        w_new2 = w_new + r_new
        pc = self.powcc

        intra = self.intra_cost
        intra -= w_old * _spow(s_old, pc)
        if s_old > 1:
            intra += w_old2 * _spow(s_old - 1, pc)
        intra -= w_new * _spow(s_new, pc)
        intra += w_new2 * _spow(s_new + 1, pc)
        self.intra_cost = intra
        self.internal_raw = self.internal_raw - r_old + r_new
        self.extra_cost = (self.total_raw - self.internal_raw) * _spow(self.n, pc)
        if s_old > 1:
            self.module_raw[old] = w_old2
        else:
            self.module_raw.pop(old, None)
        self.module_raw[new] = w_new2
        return token

    def restore(self, token: tuple) -> None:
        self.intra_cost, self.extra_cost, self.internal_raw, old, w_old, new, w_new = token
        for cid, w in ((old, w_old), (new, w_new)):
            if w is None:
                self.module_raw.pop(cid, None)
            else:
                self.module_raw[cid] = w


def calc_coord_cost(dsm: Dsm, partition, powcc: float) -> CostState:
    """Full O(n^2) coordination cost of ``partition`` (a Partition or an
    integer cluster id per DSM index)."""
    assign = _assignment(dsm, partition)
    n = dsm.n
    if n == 0:
        return CostState(0.0, 0.0, {}, 0.0, 0.0, 0, powcc)
    same = assign[:, None] == assign[None, :]
    # per-entity interaction with its own module; each internal pair shows
    # up twice across these row sums
    inner_rows = np.where(same, dsm.sym, 0.0).sum(axis=1)
    order = np.argsort(assign, kind="stable")
    ids, starts, counts = np.unique(assign[order], return_index=True, return_counts=True)
    sorted_rows = inner_rows[order]
    module_raw = {}
    intra_terms = []
    for cid, start, size in zip(ids.tolist(), starts.tolist(), counts.tolist()):
        w = 0.5 * math.fsum(sorted_rows[start:start + size])
        module_raw[cid] = w
        intra_terms.append(w * _spow(size, powcc))
    total_raw = 0.5 * math.fsum(dsm.sym.sum(axis=1))
    internal_raw = math.fsum(module_raw.values())
    intra = math.fsum(intra_terms)
    extra = (total_raw - internal_raw) * _spow(n, powcc)
    return CostState(intra, extra, module_raw, total_raw, internal_raw, n, powcc)


def update_tcc(state: CostState, dsm: Dsm, partition, entity: int, old: int, new: int) -> CostState:
    """Exact cost after one move, in O(n).

    ``state`` describes the clustering before the move and ``partition`` the
    clustering after it; ``state`` itself is left untouched.
    """
    assign = _assignment(dsm, partition)
    out = state.copy()
    out.apply_move(dsm, assign, entity, old, new)
    return out


def _bids(row: np.ndarray, assign: np.ndarray, sizes: np.ndarray, powdep: float, powbid: float):
    sums = np.bincount(assign, weights=row, minlength=sizes.shape[0])
    live = np.flatnonzero(sums > 0)
    # zero interaction never bids, including 0 ** 0
    bids = sums[live] ** powdep / sizes[live].astype(np.float64) ** powbid
    return live, bids


def best_bid(row: np.ndarray, assign: np.ndarray, sizes: np.ndarray, current: int,
             powdep: float, powbid: float) -> int:
    """Winning cluster id given precomputed cluster sizes (indexed by id)."""
    live, bids = _bids(row, assign, sizes, powdep, powbid)
    if live.size == 0:
        return current
    top = bids.max()
    if top <= 0:
        return current
    pos = np.searchsorted(live, current)
    if pos < live.size and live[pos] == current and bids[pos] == top:
        return current
    return int(live[np.argmax(bids)])


def bid_auction(dsm: Dsm, partition, entity: int, powdep: float, powbid: float) -> int:
    """Cluster id whose bid for ``entity`` is highest.

    Ties go to the entity's current cluster, then to the lowest cluster id.
    With a Partition argument, cluster ids are its canonical indices.
    """
    assign = _assignment(dsm, partition)
    if not 0 <= entity < dsm.n:
        raise IndexError(f"entity index {entity} out of range")
    sizes = np.bincount(assign)
    return best_bid(dsm.sym[entity], assign, sizes, int(assign[entity]), powdep, powbid)


def module_bids(dsm: Dsm, partition, entity: int, powdep: float, powbid: float) -> dict:
    """Bid of every cluster for ``entity``; clusters without interaction bid 0."""
    assign = _assignment(dsm, partition)
    sizes = np.bincount(assign)
    live, bids = _bids(dsm.sym[entity], assign, sizes, powdep, powbid)
    out = {int(c): 0.0 for c in np.flatnonzero(sizes)}
    out.update(zip(live.tolist(), bids.tolist()))
    return out
