"""Comparison clusterers: k-medoids over Jaccard distance and edge betweenness."""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from .dsm import Dsm
from .graph_io import DesignGraph
from .partition import Partition


def default_k(n: int) -> int:
    """Ten percent of the entity count, rounded up, at least one."""
    return max(1, math.ceil(0.10 * n))


@dataclass(frozen=True)
class KmeansParams:
    k: int | None = None
    max_iterations: int = 100
    seed: int = 0


def jaccard_distances(dsm: Dsm) -> np.ndarray:
    """Pairwise Jaccard distance between fan-in/fan-out neighbour sets."""
    feats = (dsm.sym > 0).astype(np.float64)
    inter = feats @ feats.T
    card = feats.sum(axis=1)
    union = card[:, None] + card[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        dist = np.where(union > 0, 1.0 - inter / union, 0.0)
    return dist


def _nearest(dist: np.ndarray, medoids: np.ndarray) -> np.ndarray:
    # argmin returns the first minimum; medoids are sorted, so ties go to the
    # lowest medoid index
    labels = np.argmin(dist[:, medoids], axis=1)
    labels[medoids] = np.arange(medoids.size)
    return labels


def _swap_refine(dist: np.ndarray, medoids: np.ndarray) -> np.ndarray:
    """PAM swap phase: apply the best medoid/non-medoid exchange until none helps."""
    n, k = dist.shape[0], medoids.size
    medoids = medoids.copy()
    cost = dist[:, medoids].min(axis=1).sum()
    while k < n:
        best = (cost, -1, -1)
        outside = np.setdiff1d(np.arange(n), medoids)
        for slot in range(k):
            rest = np.delete(medoids, slot)
            base = dist[:, rest].min(axis=1) if rest.size else np.full(n, np.inf)
            trial = np.minimum(base[:, None], dist[:, outside]).sum(axis=0)
            j = int(np.argmin(trial))
            if trial[j] < best[0] - 1e-12:
                best = (trial[j], slot, int(outside[j]))
        if best[1] < 0:
            break
        cost = best[0]
        medoids[best[1]] = best[2]
        medoids.sort()
    return medoids


def kmeans_jaccard(dsm: Dsm, params: KmeansParams | None = None) -> Partition:
    """k-medoids over Jaccard distance.

    Medoids are seeded uniformly without replacement. Each medoid keeps
    itself; every other entity joins its nearest medoid (lowest index on
    ties). A medoid is then replaced by the member with the least summed
    distance to its co-members (lowest index on ties), until assignments
    settle or ``max_iterations`` is hit. A swap phase then exchanges medoids
    with non-medoids while that lowers the total distance, since the
    alternating step alone stalls in poor local optima.
    """
    params = params or KmeansParams()
    n = dsm.n
    k = default_k(n) if params.k is None else params.k
    if not 1 <= k <= n:
        raise ValueError(f"k={k} must lie in [1, {n}]")
    dist = jaccard_distances(dsm)
    rng = np.random.default_rng(params.seed)
    medoids = np.sort(rng.choice(n, size=k, replace=False))

    labels = None
    for _ in range(params.max_iterations):
        new_labels = _nearest(dist, medoids)
        if labels is not None and np.array_equal(labels, new_labels):
            break
        labels = new_labels
        for c in range(k):
            members = np.flatnonzero(labels == c)
            costs = dist[np.ix_(members, members)].sum(axis=1)
            medoids[c] = members[np.argmin(costs)]
        order = np.argsort(medoids)
        medoids = medoids[order]
        # keep cluster slots aligned with the re-sorted medoids
        labels = np.argsort(order)[labels]
    medoids = _swap_refine(dist, medoids)
    return dsm.partition(_nearest(dist, medoids))


def _edge_key(u: str, v: str) -> tuple:
    return (u, v) if u <= v else (v, u)


def edge_betweenness_cluster(graph: DesignGraph, target_clusters: int | None = None) -> Partition:
    """Girvan-Newman divisive clustering down to ``target_clusters`` components.

    Direction and weights are ignored. The edge with the highest betweenness
    is removed (ties go to the lexicographically smallest endpoint pair) and
    betweenness is recomputed after every removal.
    """
    n = len(graph)
    target = default_k(n) if target_clusters is None else target_clusters
    if not 1 <= target <= max(n, 1):
        raise ValueError(f"target of {target} clusters exceeds {n} nodes")
    g = nx.Graph()
    g.add_nodes_from(graph.ids)
    g.add_edges_from((s, d) for s, d, _ in graph.edges if s != d)

    while nx.number_connected_components(g) < target:
        scores = nx.edge_betweenness_centrality(g, normalized=False)
        top = max(scores.values())
        # betweenness is a sum of path fractions; treat float noise as a tie
        tol = 1e-9 * max(1.0, top)
        candidates = [_edge_key(u, v) for (u, v), s in scores.items() if s >= top - tol]
        g.remove_edge(*min(candidates))
    return Partition(nx.connected_components(g))
