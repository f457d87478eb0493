"""Clustering quality measures: MoJo, MoJoSim, NED and the Above ranking."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .partition import Partition

NED_LOWER = 5
NED_UPPER = 20

BRUTE_FORCE_MAX_CLUSTERS = 8


@dataclass(frozen=True)
class MetricSeries:
    name: str
    values: tuple

    def __init__(self, name: str, values: Sequence[float]):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "values", tuple(float(v) for v in values))

    def __len__(self) -> int:
        return len(self.values)


def _check_same_entities(a: Partition, b: Partition) -> None:
    if a.entities != b.entities:
        diff = sorted(a.entities ^ b.entities, key=str)
        raise ValueError(f"partitions cover different entities; first mismatch: {diff[0]!r}")
    if not a.entities:
        raise ValueError("partitions are empty")


def _overlap(a: Partition, b: Partition) -> np.ndarray:
    where = b.assignment
    table = np.zeros((len(a), len(b)), dtype=np.int64)
    for i, cluster in enumerate(a.clusters):
        for entity in cluster:
            table[i, where[entity]] += 1
    return table


def mojo(a: Partition, b: Partition) -> int:
    """Minimum number of moves plus joins turning ``a`` into ``b``.

    Every cluster of ``a`` is tagged with one cluster of ``b``; members
    outside their cluster's tag are moved, and clusters sharing a tag are
    joined. Tagging each cluster with a best-overlap target is always
    optimal (deviating loses at least one overlap and gains at most one
    group), so the exact answer is the sum of row maxima plus the largest
    set of distinct tags reachable through a matching on tied maxima.
    """
    _check_same_entities(a, b)
    table = _overlap(a, b)
    n = int(table.sum())
    best = table.max(axis=1)
    ties = (table == best[:, None]).astype(np.int64)
    rows, cols = linear_sum_assignment(ties, maximize=True)
    groups = int(ties[rows, cols].sum())
    return (n - int(best.sum())) + (len(a) - groups)


def mojo_brute_force(a: Partition, b: Partition) -> int:
    """Exhaustive MoJo over every tag assignment; small inputs only."""
    _check_same_entities(a, b)
    if len(a) > BRUTE_FORCE_MAX_CLUSTERS or len(b) > BRUTE_FORCE_MAX_CLUSTERS:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_MAX_CLUSTERS} clusters per side, "
            f"got {len(a)} and {len(b)}"
        )
    table = _overlap(a, b).tolist()
    n = sum(map(sum, table))
    best = None
    for tags in itertools.product(range(len(b)), repeat=len(a)):
        kept = sum(row[t] for row, t in zip(table, tags))
        cost = (n - kept) + (len(a) - len(set(tags)))
        if best is None or cost < best:
            best = cost
    return best


def mojo_sim(a: Partition, b: Partition) -> float:
    return 1.0 - mojo(a, b) / len(a.entities)


def ned(partition: Partition, lower: int = NED_LOWER, upper: int = NED_UPPER) -> float:
    """Share of entities living in clusters of size within [lower, upper]."""
    if lower < 1 or lower > upper:
        raise ValueError(f"invalid NED bounds ({lower}, {upper})")
    sizes = partition.sizes
    if not sizes:
        raise ValueError("NED of an empty partition")
    return sum(s for s in sizes if lower <= s <= upper) / sum(sizes)


def _values(series) -> tuple:
    return series.values if isinstance(series, MetricSeries) else tuple(series)


def above_pair(ds_i, ds_j) -> float:
    """Fraction of positions where ``ds_i`` is strictly greater than ``ds_j``."""
    x, y = _values(ds_i), _values(ds_j)
    if len(x) != len(y):
        raise ValueError(f"series lengths differ: {len(x)} vs {len(y)}")
    if not x:
        raise ValueError("series are empty")
    return sum(1 for u, v in zip(x, y) if u > v) / len(x)


def above_all(series: Sequence[MetricSeries]) -> dict[str, float]:
    if len(series) < 2:
        raise ValueError("Above ranking needs at least two series")
    return {
        s.name: sum(above_pair(s, other) for other in series if other is not s)
        for s in series
    }
