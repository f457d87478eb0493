"""Partition of a set of entities into disjoint, non-empty clusters."""

from __future__ import annotations

from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np


def _sort_key(item):
    # ints and strings never mix within one partition in practice, but keep
    # the ordering total anyway
    return (type(item).__name__, item)


class Partition:
    """Immutable set-of-sets over hashable entity ids.

    Clusters are stored canonically: members sorted, clusters ordered by
    their first member. Equality is set-of-sets equality.
    """

    __slots__ = ("_clusters", "_assignment")

    def __init__(self, clusters: Iterable[Iterable[Hashable]]):
        canon = []
        seen: dict = {}
        for idx, cluster in enumerate(clusters):
            members = tuple(sorted(set(cluster), key=_sort_key))
            if not members:
                raise ValueError(f"cluster {idx} is empty")
            for m in members:
                if m in seen:
                    raise ValueError(f"entity {m!r} appears in more than one cluster")
                seen[m] = None
            canon.append(members)
        canon.sort(key=lambda c: _sort_key(c[0]))
        self._clusters = tuple(canon)
        self._assignment = {m: i for i, c in enumerate(self._clusters) for m in c}

    @classmethod
    def from_assignment(cls, labels: Sequence[Hashable], assignment: Sequence[int]) -> "Partition":
        """Build from a per-index cluster id; ``labels[i]`` names entity ``i``."""
        if len(labels) != len(assignment):
            raise ValueError("labels and assignment differ in length")
        groups: dict = {}
        for label, cid in zip(labels, assignment):
            groups.setdefault(int(cid), []).append(label)
        return cls(groups.values())

    @classmethod
    def from_mapping(cls, mapping: Mapping[Hashable, Hashable]) -> "Partition":
        groups: dict = {}
        for entity, cid in mapping.items():
            groups.setdefault(cid, []).append(entity)
        return cls(groups.values())

    @property
    def clusters(self) -> tuple:
        return self._clusters

    @property
    def entities(self) -> frozenset:
        return frozenset(self._assignment)

    @property
    def assignment(self) -> dict:
        """entity -> canonical cluster index."""
        return dict(self._assignment)

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self._clusters]

    def cluster_of(self, entity: Hashable) -> int:
        return self._assignment[entity]

    def to_assignment(self, labels: Sequence[Hashable]) -> np.ndarray:
        """Cluster index per position of ``labels``; labels must match the entity set."""
        if len(labels) != len(self._assignment):
            raise ValueError(
                f"partition covers {len(self._assignment)} entities, expected {len(labels)}"
            )
        try:
            return np.fromiter((self._assignment[l] for l in labels), dtype=np.intp, count=len(labels))
        except KeyError as exc:
            raise ValueError(f"entity {exc.args[0]!r} is not covered by the partition") from None

    def __len__(self) -> int:
        return len(self._clusters)

    def __iter__(self):
        return iter(self._clusters)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return self._clusters == other._clusters

    def __hash__(self) -> int:
        return hash(self._clusters)

    def __repr__(self) -> str:
        return f"Partition({[list(c) for c in self._clusters]!r})"
