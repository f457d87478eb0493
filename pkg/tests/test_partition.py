import pytest
from hypothesis import given, strategies as st

from dsmc.graph_io import parse_partition, partition_to_json
from dsmc.partition import Partition


def test_canonical_order():
    p = Partition([["c"], ["b", "a"]])
    assert p.clusters == (("a", "b"), ("c",))
    assert p.sizes == [2, 1]


def test_equality_is_set_of_sets():
    assert Partition([[1, 2], [3]]) == Partition([[3], [2, 1]])
    assert Partition([[1, 2], [3]]) != Partition([[1], [2, 3]])


def test_rejects_overlap_and_empty():
    with pytest.raises(ValueError, match="more than one"):
        Partition([["a"], ["a", "b"]])
    with pytest.raises(ValueError, match="empty"):
        Partition([["a"], []])


def test_assignment_round_trip():
    labels = ["x", "y", "z", "w"]
    p = Partition.from_assignment(labels, [7, 3, 7, 3])
    assert p == Partition([["x", "z"], ["y", "w"]])
    a = p.to_assignment(labels)
    assert Partition.from_assignment(labels, a) == p


def test_to_assignment_detects_uncovered():
    with pytest.raises(ValueError, match="'q'"):
        Partition([["a", "b"]]).to_assignment(["a", "q"])


@given(st.lists(st.integers(0, 5), min_size=1, max_size=30))
def test_json_round_trip(cluster_ids):
    labels = [f"e{i}" for i in range(len(cluster_ids))]
    p = Partition.from_assignment(labels, cluster_ids)
    assert parse_partition(partition_to_json(p)) == p
