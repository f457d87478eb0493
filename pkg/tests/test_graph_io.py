import io
import json

import pytest
from hypothesis import given, strategies as st

from dsmc.graph_io import (
    DesignGraph,
    GraphParseError,
    GraphValidationError,
    authoritative_partition,
    gen_planted,
    graph_components,
    parse_graph,
    parse_partition,
    write_graph,
    write_partition,
)
from dsmc.partition import Partition


def test_edge_list_single_edge():
    g = parse_graph(b"node a\nnode b\na b 2\n", "edge-list")
    assert g.ids == ["a", "b"]
    assert g.edges == (("a", "b", 2.0),)


def test_edge_list_parallel_edges_summed():
    g = parse_graph("a b 1\na b 2\n", "edge-list")
    assert g.edges == (("a", "b", 3.0),)


def test_edge_list_self_loop_kept():
    g = parse_graph("a a 1\n", "edge-list")
    assert g.edges == (("a", "a", 1.0),)


def test_edge_list_comments_default_weight_and_names():
    text = "# header\nnode x org.foo.X\n\nx y\n"
    g = parse_graph(text, "edge-list")
    assert g.nodes == (("x", "org.foo.X"), ("y", "y"))
    assert g.edges == (("x", "y", 1.0),)


def test_edge_list_parse_error_has_position():
    with pytest.raises(GraphParseError) as exc:
        parse_graph("a b 1\na b c d\n", "edge-list")
    assert exc.value.line == 2
    with pytest.raises(GraphParseError, match="line 1"):
        parse_graph("a b heavy\n", "edge-list")


def test_negative_weight_rejected():
    with pytest.raises(GraphValidationError):
        parse_graph("a b -1\n", "edge-list")
    with pytest.raises(GraphValidationError):
        parse_graph('{"nodes":[{"id":"a"},{"id":"b"}],"edges":[{"src":"a","dst":"b","w":-2}]}', "json")


def test_json_graph():
    doc = {
        "nodes": [{"id": "a", "name": "p.A"}, {"id": "b"}],
        "edges": [{"src": "a", "dst": "b"}, {"src": "a", "dst": "b", "w": 2.5}],
    }
    g = parse_graph(json.dumps(doc).encode(), "json")
    assert g.nodes == (("a", "p.A"), ("b", "b"))
    assert g.edges == (("a", "b", 3.5),)


def test_json_unknown_node_named():
    doc = '{"nodes":[{"id":"a"}],"edges":[{"src":"a","dst":"ghost"}]}'
    with pytest.raises(GraphValidationError, match="ghost"):
        parse_graph(doc, "json")


def test_json_syntax_error_position():
    with pytest.raises(GraphParseError) as exc:
        parse_graph('{"nodes": [\n  {"id": "a"},,\n]}', "json")
    assert exc.value.line == 2


def test_design_graph_invariants():
    with pytest.raises(GraphValidationError, match="duplicate"):
        DesignGraph(nodes=(("a", "a"), ("a", "a")), edges=())
    with pytest.raises(GraphValidationError, match="unknown"):
        DesignGraph(nodes=(("a", "a"),), edges=(("a", "b", 1.0),))


@pytest.mark.parametrize("fmt", ["json", "edge-list"])
def test_graph_write_round_trip(fmt):
    g = gen_planted(3, 4, 0.5, 0.1, 9).graph
    buf = io.StringIO()
    write_graph(g, buf, fmt)
    assert parse_graph(buf.getvalue(), fmt) == g


def _graph(names):
    return DesignGraph(nodes=tuple((n.rsplit(".", 1)[-1], n) for n in names), edges=())


def test_authoritative_partition_prefix():
    p = authoritative_partition(_graph(["org.foo.A", "org.foo.B", "org.bar.C"]))
    assert p == Partition([["A", "B"], ["C"]])


def test_authoritative_partition_default_package():
    p = authoritative_partition(_graph(["A", "B", "C"]))
    assert p == Partition([["A", "B", "C"]])


def test_authoritative_partition_nested_prefixes_differ():
    assert authoritative_partition(_graph(["a.X", "a.b.Y"])) == Partition([["X"], ["Y"]])


@given(st.lists(st.sampled_from(["p", "p.q", "r", ""]), min_size=1, max_size=12),
       st.lists(st.text("xyz", min_size=1, max_size=3), min_size=12, max_size=12))
def test_authoritative_partition_ignores_final_segment(prefixes, leaves):
    names = [(pre + "." if pre else "") + f"E{i}" for i, pre in enumerate(prefixes)]
    renamed = [(pre + "." if pre else "") + leaves[i] for i, pre in enumerate(prefixes)]
    ids = [f"n{i}" for i in range(len(names))]
    a = authoritative_partition(DesignGraph(tuple(zip(ids, names)), ()))
    b = authoritative_partition(DesignGraph(tuple(zip(ids, renamed)), ()))
    assert a == b


def test_gen_planted_cliques():
    inst = gen_planted(2, 3, 1.0, 0.0, 42)
    assert len(inst.graph) == 6
    assert len(inst.graph.edges) == 2 * 3 * 2
    assert inst.truth == Partition([["m0.e0", "m0.e1", "m0.e2"], ["m1.e0", "m1.e1", "m1.e2"]])
    assert graph_components(inst.graph) == inst.truth


def test_gen_planted_isolated():
    inst = gen_planted(1, 5, 0.0, 0.0, 3)
    assert inst.graph.edges == ()
    assert inst.truth.sizes == [5]


def test_gen_planted_deterministic():
    def dump(seed):
        buf = io.StringIO()
        write_graph(gen_planted(4, 5, 0.4, 0.05, seed).graph, buf)
        return buf.getvalue()
    assert dump(11) == dump(11)
    assert dump(11) != dump(12)


def test_gen_planted_truth_matches_packages():
    inst = gen_planted(3, 4, 0.3, 0.1, 0)
    assert authoritative_partition(inst.graph) == inst.truth


def test_gen_planted_argument_errors():
    with pytest.raises(ValueError):
        gen_planted(0, 3, 0.5, 0.5, 1)
    with pytest.raises(ValueError):
        gen_planted(2, 0, 0.5, 0.5, 1)
    with pytest.raises(ValueError):
        gen_planted(2, 2, 1.5, 0.5, 1)


@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2**32))
def test_complete_planted_components_equal_truth(m, s, seed):
    inst = gen_planted(m, s, 1.0, 0.0, seed)
    assert graph_components(inst.graph) == inst.truth


def test_write_partition_canonical():
    buf = io.BytesIO()
    write_partition(Partition([["c"], ["b", "a"]]), buf)
    assert buf.getvalue() == b'{"clusters":[["a","b"],["c"]]}\n'


def test_write_partition_empty():
    buf = io.StringIO()
    write_partition(Partition([]), buf)
    assert buf.getvalue().strip() == '{"clusters":[]}'
    assert parse_partition(buf.getvalue()) == Partition([])
