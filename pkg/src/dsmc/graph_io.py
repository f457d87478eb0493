"""Reading and writing dependency graphs and partitions.

Two graph formats are understood:

* edge-list: one ``<source> <target> [weight]`` per line, ``#`` comments,
  and ``node <id> [qualified-name]`` declarations.
* JSON: ``{"nodes": [{"id", "name"}], "edges": [{"src", "dst", "w"}]}``.

Partitions are written as ``{"clusters": [[...], ...]}`` in canonical order.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .partition import Partition

FORMATS = ("json", "edge-list")


class GraphParseError(ValueError):
    """Malformed input; carries the 1-based line and column when known."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class GraphValidationError(ValueError):
    pass


@dataclass(frozen=True)
class DesignGraph:
    """Directed weighted dependency graph.

    ``nodes`` is a tuple of ``(id, qualified_name)`` in declaration order and
    ``edges`` a tuple of ``(src, dst, weight)`` with parallel edges merged.
    """

    nodes: tuple
    edges: tuple

    def __post_init__(self):
        ids = [nid for nid, _ in self.nodes]
        known = set(ids)
        if len(known) != len(ids):
            seen = set()
            for nid in ids:
                if nid in seen:
                    raise GraphValidationError(f"duplicate node id {nid!r}")
                seen.add(nid)
        for src, dst, w in self.edges:
            for end in (src, dst):
                if end not in known:
                    raise GraphValidationError(f"edge references unknown node {end!r}")
            if not math.isfinite(w):
                raise GraphValidationError(f"edge {src!r}->{dst!r} has non-finite weight {w!r}")
            if w < 0:
                raise GraphValidationError(f"edge {src!r}->{dst!r} has negative weight {w!r}")

    @property
    def ids(self) -> list[str]:
        return [nid for nid, _ in self.nodes]

    @property
    def names(self) -> dict[str, str]:
        return dict(self.nodes)

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class PlantedInstance:
    graph: DesignGraph
    truth: Partition


class _GraphBuilder:
    def __init__(self):
        self.nodes: dict[str, str] = {}
        self.edges: dict[tuple[str, str], float] = {}

    def declare(self, nid: str, name: str | None = None):
        if nid in self.nodes:
            if name is not None:
                self.nodes[nid] = name
        else:
            self.nodes[nid] = nid if name is None else name

    def add_edge(self, src: str, dst: str, w: float):
        key = (src, dst)
        self.edges[key] = self.edges.get(key, 0.0) + w

    def build(self) -> DesignGraph:
        return DesignGraph(
            nodes=tuple(self.nodes.items()),
            edges=tuple((s, d, w) for (s, d), w in self.edges.items()),
        )


def _as_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        data = bytes(source)
    elif isinstance(source, str):
        return source
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise GraphParseError(f"input is not valid UTF-8 (byte {exc.start})") from None


def _parse_weight(token: str, line: int, column: int) -> float:
    try:
        w = float(token)
    except ValueError:
        raise GraphParseError(f"invalid weight {token!r}", line, column) from None
    if not math.isfinite(w):
        raise GraphValidationError(f"line {line}: non-finite weight {token!r}")
    if w < 0:
        raise GraphValidationError(f"line {line}: negative weight {w!r}")
    return w


def _parse_edge_list(text: str) -> DesignGraph:
    builder = _GraphBuilder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        col = raw.index(tokens[0]) + 1
        if tokens[0] == "node":
            if len(tokens) not in (2, 3):
                raise GraphParseError("expected 'node <id> [qualified-name]'", lineno, col)
            builder.declare(tokens[1], tokens[2] if len(tokens) == 3 else None)
            continue
        if len(tokens) not in (2, 3):
            raise GraphParseError(
                f"expected '<source> <target> [weight]', got {len(tokens)} fields", lineno, col
            )
        w = 1.0
        if len(tokens) == 3:
            w = _parse_weight(tokens[2], lineno, raw.rindex(tokens[2]) + 1)
        builder.declare(tokens[0])
        builder.declare(tokens[1])
        builder.add_edge(tokens[0], tokens[1], w)
    return builder.build()


def _parse_json(text: str) -> DesignGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes", []), list):
        raise GraphParseError("top-level object with a 'nodes' list expected")
    builder = _GraphBuilder()
    for i, node in enumerate(doc.get("nodes", [])):
        if not isinstance(node, dict) or "id" not in node:
            raise GraphParseError(f"nodes[{i}] must be an object with an 'id'")
        nid = str(node["id"])
        if nid in builder.nodes:
            raise GraphValidationError(f"duplicate node id {nid!r}")
        name = node.get("name")
        builder.declare(nid, None if name is None else str(name))
    for i, edge in enumerate(doc.get("edges", [])):
        if not isinstance(edge, dict) or "src" not in edge or "dst" not in edge:
            raise GraphParseError(f"edges[{i}] must be an object with 'src' and 'dst'")
        src, dst = str(edge["src"]), str(edge["dst"])
        for end in (src, dst):
            if end not in builder.nodes:
                raise GraphValidationError(f"edges[{i}] references unknown node {end!r}")
        w = edge.get("w", 1.0)
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise GraphParseError(f"edges[{i}].w must be a number")
        w = float(w)
        if not math.isfinite(w):
            raise GraphValidationError(f"edges[{i}] has non-finite weight")
        if w < 0:
            raise GraphValidationError(f"edges[{i}] has negative weight {w!r}")
        builder.add_edge(src, dst, w)
    return builder.build()


def parse_graph(source: bytes | str | IO, format: str = "json") -> DesignGraph:
    """Parse a graph from bytes, text or a readable stream.

    Parallel edges between the same ordered pair are summed. Self-loops are
    kept here; :func:`dsmc.dsm.build_dsm` drops them.
    """
    text = _as_text(source)
    if format == "json":
        return _parse_json(text)
    if format == "edge-list":
        return _parse_edge_list(text)
    raise ValueError(f"unknown graph format {format!r}; expected one of {FORMATS}")


def guess_format(path: str) -> str:
    return "json" if str(path).lower().endswith(".json") else "edge-list"


def read_graph(path, format: str | None = None) -> DesignGraph:
    with open(path, "rb") as fh:
        return parse_graph(fh, format or guess_format(path))


def _fmt_weight(w: float) -> str:
    return str(int(w)) if float(w).is_integer() else repr(float(w))


def write_graph(graph: DesignGraph, sink: IO, format: str = "json") -> None:
    if format == "json":
        doc = {
            "nodes": [{"id": nid, "name": name} for nid, name in graph.nodes],
            "edges": [
                {"src": s, "dst": d, "w": int(w) if float(w).is_integer() else w}
                for s, d, w in graph.edges
            ],
        }
        _write_text(sink, json.dumps(doc, separators=(",", ":")) + "\n")
    elif format == "edge-list":
        lines = [f"node {nid} {name}" for nid, name in graph.nodes]
        lines += [f"{s} {d} {_fmt_weight(w)}" for s, d, w in graph.edges]
        _write_text(sink, "".join(line + "\n" for line in lines))
    else:
        raise ValueError(f"unknown graph format {format!r}; expected one of {FORMATS}")


def _write_text(sink: IO, text: str) -> None:
    if isinstance(sink, io.TextIOBase):
        sink.write(text)
    else:
        sink.write(text.encode("utf-8"))


def authoritative_partition(graph: DesignGraph) -> Partition:
    """Group entities by package: the qualified name minus its last segment.

    Single-segment names all land in one default-package cluster.
    """
    groups: dict[str, list[str]] = {}
    for nid, name in graph.nodes:
        if not name:
            raise ValueError(f"node {nid!r} has an empty qualified name")
        prefix = name.rsplit(".", 1)[0] if "." in name else ""
        groups.setdefault(prefix, []).append(nid)
    return Partition(groups.values())


def gen_planted(num_modules: int, module_size: int, p_intra: float, p_inter: float, seed: int) -> PlantedInstance:
    """Planted-partition benchmark graph.

    Node ``m<i>.e<j>`` belongs to module ``i``, so the package-derived
    partition coincides with the planted truth. Every ordered pair gets one
    Bernoulli draw for a weight-1 edge.
    """
    if num_modules < 1 or module_size < 1:
        raise ValueError("num_modules and module_size must be positive")
    for p in (p_intra, p_inter):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability {p!r} outside [0, 1]")
    n = num_modules * module_size
    ids = [f"m{i}.e{j}" for i in range(num_modules) for j in range(module_size)]
    module = np.repeat(np.arange(num_modules), module_size)
    rng = np.random.default_rng(seed)
    draws = rng.random((n, n))
    same = module[:, None] == module[None, :]
    prob = np.where(same, p_intra, p_inter)
    hit = draws < prob
    np.fill_diagonal(hit, False)
    src, dst = np.nonzero(hit)
    graph = DesignGraph(
        nodes=tuple((nid, nid) for nid in ids),
        edges=tuple((ids[s], ids[d], 1.0) for s, d in zip(src.tolist(), dst.tolist())),
    )
    truth = Partition(ids[k * module_size:(k + 1) * module_size] for k in range(num_modules))
    return PlantedInstance(graph, truth)


def partition_to_json(partition: Partition) -> str:
    return json.dumps({"clusters": [list(c) for c in partition.clusters]}, separators=(",", ":"))


def write_partition(partition: Partition, sink: IO) -> None:
    _write_text(sink, partition_to_json(partition) + "\n")


def parse_partition(source: bytes | str | IO) -> Partition:
    text = _as_text(source)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, exc.lineno, exc.colno) from None
    clusters = doc.get("clusters") if isinstance(doc, dict) else None
    if not isinstance(clusters, list) or not all(isinstance(c, list) for c in clusters):
        raise GraphParseError("expected {\"clusters\": [[...], ...]}")
    return Partition([str(m) for m in c] for c in clusters)


def read_partition(path) -> Partition:
    with open(path, "rb") as fh:
        return parse_partition(fh)


def graph_components(graph: DesignGraph) -> Partition:
    """Weakly connected components, ignoring direction and weight."""
    parent = {nid: nid for nid in graph.ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s, d, _ in graph.edges:
        rs, rd = find(s), find(d)
        if rs != rd:
            parent[rs] = rd
    groups: dict = {}
    for nid in graph.ids:
        groups.setdefault(find(nid), []).append(nid)
    return Partition(groups.values())


def edges_from_pairs(pairs: Iterable[tuple]) -> DesignGraph:
    """Convenience constructor: ``(src, dst[, w])`` tuples, nodes implied."""
    builder = _GraphBuilder()
    for pair in pairs:
        src, dst = str(pair[0]), str(pair[1])
        w = float(pair[2]) if len(pair) > 2 else 1.0
        builder.declare(src)
        builder.declare(dst)
        builder.add_edge(src, dst, w)
    return builder.build()
