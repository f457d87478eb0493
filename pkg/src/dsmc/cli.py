"""Command-line interface: ``dsmc {cluster,metrics,compare,tune,gen}``.

Exit status is 0 on success, 1 on usage or validation errors and 2 on I/O
failures.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .baselines import KmeansParams, default_k, edge_betweenness_cluster, kmeans_jaccard
from .clustering import DsmcParams, dsmc_cluster
from .dsm import build_dsm
from .graph_io import (
    FORMATS,
    authoritative_partition,
    gen_planted,
    guess_format,
    partition_to_json,
    read_graph,
    read_partition,
    write_graph,
)
from .harness import ALGORITHMS, TUNE_RANGES, SweepSpec, System, compare, sweep
from .metrics import mojo, mojo_sim, ned

log = logging.getLogger("dsmc")

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 1, 2

# config key -> DsmcParams field
_CONFIG_KEYS = {
    "powcc": "powcc",
    "powdep": "powdep",
    "powbid": "powbid",
    "times": "times",
    "rand_accept": "rand_accept",
    "rand-accept": "rand_accept",
    "threshold": "convergence_threshold",
    "convergence_threshold": "convergence_threshold",
    "stable_passes": "max_stable_passes",
    "stable-passes": "max_stable_passes",
    "max_stable_passes": "max_stable_passes",
    "seed": "seed",
}
_INT_FIELDS = {"times", "rand_accept", "max_stable_passes", "seed"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.4f}"
    return str(value)


def load_config(path) -> dict:
    """Parse a ``key = value`` file into DsmcParams keyword arguments."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            name = _CONFIG_KEYS[key]
            try:
                out[name] = int(value) if name in _INT_FIELDS else float(value)
            except ValueError:
                raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}") from None
    return out


def dsmc_params(args) -> DsmcParams:
    """Flags override the config file, which overrides the built-in defaults."""
    values = load_config(args.config) if getattr(args, "config", None) else {}
    flags = {
        "powcc": args.powcc, "powdep": args.powdep, "powbid": args.powbid,
        "times": args.times, "rand_accept": args.rand_accept,
        "convergence_threshold": args.threshold, "max_stable_passes": args.stable_passes,
        "seed": args.seed,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    return DsmcParams(**values)


def _add_common(p, seed=True):
    if seed:
        p.add_argument("--seed", type=int, default=None, help="RNG seed (default 0)")
    p.add_argument("--format", choices=FORMATS, default=None,
                   help="graph format (default: by extension, .json or edge-list)")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--config", default=None, help="key=value file with DSMC defaults")


def _add_dsmc(p):
    g = p.add_argument_group("DSMC parameters")
    g.add_argument("--powcc", type=float)
    g.add_argument("--powbid", type=float)
    g.add_argument("--powdep", type=float)
    g.add_argument("--times", type=int)
    g.add_argument("--rand-accept", dest="rand_accept", type=int)
    g.add_argument("--threshold", type=float, help="relative convergence threshold")
    g.add_argument("--stable-passes", dest="stable_passes", type=int)
    g.add_argument("--no-incremental", action="store_true",
                   help="recompute the full cost after every move (benchmarking)")


def _add_ned(p):
    p.add_argument("--lower", type=int, default=5, help="NED lower size limit")
    p.add_argument("--upper", type=int, default=20, help="NED upper size limit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsmc", description="DSM clustering for architecture module views.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="cluster one graph")
    p.add_argument("graph")
    p.add_argument("--algo", default="dsmc", help=f"one of {', '.join(ALGORITHMS)}")
    p.add_argument("--k", type=int, help="k-medoids cluster count (default 10%% of entities)")
    p.add_argument("--target", type=int, help="edge-betweenness component target (default 10%% of entities)")
    p.add_argument("--stats", help="run statistics JSON path (default <out stem>.stats.json)")
    _add_common(p)
    _add_dsmc(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("metrics", help="score a partition against a reference")
    p.add_argument("partition")
    p.add_argument("--reference", default="packages",
                   help="reference partition file, or 'packages' to derive it from names")
    p.add_argument("--graph", required=True)
    _add_ned(p)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("compare", help="compare algorithms across systems")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--algos", nargs="*", default=["dsmc", "kmeans", "eb"])
    p.add_argument("--external", action="append", default=[], metavar="NAME=TEMPLATE",
                   help="externally produced partitions; {system} expands to the graph file stem")
    p.add_argument("--runs", type=int, default=1, help="seeded runs averaged per system")
    p.add_argument("--jobs", type=int, default=1)
    _add_ned(p)
    _add_common(p)
    _add_dsmc(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("tune", help="one-at-a-time parameter sweep")
    p.add_argument("graphs", nargs="+")
    p.add_argument("--param", required=True, choices=sorted(TUNE_RANGES))
    p.add_argument("--lo", type=float)
    p.add_argument("--hi", type=float)
    p.add_argument("--step", type=float)
    p.add_argument("--runs", type=int, default=50, help="runs per probe value")
    p.add_argument("--jobs", type=int, default=1)
    _add_ned(p)
    _add_common(p)
    _add_dsmc(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("gen", help="generate a planted-partition graph")
    p.add_argument("--modules", type=int, required=True)
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--p-intra", dest="p_intra", type=float, required=True)
    p.add_argument("--p-inter", dest="p_inter", type=float, required=True)
    p.add_argument("--truth", help="truth partition path (default <out stem>.truth.json)")
    _add_common(p)
    p.set_defaults(func=cmd_gen)
    return parser


def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _sidecar(out: str, suffix: str) -> Path:
    p = Path(out)
    return p.with_name(p.name[: -len(p.suffix)] + suffix if p.suffix else p.name + suffix)


def cmd_cluster(args) -> int:
    graph = read_graph(args.graph, args.format)
    n = len(graph)
    if n == 0:
        raise UsageError("graph has no nodes")
    start = time.perf_counter()
    if args.algo == "dsmc":
        params = dsmc_params(args)
        result = dsmc_cluster(build_dsm(graph), params, use_incremental=not args.no_incremental)
        partition = result.partition
        stats = {"algorithm": "dsmc", "params": params.__dict__, **result.to_json()}
        stats.pop("clusters")
    elif args.algo == "kmeans":
        k = args.k if args.k is not None else default_k(n)
        seed = args.seed if args.seed is not None else 0
        partition = kmeans_jaccard(build_dsm(graph), KmeansParams(k=k, seed=seed))
        stats = {"algorithm": "kmeans", "k": k, "seed": seed}
    elif args.algo == "eb":
        target = args.target if args.target is not None else default_k(n)
        partition = edge_betweenness_cluster(graph, target)
        stats = {"algorithm": "eb", "target_clusters": target}
    else:
        raise UsageError(f"unknown algorithm {args.algo!r}; valid choices: {', '.join(ALGORITHMS)}")
    stats.setdefault("elapsed", time.perf_counter() - start)
    stats["num_clusters"] = len(partition)
    _emit(partition_to_json(partition) + "\n", args.out)
    stats_path = args.stats or (_sidecar(args.out, ".stats.json") if args.out else None)
    if stats_path:
        Path(stats_path).write_text(json.dumps(stats, indent=2) + "\n", encoding="utf-8")
    log.info("%s: %d clusters", args.algo, len(partition))
    return EXIT_OK


def _covering(partition, graph, what):
    ids = graph.ids
    known = set(ids)
    for nid in ids:
        if nid not in partition.entities:
            raise UsageError(f"{what}: entity {nid!r} missing")
    for entity in sorted(partition.entities):
        if entity not in known:
            raise UsageError(f"{what}: entity {entity!r} not in graph")


def cmd_metrics(args) -> int:
    graph = read_graph(args.graph, args.format)
    partition = read_partition(args.partition)
    _covering(partition, graph, "partition")
    if args.reference == "packages":
        reference = authoritative_partition(graph)
    else:
        reference = read_partition(args.reference)
        _covering(reference, graph, "reference")
    system, algorithm = Path(args.graph).stem, Path(args.partition).stem
    rows = [
        (system, algorithm, "mojo", mojo(partition, reference)),
        (system, algorithm, "mojo_sim", mojo_sim(partition, reference)),
        (system, algorithm, "ned", ned(partition, args.lower, args.upper)),
    ]
    _emit(_csv(rows, ("system", "algorithm", "metric", "value")), args.out)
    return EXIT_OK


def _load_systems(paths, fmt_):
    systems, seen = [], set()
    for path in paths:
        name = Path(path).stem
        if name in seen:
            raise UsageError(f"duplicate system name {name!r}")
        seen.add(name)
        systems.append(System(name, read_graph(path, fmt_)))
    return systems


def render_comparison(comp) -> str:
    text = _csv(comp.rows, ("system", "algorithm", "metric", "value"))
    above = [(metric, algo, score) for metric, scores in comp.above.items() for algo, score in scores.items()]
    return text + "\n" + _csv(above, ("metric", "algorithm", "above"))


def parse_comparison(text: str):
    """Split ``compare`` output into (long-form rows, above rows)."""
    body, _, above = text.partition("\n\n")
    rows = list(csv.reader(io.StringIO(body)))[1:]
    summary = list(csv.reader(io.StringIO(above)))[1:]
    return rows, summary


def cmd_compare(args) -> int:
    systems = _load_systems(args.graphs, args.format)
    external = {}
    for spec in args.external:
        if "=" not in spec:
            raise UsageError(f"--external expects NAME=TEMPLATE, got {spec!r}")
        name, template = spec.split("=", 1)
        external[name] = {s.name: read_partition(template.format(system=s.name)) for s in systems}
    for a in args.algos:
        if a not in ALGORITHMS:
            raise UsageError(f"unknown algorithm {a!r}; valid choices: {', '.join(ALGORITHMS)}")
    if args.runs < 1:
        raise UsageError("--runs must be positive")
    params = dsmc_params(args)
    seeds = [params.seed + r for r in range(args.runs)]
    try:
        comp = compare(systems, args.algos, seeds, params, external, args.lower, args.upper, args.jobs)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(render_comparison(comp), args.out)
    return EXIT_OK


def cmd_tune(args) -> int:
    systems = _load_systems(args.graphs, args.format)
    params = dsmc_params(args)
    lo, hi, step = TUNE_RANGES[args.param]
    try:
        spec = SweepSpec(
            args.param,
            lo if args.lo is None else args.lo,
            hi if args.hi is None else args.hi,
            step if args.step is None else args.step,
            runs_per_value=args.runs,
            base_params=params,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = sweep(systems, spec, seed=params.seed, lower=args.lower, upper=args.upper, workers=args.jobs)
    rows = [(p, float(v), s, sim, nd) for p, v, s, sim, nd in rows]
    _emit(_csv(rows, ("parameter", "value", "system", "mojo_sim", "ned")), args.out)
    return EXIT_OK


def cmd_gen(args) -> int:
    seed = args.seed if args.seed is not None else 0
    inst = gen_planted(args.modules, args.size, args.p_intra, args.p_inter, seed)
    fmt_ = args.format or (guess_format(args.out) if args.out else "json")
    buf = io.StringIO()
    write_graph(inst.graph, buf, fmt_)
    _emit(buf.getvalue(), args.out)
    truth_path = args.truth or (_sidecar(args.out, ".truth.json") if args.out else None)
    if truth_path:
        Path(truth_path).write_text(partition_to_json(inst.truth) + "\n", encoding="utf-8")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"dsmc {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"dsmc {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
