"""Multi-system evaluation: algorithm comparison and one-at-a-time parameter sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .baselines import KmeansParams, edge_betweenness_cluster, kmeans_jaccard
from .clustering import DsmcParams, dsmc_cluster
from .dsm import build_dsm
from .graph_io import DesignGraph, authoritative_partition
from .metrics import MetricSeries, above_all, mojo_sim, ned
from .partition import Partition

ALGORITHMS = ("dsmc", "kmeans", "eb")

# parameter -> (range low, range high, increment), one row per tuned knob
TUNE_RANGES = {
    "powbid": (0.0, 5.0, 0.5),
    "powdep": (1.0, 9.0, 2.0),
    "powcc": (0.0, 5.0, 0.5),
    "times": (1.0, 10.0, 1.0),
    "rand_accept": (5.0, 50.0, 5.0),
}
INTEGER_PARAMS = ("times", "rand_accept")
DEFAULT_RUNS = 50


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    range_lo: float
    range_hi: float
    increment: float
    runs_per_value: int = DEFAULT_RUNS
    base_params: DsmcParams = field(default_factory=DsmcParams)

    @classmethod
    def default(cls, parameter: str, **overrides) -> "SweepSpec":
        if parameter not in TUNE_RANGES:
            raise ValueError(f"unknown parameter {parameter!r}; choose from {sorted(TUNE_RANGES)}")
        lo, hi, inc = TUNE_RANGES[parameter]
        return cls(parameter, lo, hi, inc, **overrides)

    def __post_init__(self):
        if self.parameter not in TUNE_RANGES:
            raise ValueError(f"unknown parameter {self.parameter!r}; choose from {sorted(TUNE_RANGES)}")
        if self.increment <= 0:
            raise ValueError("increment must be positive")
        if self.range_lo > self.range_hi:
            raise ValueError("range_lo exceeds range_hi")
        steps = (self.range_hi - self.range_lo) / self.increment
        if abs(steps - round(steps)) > 1e-9:
            raise ValueError("range width is not a whole number of increments")
        if self.runs_per_value < 1:
            raise ValueError("runs_per_value must be positive")

    def values(self) -> list[float]:
        steps = round((self.range_hi - self.range_lo) / self.increment)
        return [round(self.range_lo + i * self.increment, 12) for i in range(steps + 1)]


@dataclass(frozen=True)
class System:
    name: str
    graph: DesignGraph


def _mean(xs: Sequence[float]) -> float:
    return math.fsum(xs) / len(xs)


def run_algorithm(algorithm: str, graph: DesignGraph, seed: int, params: DsmcParams | None = None,
                  k: int | None = None, target: int | None = None) -> Partition:
    if algorithm == "dsmc":
        params = (params or DsmcParams()).replace(seed=seed)
        return dsmc_cluster(build_dsm(graph), params).partition
    if algorithm == "kmeans":
        return kmeans_jaccard(build_dsm(graph), KmeansParams(k=k, seed=seed))
    if algorithm == "eb":
        return edge_betweenness_cluster(graph, target)
    raise ValueError(f"unknown algorithm {algorithm!r}; valid choices: {', '.join(ALGORITHMS)}")


def _check_covers(partition: Partition, graph: DesignGraph, what: str) -> None:
    ids = set(graph.ids)
    if partition.entities != ids:
        extra = sorted(partition.entities - ids)
        missing = sorted(ids - partition.entities)
        if missing:
            raise ValueError(f"{what}: entity {missing[0]!r} missing from partition")
        raise ValueError(f"{what}: entity {extra[0]!r} is not in the graph")


def _score(partition: Partition, reference: Partition, lower: int, upper: int) -> tuple[float, float]:
    return mojo_sim(partition, reference), ned(partition, lower, upper)


def _compare_job(job):
    system, algorithm, seeds, params, lower, upper = job
    reference = authoritative_partition(system.graph)
    # edge betweenness has no randomness; one run stands for all seeds
    run_seeds = seeds[:1] if algorithm == "eb" else seeds
    scores = [
        _score(run_algorithm(algorithm, system.graph, s, params), reference, lower, upper)
        for s in run_seeds
    ]
    return _mean([m for m, _ in scores]), _mean([x for _, x in scores])


def _map(fn: Callable, jobs: list, workers: int) -> list:
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


@dataclass
class Comparison:
    rows: list  # (system, algorithm, metric, value)
    above: dict  # metric -> {algorithm: score}

    def series(self, metric: str) -> list[MetricSeries]:
        algos: dict[str, list[float]] = {}
        for system, algorithm, m, value in self.rows:
            if m == metric:
                algos.setdefault(algorithm, []).append(value)
        return [MetricSeries(a, v) for a, v in algos.items()]


def compare(systems: Sequence[System], algorithms: Sequence[str], seeds: Sequence[int],
            params: DsmcParams | None = None, external: dict | None = None,
            lower: int = 5, upper: int = 20, workers: int = 1) -> Comparison:
    """Average MoJoSim-vs-packages and NED per (system, algorithm), then rank
    algorithms with Above over the per-system series.

    ``external`` maps an algorithm name to ``{system name: Partition}`` for
    clusterers run outside this toolkit.
    """
    external = external or {}
    names = list(algorithms) + [a for a in external if a not in algorithms]
    if len(names) < 2:
        raise ValueError("comparison needs at least two algorithms")
    if not systems:
        raise ValueError("comparison needs at least one system")
    if not seeds:
        raise ValueError("comparison needs at least one seed")
    for a in algorithms:
        if a not in ALGORITHMS and a not in external:
            raise ValueError(f"unknown algorithm {a!r}; valid choices: {', '.join(ALGORITHMS)}")

    jobs, slots = [], []
    for system in systems:
        for algorithm in names:
            if algorithm in external:
                continue
            jobs.append((system, algorithm, list(seeds), params, lower, upper))
            slots.append((system.name, algorithm))
    results = dict(zip(slots, _map(_compare_job, jobs, workers)))

    rows = []
    for system in systems:
        reference = authoritative_partition(system.graph)
        for algorithm in names:
            if algorithm in external:
                try:
                    part = external[algorithm][system.name]
                except KeyError:
                    raise ValueError(f"no {algorithm!r} partition supplied for system {system.name!r}") from None
                _check_covers(part, system.graph, f"{algorithm} on {system.name}")
                sim, nd = _score(part, reference, lower, upper)
            else:
                sim, nd = results[(system.name, algorithm)]
            rows.append((system.name, algorithm, "mojo_sim", sim))
            rows.append((system.name, algorithm, "ned", nd))
    comp = Comparison(rows, {})
    for metric in ("mojo_sim", "ned"):
        comp.above[metric] = above_all(comp.series(metric))
    return comp


def _tune_job(job):
    system, params, seeds, lower, upper = job
    reference = authoritative_partition(system.graph)
    dsm = build_dsm(system.graph)
    sims, neds = [], []
    for s in seeds:
        part = dsmc_cluster(dsm, params.replace(seed=s)).partition
        sims.append(mojo_sim(part, reference))
        neds.append(ned(part, lower, upper))
    return _mean(sims), _mean(neds)


def sweep(systems: Sequence[System], spec: SweepSpec, seed: int = 0,
          lower: int = 5, upper: int = 20, workers: int = 1) -> list[tuple]:
    """One-at-a-time tuning: rows ``(parameter, value, system, mean mojo_sim, mean ned)``.

    Run ``r`` of every probe uses seed ``seed + r``.
    """
    seeds = [seed + r for r in range(spec.runs_per_value)]
    jobs, keys = [], []
    for value in spec.values():
        v = int(round(value)) if spec.parameter in INTEGER_PARAMS else float(value)
        params = spec.base_params.replace(**{spec.parameter: v})
        for system in systems:
            jobs.append((system, params, seeds, lower, upper))
            keys.append((value, system.name))
    out = _map(_tune_job, jobs, workers)
    return [(spec.parameter, value, name, sim, nd) for (value, name), (sim, nd) in zip(keys, out)]
