"""The DSM clustering loop: random auctions with annealed acceptance."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .dsm import Dsm, best_bid, calc_coord_cost
from .partition import Partition

CONVERGED = "converged"
PASS_CAP = "pass_cap"

_EPS = 1e-12


@dataclass(frozen=True)
class DsmcParams:
    powcc: float = 3.0
    powdep: float = 5.0
    powbid: float = 1.0
    times: int = 4
    rand_accept: int = 5
    convergence_threshold: float = 1e-4
    max_stable_passes: int = 2
    seed: int = 0
    # overrides the 10*n safety cap when set
    max_passes: int | None = None

    def __post_init__(self):
        for name in ("powcc", "powdep", "powbid", "convergence_threshold"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        for name in ("times", "rand_accept", "max_stable_passes"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.max_passes is not None and self.max_passes < 1:
            raise ValueError("max_passes must be positive")

    def replace(self, **changes) -> "DsmcParams":
        return dataclasses.replace(self, **changes)


@dataclass
class ClusterRunResult:
    partition: Partition
    final_tcc: float
    passes: int
    moves_attempted: int
    moves_accepted: int
    annealing_accepts: int
    elapsed: float
    status: str = CONVERGED
    cost_eval_seconds: float = 0.0
    num_clusters_trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "clusters": [list(c) for c in self.partition.clusters],
            "final_tcc": self.final_tcc,
            "passes": self.passes,
            "moves_attempted": self.moves_attempted,
            "moves_accepted": self.moves_accepted,
            "annealing_accepts": self.annealing_accepts,
            "elapsed": self.elapsed,
            "status": self.status,
            "cost_eval_seconds": self.cost_eval_seconds,
            "num_clusters": len(self.partition),
        }


@dataclass(frozen=True)
class MoveEvent:
    entity: int
    old: int
    new: int
    tcc_before: float
    tcc_after: float
    accepted: bool
    annealed: bool


def dsmc_cluster(dsm: Dsm, params: DsmcParams | None = None, use_incremental: bool = True,
                 observer: Callable[[MoveEvent, np.ndarray], None] | None = None) -> ClusterRunResult:
    """Cluster ``dsm`` starting from all singletons.

    Each pass runs ``n * times`` auctions on uniformly drawn entities. A move
    to the winning bidder is kept when it does not raise the coordination
    cost, or when a 1-in-``rand_accept`` draw fires; otherwise it is undone.
    The run stops after ``max_stable_passes`` consecutive passes whose
    relative improvement is below ``convergence_threshold``.

    ``observer`` is called after every attempted move with the event and the
    live assignment array (do not mutate it).
    """
    params = params or DsmcParams()
    n = dsm.n
    if n < 1:
        raise ValueError("cannot cluster an empty DSM")
    start = time.perf_counter()
    rng = np.random.default_rng(params.seed)
    sym = dsm.sym
    pc = params.powcc
    times = int(params.times)
    rand_accept = int(params.rand_accept)
    pass_cap = params.max_passes if params.max_passes is not None else 10 * n

    assign = np.arange(n, dtype=np.intp)
    sizes = np.ones(n, dtype=np.intp)
    num_clusters = n
    state = calc_coord_cost(dsm, assign, pc)
    tcc = state.tcc

    attempted = accepted = annealed = 0
    eval_seconds = 0.0
    trace = []
    passes = stable = 0
    status = CONVERGED
    while True:
        passes += 1
        tcc_before = tcc
        picks = rng.integers(0, n, size=n * times)
        for entity in picks.tolist():
            old = int(assign[entity])
            new = best_bid(sym[entity], assign, sizes, old, params.powdep, params.powbid)
            if new == old:
                continue
            attempted += 1
            assign[entity] = new
            sizes[old] -= 1
            sizes[new] += 1

            t0 = time.perf_counter()
            if use_incremental:
                token = state.apply_move(dsm, assign, entity, old, new)
                new_state = state
            else:
                new_state = calc_coord_cost(dsm, assign, pc)
            eval_seconds += time.perf_counter() - t0
            new_tcc = new_state.tcc

            lucky = False
            if new_tcc <= tcc:
                keep = True
            else:
                keep = lucky = int(rng.integers(1, rand_accept + 1)) == 1
                annealed += keep
            tcc_prev = tcc
            if keep:
                accepted += 1
                tcc = new_tcc
                state = new_state
                if sizes[old] == 0:
                    num_clusters -= 1
            else:
                assign[entity] = old
                sizes[old] += 1
                sizes[new] -= 1
                if use_incremental:
                    state.restore(token)
            if observer is not None:
                observer(MoveEvent(entity, old, new, tcc_prev, new_tcc, keep, lucky), assign)
        trace.append(num_clusters)

        improvement = (tcc_before - tcc) / max(tcc_before, _EPS)
        stable = stable + 1 if improvement < params.convergence_threshold else 0
        if stable >= params.max_stable_passes:
            break
        if passes >= pass_cap:
            status = PASS_CAP
            break

    return ClusterRunResult(
        partition=dsm.partition(assign),
        final_tcc=tcc,
        passes=passes,
        moves_attempted=attempted,
        moves_accepted=accepted,
        annealing_accepts=annealed,
        elapsed=time.perf_counter() - start,
        status=status,
        cost_eval_seconds=eval_seconds,
        num_clusters_trace=trace,
    )
