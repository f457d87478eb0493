import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dsmc.clustering import CONVERGED, PASS_CAP, DsmcParams, dsmc_cluster
from dsmc.dsm import Dsm, build_dsm, calc_coord_cost
from dsmc.graph_io import gen_planted
from dsmc.metrics import mojo_sim

from conftest import random_int_dsm, random_real_dsm


def test_default_params():
    p = DsmcParams()
    assert (p.powbid, p.powdep, p.powcc, p.times, p.rand_accept) == (1, 5, 3, 4, 5)
    assert p.convergence_threshold == 1e-4
    assert p.max_stable_passes == 2


@pytest.mark.parametrize("bad", [{"times": 0}, {"rand_accept": 0}, {"powcc": -1}, {"times": 1.5}])
def test_param_validation(bad):
    with pytest.raises(ValueError):
        DsmcParams(**bad)


def test_recovers_two_cliques():
    hits = 0
    for seed in range(20):
        inst = gen_planted(2, 5, 1.0, 0.0, seed)
        result = dsmc_cluster(build_dsm(inst.graph), DsmcParams(seed=seed))
        hits += mojo_sim(result.partition, inst.truth) == 1.0
    assert hits >= 18


def test_edgeless_stays_singletons():
    result = dsmc_cluster(Dsm(np.zeros((5, 5))), DsmcParams(seed=3))
    assert result.partition.sizes == [1] * 5
    assert result.final_tcc == 0
    assert result.moves_attempted == 0
    assert result.status == CONVERGED


def test_single_entity():
    result = dsmc_cluster(Dsm(np.zeros((1, 1))))
    assert len(result.partition) == 1


def test_deterministic(rng):
    d = random_int_dsm(rng, 40, 0.1)
    a = dsmc_cluster(d, DsmcParams(seed=99))
    b = dsmc_cluster(d, DsmcParams(seed=99))
    assert a.partition == b.partition
    assert a.final_tcc == b.final_tcc
    assert (a.passes, a.moves_attempted, a.moves_accepted, a.annealing_accepts) == \
        (b.passes, b.moves_attempted, b.moves_accepted, b.annealing_accepts)


def test_full_and_incremental_follow_same_trajectory(rng):
    d = random_int_dsm(rng, 30, 0.15)
    inc = dsmc_cluster(d, DsmcParams(seed=5), use_incremental=True)
    full = dsmc_cluster(d, DsmcParams(seed=5), use_incremental=False)
    assert inc.partition == full.partition
    assert inc.final_tcc == full.final_tcc
    assert inc.moves_accepted == full.moves_accepted


def test_pass_cap_status(rng):
    d = random_int_dsm(rng, 20, 0.3)
    result = dsmc_cluster(d, DsmcParams(seed=1, max_stable_passes=100, max_passes=3))
    assert result.passes == 3
    assert result.status == PASS_CAP


@given(st.integers(2, 30), st.floats(0.05, 0.6), st.integers(0, 2**31), st.booleans())
@settings(max_examples=30, deadline=None)
def test_run_invariants(n, density, seed, integral):
    rng = np.random.default_rng(seed)
    d = random_int_dsm(rng, n, density) if integral else random_real_dsm(rng, n, density)
    params = DsmcParams(seed=seed)
    counts = []

    def check(event, assign):
        if event.accepted and not event.annealed:
            assert event.tcc_after <= event.tcc_before
        if event.annealed:
            assert event.accepted and event.tcc_after > event.tcc_before
        assert event.new != event.old
        counts.append(np.unique(assign).size)

    result = dsmc_cluster(d, params, observer=check)
    # cluster count starts at n and never grows
    assert all(c <= n for c in counts)
    assert all(b <= a for a, b in zip(counts, counts[1:]))
    assert result.num_clusters_trace == sorted(result.num_clusters_trace, reverse=True)
    assert result.partition.entities == set(d.labels)
    assert result.moves_accepted <= result.moves_attempted
    fresh = calc_coord_cost(d, result.partition, params.powcc).tcc
    if integral:
        assert result.final_tcc == fresh
    else:
        assert abs(result.final_tcc - fresh) <= 1e-9 * max(abs(fresh), 1.0)
    assert result.status == CONVERGED


def test_run_result_json(rng):
    result = dsmc_cluster(random_int_dsm(rng, 10, 0.3))
    doc = result.to_json()
    for key in ("clusters", "final_tcc", "passes", "moves_attempted", "moves_accepted",
                "annealing_accepts", "elapsed", "status"):
        assert key in doc
