"""Experiment engine: statistics helpers, writers, determinism, smokes."""

import json
import math

import numpy as np
import pytest

from elpp.core import Box
from elpp.environment import GENERATOR_ID, SeedSpec
from elpp.experiments import (
    csv_lines,
    jsonl_lines,
    ks_two_sample,
    lattice_beta,
    run_blowup_demo,
    run_convergence_experiment,
    run_scaling_experiment,
    run_tail_experiment,
    run_truncation_experiment,
    summarize,
    tail_slope,
    write_jsonl,
    write_summary_csv,
)


# statistics helpers ------------------------------------------------------

def test_ks_hand_values():
    assert ks_two_sample([0.0], [0.0]) == 0.0
    assert ks_two_sample([0.0], [1.0]) == 1.0
    assert ks_two_sample([0.0, 1.0], [0.0, 2.0]) == 0.5
    assert ks_two_sample([1, 2, 3], [1, 2, 3]) == 0.0
    with pytest.raises(ValueError):
        ks_two_sample([], [1.0])


def test_ks_matches_dense_reference():
    # reference: evaluate both empirical CDFs on a fine fixed grid plus
    # the sample points themselves
    rng = np.random.default_rng(3)
    a = rng.normal(size=37)
    b = rng.normal(0.3, 1.1, size=53)
    grid = np.concatenate([a, b, np.linspace(-5, 5, 2001)])
    fa = (a[None, :] <= grid[:, None]).mean(axis=1)
    fb = (b[None, :] <= grid[:, None]).mean(axis=1)
    ref = np.abs(fa - fb).max()
    assert ks_two_sample(a, b) == pytest.approx(ref, abs=1e-15)
    assert ks_two_sample(a, b) == ks_two_sample(b, a)


def test_summarize_nearest_rank():
    s = summarize(range(1, 11))
    assert s.n_replicas == 10
    assert s.mean == pytest.approx(5.5)
    assert s.variance == pytest.approx(np.var(range(1, 11), ddof=1))
    assert s.quantile(1) == 1.0    # ceil(0.1) -> first order statistic
    assert s.quantile(25) == 3.0   # ceil(2.5) -> third
    assert s.quantile(50) == 5.0
    assert s.quantile(95) == 10.0  # ceil(9.5) -> tenth
    single = summarize([4.0])
    assert single.variance == 0.0 and single.quantile(50) == 4.0
    with pytest.raises(ValueError):
        summarize([])
    with pytest.raises(KeyError):
        s.quantile(42)


def test_tail_slope_recovers_a_pure_power_law():
    # order statistics placed exactly on survival = x^(-2): the top
    # decade is collinear in log-log, so the fit is exact
    n = 100
    values = (np.arange(1, n + 1) / n) ** -0.5
    assert tail_slope(values) == pytest.approx(-2.0, abs=1e-10)
    with pytest.raises(ValueError):
        tail_slope(np.zeros(50))


def test_lattice_beta_arithmetic():
    # beta_{n,h} = nu h^2 / (n m(nh)) with m(x) = x^(1/alpha)
    assert lattice_beta(1.0, 2.0, 100, 10) == pytest.approx(
        2.0 * 100 / (100 * 1000), rel=1e-15)
    assert lattice_beta(0.5, 1.0, 64, 16) == pytest.approx(
        16.0**2 / (64 * (64 * 16) ** 2), rel=1e-15)


# writers -----------------------------------------------------------------

def _tiny_tail():
    return run_tail_experiment(8, 1.0, Box("continuous", 1.0, 1.0), 6,
                               SeedSpec(21, 0))


def test_jsonl_metadata_and_roundtrip():
    res = _tiny_tail()
    params = dict(res.records[0].params)
    lines = list(jsonl_lines("tail", params, 21, res.records))
    meta = json.loads(lines[0])
    assert meta["generator_id"] == GENERATOR_ID
    assert meta["experiment"] == "tail" and meta["master_seed"] == 21
    assert meta["params"]["m"] == 8
    assert "version" in meta
    body = [json.loads(ln) for ln in lines[1:]]
    assert len(body) == 6
    for r, doc in enumerate(body):
        assert doc["seed"] == {"master_seed": 21, "stream_index": r}
        assert doc["outputs"]["value"] == res.records[r].outputs["value"]


def test_float_serialization_is_lossless():
    vals = [math.pi, 1e-300, 2.0 / 3.0, 1.7976931348623157e308]
    lines = list(csv_lines("t", {"x": vals[0]}, 0, ["v"], [[v] for v in vals]))
    meta = json.loads(lines[0].removeprefix("# "))
    assert meta["params"]["x"] == math.pi
    assert lines[1] == "v"
    assert [float(ln) for ln in lines[2:]] == vals


def test_writers_hit_disk(tmp_path):
    res = _tiny_tail()
    params = dict(res.records[0].params)
    jp = tmp_path / "r.jsonl"
    cp = tmp_path / "s.csv"
    write_jsonl(jp, "tail", params, 21, res.records)
    write_summary_csv(cp, "tail", params, 21, ["m", "mean"],
                      [[8, res.stats.mean]])
    assert jp.read_text() == "".join(
        ln + "\n" for ln in jsonl_lines("tail", params, 21, res.records))
    got = cp.read_text().splitlines()
    assert got[0].startswith("# ") and got[1] == "m,mean"


# determinism and scheduling ----------------------------------------------

def test_records_are_a_pure_function_of_the_seed():
    a = _tiny_tail()
    b = _tiny_tail()
    assert a.records == b.records
    assert a.stats == b.stats


def test_thread_count_cannot_change_any_byte():
    kw = dict(m=8, budget=1.0, box=Box("continuous", 1.0, 1.0),
              replicas=12, seed=SeedSpec(22, 0))
    r1 = run_tail_experiment(**kw, threads=1)
    r2 = run_tail_experiment(**kw, threads=2)
    assert r1.records == r2.records
    params = dict(r1.records[0].params)
    l1 = list(jsonl_lines("tail", params, 22, r1.records))
    l2 = list(jsonl_lines("tail", params, 22, r2.records))
    assert l1 == l2


# experiment smokes -------------------------------------------------------

def test_tail_experiment_shapes():
    res = run_tail_experiment(10, 1.0, Box("continuous", 1.0, 1.0), 50,
                              SeedSpec(23, 0))
    assert res.stats.n_replicas == 50
    assert res.scale == pytest.approx(math.sqrt(10))
    assert res.tail_probs[0] == 1.0
    assert all(b <= a for a, b in zip(res.tail_probs, res.tail_probs[1:]))
    assert res.ratio_mean == pytest.approx(res.stats.mean / res.scale)
    vals = [rec.outputs["value"] for rec in res.records]
    assert all(v == int(v) and 0 <= v <= 10 for v in vals)


def test_tail_experiment_zero_budget():
    # continuous clouds have no repeated x, so budget 0 collects just
    # flat chains of length <= 1 and the 0/0 ratio is read as 0
    res = run_tail_experiment(5, 0.0, Box("continuous", 1.0, 1.0), 20,
                              SeedSpec(23, 1))
    assert res.scale == 0.0
    assert res.stats.mean <= 1.0
    assert math.isfinite(res.ratio_mean)


def test_scaling_shared_atoms_make_beta_one_exact():
    res = run_scaling_experiment(1.0, [1.0, 2.0], 40, 8.0, 40, SeedSpec(24, 0))
    assert res.comparisons[0].beta == 1.0
    assert res.comparisons[0].scale_factor == 1.0
    assert res.comparisons[0].ks_distance == 0.0
    # alpha = 1: rescale exponent 2 alpha / (2 alpha - 1) = 2
    assert res.comparisons[1].scale_factor == pytest.approx(4.0)
    assert 0.0 < res.ks_control <= 1.0
    assert res.t1_stats.n_replicas == 40


def test_convergence_ladder_monotone_smoke():
    res = run_convergence_experiment(1.0, 1.0, 8.0, 20, (64, 128, 256), 60,
                                     SeedSpec(11, 0))
    assert [s.n for s in res.rungs] == [64, 128, 256]
    for s in res.rungs:
        assert s.h == round(s.n**0.75)
        assert s.half_width == round(8.0 * s.h)
        assert s.beta_nh == pytest.approx(lattice_beta(1.0, 1.0, s.n, s.h))
    ks = [s.ks_distance for s in res.rungs]
    assert all(b <= a + 1e-12 for a, b in zip(ks, ks[1:]))
    assert res.continuum_stats.n_replicas == 60


def test_truncation_medians_and_increments():
    res = run_truncation_experiment(1.0, 1.0, 8.0, (5, 10, 20), 30,
                                    SeedSpec(12, 0), n=256)
    assert [e.ell for e in res.per_ell] == [5, 10, 20]
    tails = [e.median_tail for e in res.per_ell]
    assert all(b <= a + 1e-12 for a, b in zip(tails, tails[1:]))
    assert len(res.increment_medians) == 2
    assert all(v >= 0.0 for v in res.increment_medians)
    assert res.records[0].params["keep"] == 40  # default 2 * max ell
    assert res.records[0].params["h"] == round(256**0.75)


def test_blowup_dichotomy_smoke():
    heavy = run_blowup_demo(0.4, 0.25, (2.0, 4.0), 10, 40, SeedSpec(11, 0))
    ctrl = run_blowup_demo(1.0, 0.25, (2.0, 4.0), 10, 40, SeedSpec(11, 0))
    assert [r.ell for r in heavy.rungs] == [20, 40]
    assert len(heavy.median_ratios) == 1
    # alpha below 1/2 grows much faster along the strip ladder
    assert heavy.median_ratios[0] > 2.0 * ctrl.median_ratios[0]


def test_experiment_domain_errors():
    box = Box("continuous", 1.0, 1.0)
    with pytest.raises(ValueError):
        run_tail_experiment(0, 1.0, box, 5, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        run_scaling_experiment(0.5, [2.0], 20, 8.0, 5, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        run_convergence_experiment(1.0, 1.0, 8.0, 20, (64, 128), 5, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        run_truncation_experiment(1.0, 1.0, 8.0, (20, 10), 5, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        run_blowup_demo(0.4, 0.25, (4.0, 2.0), 10, 5, SeedSpec(0, 0))
