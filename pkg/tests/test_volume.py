"""Closed-form body volume against Monte Carlo and lattice counts."""

import itertools
import math

import pytest

from elpp.environment import SeedSpec
from elpp.volume import (
    count_bound_discrete,
    count_exact_discrete,
    entropy_body_constant,
    volume_exact,
    volume_exact_log,
    volume_mc,
)


# closed-form anchors -----------------------------------------------------

def test_constant_anchors():
    assert entropy_body_constant(1) == pytest.approx(4.0 * math.sqrt(2.0) / 3.0,
                                                     rel=1e-14)
    # k = 2 volume at t = B = 1 integrates to pi^2 / 12
    assert volume_exact(2, 1.0, 1.0) == pytest.approx(math.pi ** 2 / 12.0,
                                                      rel=1e-14)


def test_scaling_exponents():
    for k in (1, 2, 3, 5):
        v = volume_exact(k, 1.3, 0.7)
        assert volume_exact(k, 4 * 1.3, 0.7) == pytest.approx(
            4.0 ** (1.5 * k) * v, rel=1e-12)
        assert volume_exact(k, 1.3, 4 * 0.7) == pytest.approx(
            4.0 ** (0.5 * k) * v, rel=1e-12)


def test_log_form_survives_large_k():
    # the two gamma factors overflow exp() near k = 60; the log form
    # must stay finite and keep the Stirling-type decay visible
    logs = [volume_exact_log(k, 1.0, 1.0) for k in (10, 50, 200)]
    assert all(math.isfinite(v) for v in logs)
    assert logs[0] > logs[1] > logs[2]
    assert volume_exact(200, 1.0, 1.0) == 0.0  # clean underflow, no error


def test_domain_errors():
    for bad in ((0, 1.0, 1.0), (1, 0.0, 1.0), (1, 1.0, 0.0),
                (1, 1.0, math.inf), (1, -1.0, 1.0)):
        with pytest.raises(ValueError):
            volume_exact(*bad)
    with pytest.raises(ValueError):
        volume_mc(9, 1.0, 1.0, 10_000, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        volume_mc(1, 1.0, 1.0, 10, SeedSpec(0, 0))
    with pytest.raises(ValueError):
        count_exact_discrete(4, 6, 1.0)
    with pytest.raises(ValueError):
        count_exact_discrete(2, 40, 1.0)


# Monte Carlo cross-check -------------------------------------------------

@pytest.mark.parametrize("k,t,B", [(1, 1.0, 1.0), (2, 1.0, 1.0),
                                   (3, 0.8, 1.5)])
def test_mc_agrees_with_closed_form(k, t, B):
    est = volume_mc(k, t, B, 200_000, SeedSpec(71, k))
    assert est.exact == volume_exact(k, t, B)
    assert abs(est.mc_mean - est.exact) < 4.0 * est.mc_stderr
    assert est.mc_stderr < 0.01 * est.exact + 0.01


def test_mc_is_a_pure_function_of_the_seed():
    a = volume_mc(2, 1.0, 1.0, 50_000, SeedSpec(5, 3))
    b = volume_mc(2, 1.0, 1.0, 50_000, SeedSpec(5, 3))
    c = volume_mc(2, 1.0, 1.0, 50_000, SeedSpec(5, 4))
    assert a == b
    assert a.mc_mean != c.mc_mean


# lattice counts ----------------------------------------------------------

def test_count_below_continuous_bound():
    for (k, n, B) in [(1, 4, 2.0), (2, 6, 1.0), (3, 6, 1.0)]:
        assert count_exact_discrete(k, n, B) <= count_bound_discrete(k, n, B)


def test_count_anchor_values():
    assert count_exact_discrete(1, 4, 2.0) == 26
    assert count_exact_discrete(2, 6, 1.0) == 219
    assert count_exact_discrete(3, 6, 1.0) == 568


def test_count_matches_unpruned_enumeration():
    # second route with no reach pruning: scan a generous x window
    k, n, B = 2, 4, 1.5
    span = int(math.floor(math.sqrt(2.0 * B * n))) + 1
    xs = range(-2 * span, 2 * span + 1)
    total = 0
    for t1, t2 in itertools.combinations(range(1, n + 1), k):
        for x1 in xs:
            e1 = x1 * x1 / (2.0 * t1)
            if e1 > B:
                continue
            for x2 in xs:
                e2 = e1 + (x2 - x1) ** 2 / (2.0 * (t2 - t1))
                if e2 <= B:
                    total += 1
    assert count_exact_discrete(k, n, B) == total
