"""Volume of the entropy body and its Monte Carlo cross-check.

The entropy body in dimension 2k is the set of time-ordered k-tuples
(t_1, x_1), ..., (t_k, x_k) in [0, t] x R whose chain entropy from the
origin stays below a budget B.  Its volume has the closed form
C_k * B^(k/2) * t^(3k/2), and the constant C_k involves two gamma
factors that overflow naive evaluation long before k = 50, so every
product here is assembled in log space.

The MC estimator is deliberately independent of the closed form: it
samples unordered tuples in the bounding box, sorts the times, and
divides the accepted box measure by k!.  Agreement of the two routes is
an end-to-end check of the volume recursion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import SeedSpec, derive_stream

__all__ = [
    "VolumeEstimate",
    "entropy_body_constant",
    "volume_exact",
    "volume_exact_log",
    "volume_mc",
    "count_bound_discrete",
    "count_exact_discrete",
]

_MC_DIM_LIMIT = 8
_MC_MIN_SAMPLES = 1_000
_MC_CHUNK = 1 << 18

_COUNT_K_LIMIT = 3
_COUNT_N_LIMIT = 12


@dataclass(frozen=True)
class VolumeEstimate:
    """Closed form and MC estimate side by side.

    mc_stderr is the sample standard deviation of the acceptance
    indicator scaled by (box volume / k!) / sqrt(samples), i.e. the
    standard error of mc_mean itself.
    """

    k: int
    t: float
    B: float
    exact: float
    mc_mean: float
    mc_stderr: float
    samples: int


def _check_params(k: int, t: float, B: float) -> tuple[int, float, float]:
    k = int(k)
    t = float(t)
    B = float(B)
    if k < 1:
        raise ValueError("k must be at least 1")
    if not (t > 0.0 and math.isfinite(t)):
        raise ValueError("t must be positive and finite")
    if not (B > 0.0 and math.isfinite(B)):
        raise ValueError("B must be positive and finite")
    return k, t, B


def _log_ck(k: int) -> float:
    # C_k = (pi / sqrt(2))^k / (Gamma(k/2 + 1) Gamma(3k/2 + 1)).
    # The exponent on sqrt(2) is k: the k = 2 volume integrates to
    # pi^2/12 by the left-most-point induction, and the MC estimator
    # confirms 2^(k/2) at k = 2, 3, 4.
    return (
        k * (math.log(math.pi) - 0.5 * math.log(2.0))
        - math.lgamma(0.5 * k + 1.0)
        - math.lgamma(1.5 * k + 1.0)
    )


def entropy_body_constant(k: int) -> float:
    """The constant C_k; C_1 = 4 sqrt(2) / 3."""
    if int(k) < 1:
        raise ValueError("k must be at least 1")
    return math.exp(_log_ck(int(k)))


def volume_exact_log(k: int, t: float, B: float) -> float:
    """log of the body volume, exact in the exponents."""
    k, t, B = _check_params(k, t, B)
    return _log_ck(k) + 0.5 * k * math.log(B) + 1.5 * k * math.log(t)


def volume_exact(k: int, t: float, B: float) -> float:
    """Body volume C_k * B^(k/2) * t^(3k/2)."""
    return math.exp(volume_exact_log(k, t, B))


def volume_mc(
    k: int, t: float, B: float, samples: int, seed: SeedSpec
) -> VolumeEstimate:
    """Monte Carlo volume of the entropy body.

    Tuples are drawn uniformly in ([0, t] x [-a, a])^k with
    a = sqrt(2 B t); no feasible tuple lies outside since any point
    reachable under budget B satisfies x^2 <= 2 B t.  Times are sorted
    within each tuple (positions carried along) before the entropy
    test, and the unordered acceptance rate is multiplied by the box
    volume and divided by k!.

    Chunked evaluation with a fixed chunk size keeps the draw sequence,
    and hence the estimate, a pure function of (params, seed).
    """
    k, t, B = _check_params(k, t, B)
    samples = int(samples)
    if k > _MC_DIM_LIMIT:
        raise ValueError(f"MC volume capped at k = {_MC_DIM_LIMIT}")
    if samples < _MC_MIN_SAMPLES:
        raise ValueError(f"need at least {_MC_MIN_SAMPLES} samples")
    a = math.sqrt(2.0 * B * t)
    scale = (2.0 * t * a) ** k / math.factorial(k)
    rng = derive_stream(seed)
    hits = 0
    done = 0
    while done < samples:
        c = min(_MC_CHUNK, samples - done)
        ts = rng.random((c, k)) * t
        xs = (rng.random((c, k)) * 2.0 - 1.0) * a
        order = np.argsort(ts, axis=1, kind="stable")
        ts = np.take_along_axis(ts, order, axis=1)
        xs = np.take_along_axis(xs, order, axis=1)
        dt = np.diff(ts, axis=1, prepend=0.0)
        dx = np.diff(xs, axis=1, prepend=0.0)
        # coincident times give inf (or nan at dx = 0); both fail <= B
        with np.errstate(divide="ignore", invalid="ignore"):
            ent = 0.5 * np.sum(dx * dx / dt, axis=1)
        hits += int(np.count_nonzero(ent <= B))
        done += c
    p = hits / samples
    return VolumeEstimate(
        k=k,
        t=t,
        B=B,
        exact=volume_exact(k, t, B),
        mc_mean=p * scale,
        mc_stderr=math.sqrt(p * (1.0 - p) / samples) * scale,
        samples=samples,
    )


def count_bound_discrete(k: int, n: int, B: float) -> float:
    """Upper bound 2^k * C_k * B^(k/2) * n^(3k/2) on the lattice count."""
    k = int(k)
    n = int(n)
    B = float(B)
    if k < 1 or n < 1:
        raise ValueError("k and n must be at least 1")
    if not (B > 0.0 and math.isfinite(B)):
        raise ValueError("B must be positive and finite")
    return math.exp(
        k * math.log(2.0) + _log_ck(k) + 0.5 * k * math.log(B) + 1.5 * k * math.log(n)
    )


def count_exact_discrete(k: int, n: int, B: float) -> int:
    """Exhaustive count of lattice chains under the entropy budget.

    Counts k-tuples with integer coordinates, 1 <= t_1 < ... < t_k <= n
    and x_i unrestricted, whose chain entropy from the origin is at
    most B.  Enumeration is pruned by the per-step reach
    |x - x_prev| <= sqrt(2 (B - spent) dt), which is exact.  Guarded to
    k <= 3, n <= 12 where the state space stays desk sized.
    """
    k = int(k)
    n = int(n)
    B = float(B)
    if not 1 <= k <= _COUNT_K_LIMIT:
        raise ValueError(f"exact count supports 1 <= k <= {_COUNT_K_LIMIT}")
    if not 1 <= n <= _COUNT_N_LIMIT:
        raise ValueError(f"exact count supports 1 <= n <= {_COUNT_N_LIMIT}")
    if not (B > 0.0 and math.isfinite(B)):
        raise ValueError("B must be positive and finite")

    def rec(step: int, t_prev: int, x_prev: int, spent: float) -> int:
        if step == k:
            return 1
        total = 0
        rem = B - spent
        # leave room for the remaining k - step - 1 strictly later times
        for tt in range(t_prev + 1, n - (k - step - 1) + 1):
            dt = tt - t_prev
            reach = math.sqrt(2.0 * rem * dt)
            lo = math.ceil(x_prev - reach)
            hi = math.floor(x_prev + reach)
            for xx in range(lo, hi + 1):
                c = (xx - x_prev) ** 2 / (2.0 * dt)
                if spent + c <= B:
                    total += rec(step + 1, tt, xx, spent + c)
        return total

    return rec(0, 0, 0, 0.0)
