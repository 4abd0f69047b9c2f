"""Exact solvers for the energy-entropy variational problem.

The objective is beta * (sum of weights collected) - entropy of the
collecting chain, maximized over all finite point subsets of an
environment, with the empty set always admissible at score zero.  Both
terms are additive along a time-ordered chain, so a longest-path DP
over the canonical order solves the problem exactly; no budget grid or
discretization is involved.

Truncation enters in two dual ways: ``solve_variational`` keeps only
the ``ell`` heaviest entries, ``solve_tail`` keeps everything beyond
them.  The continuum functional is handled by sampling the weight
record process on a strip and reusing the same finite maximization,
which is exact because the optimal path through finitely many points
is their linear interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import EMPTY_PATH, DeltaPath, TimeSpacePoint
from .environment import Environment, SeedSpec, sample_ppp_ordered
from ._kernels import (
    _lex_less,
    brute_best_gain,
    subset_entropies,
    subset_tables,
    variational_kernel,
)

__all__ = [
    "VariationalResult",
    "BetaSweep",
    "MaximizerReport",
    "solve_variational",
    "solve_tail",
    "continuum_T_truncated",
    "beta_sweep",
    "check_maximizer_unique",
    "brute_force_variational",
]

_UNIQUE_LIMIT = 15


@dataclass(frozen=True)
class VariationalResult:
    """Value and maximizer of one variational solve.

    value is beta * (weight sum at the argmax) - entropy(argmax) and is
    never negative; the empty chain realizes zero.  argmax_ids are the
    entry positions of the collected points in chain (time) order, so
    they parallel argmax.points.
    """

    value: float
    argmax: DeltaPath
    argmax_ids: tuple[int, ...]
    ell_used: int
    beta: float

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError("variational value cannot be negative")
        if len(self.argmax_ids) != len(self.argmax):
            raise ValueError("argmax_ids must parallel the argmax chain")


@dataclass(frozen=True)
class BetaSweep:
    """Monotone convex value curve over an ascending beta grid.

    argmax_ids holds, per beta, the sorted entry-index set of the
    maximizer.  values are nondecreasing in beta always, and have
    nonnegative second differences whenever the grid is uniform (the
    value is a finite max of affine functions of beta).
    """

    betas: tuple[float, ...]
    values: tuple[float, ...]
    argmax_ids: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class MaximizerReport:
    """Uniqueness diagnostics from exhaustive subset enumeration."""

    unique: bool
    value: float
    argmax_ids: tuple[int, ...]
    ties: tuple[tuple[int, ...], ...] = field(default=())


def _check_beta(beta: float) -> float:
    beta = float(beta)
    if not math.isfinite(beta) or beta < 0.0:
        raise ValueError("beta must be finite and nonnegative")
    return beta


def _resolve_prefix(env: Environment, ell: Optional[int]) -> int:
    m = len(env.weights)
    if ell is None:
        return m
    ell = int(ell)
    if ell < 0 or ell > m:
        raise ValueError(f"ell must lie in [0, {m}], got {ell}")
    return ell


def _canonical_subset(
    env: Environment, ids: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Time-order a subset of entries; ties by x, then entry position."""
    ts = np.ascontiguousarray(env.ts[ids], dtype=np.float64)
    xs = np.ascontiguousarray(env.xs[ids], dtype=np.float64)
    ws = np.ascontiguousarray(env.weights[ids], dtype=np.float64)
    order = np.lexsort((ids, xs, ts))
    return ts[order], xs[order], ws[order], ids[order]


def _solve_subset(
    env: Environment, ids: np.ndarray, beta: float, ell_used: int
) -> VariationalResult:
    if ids.size == 0:
        return VariationalResult(0.0, EMPTY_PATH, (), ell_used, beta)
    ts, xs, ws, ent_ids = _canonical_subset(env, ids)
    g, bp = variational_kernel(ts, xs, beta * ws)
    best = 0.0
    arg = -1
    for j in range(g.size):
        if g[j] > best:
            best = float(g[j])
            arg = j
    if arg < 0:
        return VariationalResult(0.0, EMPTY_PATH, (), ell_used, beta)
    chain = []
    j = arg
    while j >= 0:
        chain.append(j)
        j = int(bp[j])
    chain.reverse()
    points = tuple(TimeSpacePoint(float(ts[j]), float(xs[j])) for j in chain)
    ids_out = tuple(int(ent_ids[j]) for j in chain)
    return VariationalResult(best, DeltaPath.from_points(points), ids_out, ell_used, beta)


def solve_variational(
    env: Environment, beta: float, ell: Optional[int] = None
) -> VariationalResult:
    """Maximize beta * energy - entropy over the ell heaviest entries.

    Entries are weight-sorted, so the restriction is the prefix of
    length ell; ell=None uses every entry, ell=0 returns the trivial
    empty maximizer rather than erroring (convenient in sweeps).  The
    DP maximizes g[j] = beta*w_j + max(g[i] - step cost) over earlier
    points i and the origin, then takes max(0, max_j g[j]).  Exact:
    energy and entropy are both additive along the time-ordered chain.

    Tie policy mirrors the budgeted solver: among equal-value options
    the chain built from lowest canonical indices is reported, and the
    empty chain wins a tie at zero.
    """
    beta = _check_beta(beta)
    ell = _resolve_prefix(env, ell)
    ids = np.arange(ell, dtype=np.int64)
    return _solve_subset(env, ids, beta, ell)


def solve_tail(env: Environment, beta: float, ell: int) -> VariationalResult:
    """Same maximization restricted to entries beyond the ell heaviest.

    ell=0 coincides with solve_variational over all entries; ell must
    leave at least one entry.  Values are pathwise nonincreasing in ell
    since raising ell only removes options.
    """
    beta = _check_beta(beta)
    m = len(env.weights)
    ell = int(ell)
    if ell < 0 or ell >= m:
        raise ValueError(f"tail cut must lie in [0, {m}), got {ell}")
    ids = np.arange(ell, m, dtype=np.int64)
    return _solve_subset(env, ids, beta, ell)


def continuum_T_truncated(
    alpha: float, nu: float, q: float, ell: int, seed: SeedSpec
) -> VariationalResult:
    """Truncated continuum functional on the strip [0,1] x [-q,q].

    Samples the top ell atoms of the heavy-tail record process and
    maximizes nu * energy - entropy over their subsets.  Exact for the
    truncated problem; the untruncated functional is only ever
    approached through increasing (ell, q).
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if ell < 1:
        raise ValueError("ell must be at least 1")
    nu = _check_beta(nu)
    env = sample_ppp_ordered(ell, alpha, q, seed)
    return solve_variational(env, nu, ell)


def beta_sweep(
    env: Environment, betas: Sequence[float], ell: Optional[int] = None
) -> BetaSweep:
    """Solve along an ascending beta grid and certify the value shape.

    Asserts the values are nondecreasing, and on a uniform grid that
    second differences stay above -1e-9: the exact value is a finite
    max of affine functions of beta, so both properties hold up to
    roundoff.
    """
    bs = [_check_beta(b) for b in betas]
    if any(b1 < b0 for b0, b1 in zip(bs, bs[1:])):
        raise ValueError("betas must be ascending")
    results = [solve_variational(env, b, ell) for b in bs]
    vals = [r.value for r in results]
    for v0, v1 in zip(vals, vals[1:]):
        if v1 < v0 - 1e-12:
            raise AssertionError("value curve decreased along beta")
    if len(bs) >= 3:
        steps = np.diff(bs)
        if steps.size and np.all(np.abs(steps - steps[0]) <= 1e-9 * max(steps[0], 1.0)):
            second = np.diff(vals, n=2)
            if second.size and second.min() < -1e-9:
                raise AssertionError("value curve lost convexity on a uniform grid")
    return BetaSweep(
        betas=tuple(bs),
        values=tuple(vals),
        argmax_ids=tuple(tuple(sorted(r.argmax_ids)) for r in results),
    )


def _enumerate_gains(
    env: Environment, beta: float, ell: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Subset entropies and weighted gains on the canonical prefix."""
    ids = np.arange(ell, dtype=np.int64)
    ts, xs, ws, ent_ids = _canonical_subset(env, ids)
    top, _ = subset_tables(ell)
    ent = subset_entropies(ts, xs, top)
    return ent, beta * ws, ent_ids


def _mask_to_ids(mask: int, ent_ids: np.ndarray) -> tuple[int, ...]:
    out = [int(ent_ids[i]) for i in range(ent_ids.size) if mask >> i & 1]
    return tuple(sorted(out))


def brute_force_variational(
    env: Environment, beta: float, ell: Optional[int] = None
) -> tuple[float, tuple[int, ...]]:
    """Exhaustive maximum over all 2^ell subsets of the heaviest entries.

    Independent of the DP: entropies come from the subset recursion
    over bitmasks.  Returns (value, sorted entry ids of the argmax);
    ties resolve to the lexicographically smallest index set, with the
    empty set first of all.  Restricted to ell <= 22.
    """
    beta = _check_beta(beta)
    ell = _resolve_prefix(env, ell)
    if ell > 22:
        raise ValueError("brute force capped at 22 entries")
    if ell == 0:
        return 0.0, ()
    ent, weighted, ent_ids = _enumerate_gains(env, beta, ell)
    top, _ = subset_tables(ell)
    value, mask = brute_best_gain(ent, top, weighted, ell)
    return float(value), _mask_to_ids(int(mask), ent_ids)


def check_maximizer_unique(
    env: Environment, beta: float, ell: Optional[int] = None, tol: float = 0.0
) -> MaximizerReport:
    """Is the maximizer attained by exactly one subset?

    Enumerates every subset (ell <= 15 enforced) and reports all
    subsets whose value comes within tol of the maximum; tol=0 means
    exact float ties only.  For continuous weight laws ties have
    probability zero, so unique=True is the generic outcome.
    """
    beta = _check_beta(beta)
    ell = _resolve_prefix(env, ell)
    if ell > _UNIQUE_LIMIT:
        raise ValueError(f"uniqueness check capped at {_UNIQUE_LIMIT} entries")
    if ell == 0:
        return MaximizerReport(True, 0.0, ())
    ent, weighted, ent_ids = _enumerate_gains(env, beta, ell)
    gains = np.zeros(ent.size)
    top, _ = subset_tables(ell)
    for mask in range(1, ent.size):
        gains[mask] = gains[mask ^ (1 << int(top[mask]))] + weighted[int(top[mask])]
    values = np.where(np.isfinite(ent), gains - ent, -np.inf)
    values[0] = 0.0
    best = max(0.0, float(values.max()))
    # mask 0 scores exactly 0.0, so the empty set enters automatically
    # whenever best - tol <= 0
    winners = [m for m in range(ent.size) if values[m] >= best - tol]
    arg = winners[0]
    for m in winners[1:]:
        if _lex_less(m, arg, ell):
            arg = m
    ties = tuple(_mask_to_ids(m, ent_ids) for m in winners if m != arg)
    return MaximizerReport(
        unique=len(winners) == 1,
        value=best,
        argmax_ids=_mask_to_ids(arg, ent_ids),
        ties=ties,
    )
