"""Exact solvers for entropy-constrained increasing chains.

The central quantity is minEnt[j][k], the least entropy over chains of
exactly k cloud points ending at point j (with the implicit origin
start).  It is nondecreasing in k for fixed j: removing the second
point of a chain and rerouting the first step can only lower the cost
of that step, by convexity of u -> u^2 / t.  The optimal count under a
budget B is therefore the largest k whose row minimum is <= B.

Two implementations are kept deliberately: a dense reference DP with
full tables, and a pruned compacted DP for large clouds.  They are
cross-checked in the test suite; both are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .core import DeltaPath, TimeSpacePoint
from .environment import Environment

__all__ = [
    "ParetoFrontier",
    "ElppResult",
    "build_frontier",
    "elpp_value",
    "min_entropy_for_count",
    "brute_force_elpp",
]

_BRUTE_LIMIT = 22
_TABLE_CELL_LIMIT = 64_000_000  # frontier cells; 512 MB of float64


def canonical_arrays(env: Environment) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Points sorted by (t, x, entry position); returns (ts, xs, perm)
    where perm[c] is the entry index of canonical point c."""
    ts = np.asarray(env.ts, dtype=np.float64)
    xs = np.asarray(env.xs, dtype=np.float64)
    perm = np.lexsort((np.arange(len(ts)), xs, ts))
    return ts[perm], xs[perm], perm


@dataclass(frozen=True, eq=False)
class ParetoFrontier:
    """Dense minimal-entropy table in canonical point order.

    min_entropy[k-1, j] is minEnt for k-chains ending at canonical
    point j, +inf where none exists (or none within the build budget).
    backpointers[k-1, j] is the canonical predecessor index, -1 for
    the origin, -2 where infeasible.
    """

    ts: np.ndarray
    xs: np.ndarray
    entry_index: np.ndarray
    min_entropy: np.ndarray
    backpointers: np.ndarray
    budget: float

    @property
    def levels(self) -> int:
        return self.min_entropy.shape[0]

    def chain(self, k: int, j: int) -> DeltaPath:
        """Witness k-chain ending at canonical point j."""
        if not (1 <= k <= self.levels):
            raise ValueError("k out of range")
        if not np.isfinite(self.min_entropy[k - 1, j]):
            raise ValueError("no feasible chain at this cell")
        idx = []
        cur = j
        for row in range(k - 1, -1, -1):
            idx.append(cur)
            cur = int(self.backpointers[row, cur])
        idx.reverse()
        return DeltaPath.from_points(
            [TimeSpacePoint(float(self.ts[i]), float(self.xs[i])) for i in idx]
        )


@dataclass(frozen=True)
class ElppResult:
    value: int
    witness: Optional[DeltaPath]
    frontier: Optional[ParetoFrontier] = None


def _check_budget(budget: float) -> float:
    b = float(budget)
    if not (b >= 0.0) or math.isinf(b) or math.isnan(b):
        raise ValueError("budget must be a finite nonnegative number")
    return b


def build_frontier(
    env: Environment, k_max: Optional[int] = None, budget: float = math.inf
) -> ParetoFrontier:
    """Dense table of minEnt up to k_max levels (default: m).

    With a finite budget, cells above it are reported infeasible; the
    remaining cells carry the same values as the unconstrained table.
    Cost is O(k_max m^2) time and O(k_max m) memory, meant for clouds
    of at most a few thousand points.
    """
    ts, xs, perm = canonical_arrays(env)
    m = len(ts)
    k_cap = m if k_max is None else int(k_max)
    if k_cap < 1 or (k_max is not None and k_cap > m):
        raise ValueError("k_max must lie in [1, m]")
    if m == 0:
        return ParetoFrontier(ts, xs, perm, np.empty((0, 0)), np.empty((0, 0), np.int32), budget)
    if k_cap * m > _TABLE_CELL_LIMIT:
        raise ValueError("frontier table too large; lower k_max")
    minent, bp, levels = _kernels.frontier_kernel(ts, xs, float(budget), k_cap)
    lv = max(levels, 1)
    return ParetoFrontier(
        ts=ts, xs=xs, entry_index=perm,
        min_entropy=minent[:lv], backpointers=bp[:lv], budget=float(budget),
    )


def _x_span(env: Environment) -> float:
    return 4.0 * float(env.box.x_max) + 1.0


def value_only(env: Environment, budget: float, k_max: Optional[int] = None) -> int:
    """Optimal count without witness bookkeeping; fastest path."""
    b = _check_budget(budget)
    ts, xs, _ = canonical_arrays(env)
    m = len(ts)
    if m == 0:
        return 0
    k_cap = m if k_max is None else min(int(k_max), m)
    if k_cap < 0:
        raise ValueError("k_max must be nonnegative")
    dummy = np.empty((1, 1), dtype=np.int32)
    value, _ = _kernels.value_kernel(ts, xs, b, k_cap, _x_span(env), 0, dummy)
    return int(value)


def elpp_value(
    env: Environment,
    budget: float,
    k_max: Optional[int] = None,
    keep_frontier: bool = False,
) -> ElppResult:
    """Optimal point count under the entropy budget, with a witness.

    The witness is an optimal chain; ties at every backpointer resolve
    to the lowest canonical index.  `keep_frontier` additionally
    returns the dense table (small clouds only).
    """
    b = _check_budget(budget)
    ts, xs, perm = canonical_arrays(env)
    m = len(ts)
    if m == 0:
        return ElppResult(0, DeltaPath.from_points(()))
    k_cap = m if k_max is None else min(int(k_max), m)
    span = _x_span(env)
    dummy = np.empty((1, 1), dtype=np.int32)
    value, _ = _kernels.value_kernel(ts, xs, b, k_cap, span, 0, dummy)
    value = int(value)
    if value == 0:
        witness = DeltaPath.from_points(())
    else:
        bp = np.full((value, m), -2, dtype=np.int32)
        value2, best_end = _kernels.value_kernel(ts, xs, b, value, span, 1, bp)
        assert int(value2) == value, "recording pass disagrees with value pass"
        idx = []
        cur = int(best_end)
        for row in range(value - 1, -1, -1):
            idx.append(cur)
            cur = int(bp[row, cur])
        assert cur == -1, "witness walk did not terminate at the origin"
        idx.reverse()
        witness = DeltaPath.from_points(
            [TimeSpacePoint(float(ts[i]), float(xs[i])) for i in idx]
        )
        assert witness.entropy <= b, "witness exceeds budget"
    frontier = None
    if keep_frontier:
        frontier = build_frontier(env, k_max=max(value, 1), budget=b)
    return ElppResult(value=value, witness=witness, frontier=frontier)


def min_entropy_for_count(env: Environment, k: int) -> float:
    """Least entropy of any k-chain in the cloud; inf if none exists.

    Dual to elpp_value: min_entropy_for_count(env, k) <= B exactly
    when elpp_value(env, B) >= k.
    """
    k = int(k)
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return 0.0
    m = len(env)
    if k > m:
        return math.inf
    fr = build_frontier(env, k_max=k)
    if fr.levels < k:
        return math.inf
    return float(np.min(fr.min_entropy[k - 1]))


def brute_force_elpp(env: Environment, budget: float) -> int:
    """Independent oracle: enumerate every subset (m <= 22)."""
    b = _check_budget(budget)
    ts, xs, _ = canonical_arrays(env)
    m = len(ts)
    if m > _BRUTE_LIMIT:
        raise ValueError(f"brute force limited to {_BRUTE_LIMIT} points")
    if m == 0:
        return 0
    top, pc = _kernels.subset_tables(m)
    ent = _kernels.subset_entropies(ts, xs, top)
    return int(_kernels.brute_best_count(ent, pc, b))
