"""Entropy functional and path primitives.

A path is a finite sequence of space-time points (t, x) visited in
nondecreasing time order, always starting implicitly from the origin
(0, 0).  Its entropy is the sum of squared spatial increments divided
by twice the time increments.  A step with zero time increment has
infinite entropy, including a zero-length step: revisiting an instant
is never free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TimeSpacePoint",
    "Box",
    "DeltaPath",
    "step_cost",
    "entropy",
    "canonical_order",
]


@dataclass(frozen=True, order=True)
class TimeSpacePoint:
    """A point (t, x) with t >= 0.  Ordering is lexicographic in (t, x)."""

    t: float
    x: float

    def __post_init__(self):
        if not (self.t >= 0.0):
            raise ValueError(f"time must be nonnegative, got {self.t}")


ORIGIN = TimeSpacePoint(0.0, 0.0)


@dataclass(frozen=True)
class Box:
    """Sampling window.

    Continuous mode: t in [0, t_max], x in [-x_max, x_max].
    Lattice mode: t in {1, ..., t_max}, x in {-x_max, ..., x_max},
    both bounds integer valued.
    """

    mode: str
    t_max: float
    x_max: float

    def __post_init__(self):
        if self.mode not in ("continuous", "lattice"):
            raise ValueError(f"unknown box mode {self.mode!r}")
        if not (self.t_max > 0 and self.x_max > 0):
            raise ValueError("box extents must be positive")
        if self.mode == "lattice":
            if self.t_max != int(self.t_max) or self.x_max != int(self.x_max):
                raise ValueError("lattice box extents must be integers")

    @property
    def site_count(self) -> int:
        """Number of lattice sites; lattice mode only."""
        if self.mode != "lattice":
            raise ValueError("site_count is defined for lattice boxes only")
        return int(self.t_max) * (2 * int(self.x_max) + 1)


def _coerce(p) -> TimeSpacePoint:
    if isinstance(p, TimeSpacePoint):
        return p
    t, x = p
    return TimeSpacePoint(float(t), float(x))


def step_cost(a, b) -> float:
    """Entropy of the single step a -> b.

    Infinite when the step does not strictly advance in time.  This is
    deliberate for dt == 0 even when the two points coincide.
    """
    a, b = _coerce(a), _coerce(b)
    dt = b.t - a.t
    if dt <= 0.0:
        return math.inf
    dx = b.x - a.x
    return dx * dx / (2.0 * dt)


def entropy(points: Iterable) -> float:
    """Entropy of a path through `points` started from the origin.

    Points must be listed in nondecreasing time order; a decreasing
    time raises ValueError rather than silently returning inf, since a
    caller holding an out-of-order sequence has a bug, not a costly
    path.  The empty path has entropy 0.
    """
    total = 0.0
    prev = ORIGIN
    for raw in points:
        p = _coerce(raw)
        if p.t < prev.t:
            raise ValueError("points are not in nondecreasing time order")
        c = step_cost(prev, p)
        if c == math.inf:
            return math.inf
        total += c
        prev = p
    return total


def entropy_arrays(ts: np.ndarray, xs: np.ndarray) -> float:
    """Array form of `entropy`; same conventions, origin included."""
    ts = np.asarray(ts, dtype=np.float64)
    xs = np.asarray(xs, dtype=np.float64)
    if ts.size == 0:
        return 0.0
    if np.any(np.diff(ts) < 0):
        raise ValueError("points are not in nondecreasing time order")
    dts = np.diff(ts, prepend=0.0)
    if np.any(dts <= 0.0):
        return math.inf
    dxs = np.diff(xs, prepend=0.0)
    return float(np.sum(dxs * dxs / (2.0 * dts)))


def canonical_order(points: Sequence) -> list[TimeSpacePoint]:
    """Sort points by (t, x), ties broken by original position.

    This is the order every solver uses internally, and the order in
    which witnesses are reported.
    """
    pts = [_coerce(p) for p in points]
    idx = sorted(range(len(pts)), key=lambda i: (pts[i].t, pts[i].x, i))
    return [pts[i] for i in idx]


@dataclass(frozen=True)
class DeltaPath:
    """An increasing path with its entropy cached at construction.

    `points` are strictly increasing in time; solvers never emit
    equal-time witnesses because those have infinite entropy.
    """

    points: tuple[TimeSpacePoint, ...]
    entropy: float

    @classmethod
    def from_points(cls, points: Iterable) -> "DeltaPath":
        pts = tuple(_coerce(p) for p in points)
        return cls(points=pts, entropy=entropy(pts))

    def __len__(self) -> int:
        return len(self.points)


EMPTY_PATH = DeltaPath(points=(), entropy=0.0)
