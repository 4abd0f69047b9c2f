"""Random environments: seeded point clouds and heavy-tailed fields.

Seeding discipline
------------------
Every sampler takes a SeedSpec (master_seed, stream_index) and derives
an independent PCG64 generator through numpy's SeedSequence with
spawn_key = (stream_index,).  Replicated experiments assign
stream_index = replica index, so any replica can be regenerated in
isolation and results never depend on execution order.

Draw order inside each sampler is part of the output contract and is
documented per function; changing it changes byte-level outputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Box

__all__ = [
    "GENERATOR_ID",
    "SeedSpec",
    "Environment",
    "derive_stream",
    "derive_lane",
    "sample_uniform_cloud",
    "sample_lattice_cloud",
    "sample_lattice_field",
    "sample_ppp_ordered",
    "m_of",
]

GENERATOR_ID = "numpy-pcg64/seedsequence-spawnkey-v1"

# Above this many sites the field sampler switches to the top-k order
# statistic construction; full materialization is refused at >= 1e8.
_FULL_FIELD_AUTO = 4_000_000
_FULL_FIELD_HARD = 100_000_000


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if not (0 <= int(self.master_seed) < 2**64):
            raise ValueError("master_seed must lie in [0, 2^64)")
        if not (0 <= int(self.stream_index) < 2**64):
            raise ValueError("stream_index must lie in [0, 2^64)")

    def child(self, stream_index: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_index)


def derive_stream(seed: SeedSpec) -> np.random.Generator:
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(seed.stream_index,))
    return np.random.Generator(np.random.PCG64(ss))


def derive_lane(seed: SeedSpec, lane: int) -> np.random.Generator:
    """Substream `lane` of a replica stream.

    Two-level spawn keys never collide with the single-level keys of
    derive_stream, so lanes are independent of every replica stream.
    Samplers that must stay prefix-stable in their size argument give
    each drawn quantity its own lane.
    """
    ss = np.random.SeedSequence(
        seed.master_seed, spawn_key=(seed.stream_index, lane)
    )
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True, eq=False)
class Environment:
    """A sampled environment: weighted points inside a box.

    Entries are stored as parallel arrays sorted by nonincreasing
    weight; `alpha` is None for unweighted clouds (all weights 1).
    """

    kind: str
    box: Box
    seed: SeedSpec
    weights: np.ndarray
    ts: np.ndarray
    xs: np.ndarray
    alpha: Optional[float] = None
    method: Optional[str] = None

    def __post_init__(self):
        w, t, x = self.weights, self.ts, self.xs
        if not (len(w) == len(t) == len(x)):
            raise ValueError("entry arrays must have equal length")
        if len(w) > 1 and np.any(np.diff(w) > 0):
            raise ValueError("weights must be nonincreasing")
        if np.any(t < 0) or np.any(np.abs(x) > self.box.x_max) or np.any(t > self.box.t_max):
            raise ValueError("entries outside box")
        if self.box.mode == "lattice":
            if np.any(t < 1) or np.any(t != np.floor(t)) or np.any(x != np.floor(x)):
                raise ValueError("lattice entries must be integer with t >= 1")

    def __len__(self) -> int:
        return len(self.weights)

    def to_json(self) -> str:
        """Serialize with floats at 17 significant digits (lossless)."""
        def f(v: float) -> str:
            return format(float(v), ".17g")

        entries = ",".join(
            f"[{f(w)},{f(t)},{f(x)}]"
            for w, t, x in zip(self.weights, self.ts, self.xs)
        )
        box = (
            f'{{"mode":"{self.box.mode}","t_max":{f(self.box.t_max)},'
            f'"x_max":{f(self.box.x_max)}}}'
        )
        alpha = "null" if self.alpha is None else f(self.alpha)
        method = "" if self.method is None else f',"method":"{self.method}"'
        seed = (
            f'{{"master":{self.seed.master_seed},'
            f'"stream":{self.seed.stream_index}}}'
        )
        return (
            f'{{"kind":"{self.kind}","box":{box},"alpha":{alpha},'
            f'"seed":{seed},"generator":"{GENERATOR_ID}"{method},'
            f'"entries":[{entries}]}}'
        )

    @classmethod
    def from_json(cls, text: str) -> "Environment":
        doc = json.loads(text)
        box = Box(doc["box"]["mode"], doc["box"]["t_max"], doc["box"]["x_max"])
        entries = np.asarray(doc["entries"], dtype=np.float64)
        if entries.size == 0:
            entries = entries.reshape(0, 3)
        return cls(
            kind=doc["kind"],
            box=box,
            seed=SeedSpec(doc["seed"]["master"], doc["seed"]["stream"]),
            weights=entries[:, 0].copy(),
            ts=entries[:, 1].copy(),
            xs=entries[:, 2].copy(),
            alpha=doc.get("alpha"),
            method=doc.get("method"),
        )


def sample_uniform_cloud(m: int, box: Box, seed: SeedSpec) -> Environment:
    """m unweighted points uniform on [0, t_max] x [-x_max, x_max].

    Draw order: the m times as one block, then the m positions.
    """
    if box.mode != "continuous":
        raise ValueError("uniform cloud requires a continuous box")
    if m < 0:
        raise ValueError("m must be nonnegative")
    rng = derive_stream(seed)
    ts = rng.random(m) * box.t_max
    xs = (rng.random(m) * 2.0 - 1.0) * box.x_max
    return Environment(
        kind="uniform-cloud", box=box, seed=seed,
        weights=np.ones(m), ts=ts, xs=xs,
    )


def _sites_without_replacement(rng: np.random.Generator, n_sites: int, k: int) -> np.ndarray:
    """k distinct site indices, uniform among all k-subsets.

    Partial Fisher-Yates over a virtual 0..n_sites-1 array; only the
    touched slots are stored, so memory is O(k) regardless of n_sites.
    Draw order: one vectorized integers() call of length k.
    """
    if k > n_sites:
        raise ValueError(f"cannot draw {k} distinct sites from {n_sites}")
    js = rng.integers(np.arange(k, dtype=np.int64), n_sites)
    swap: dict[int, int] = {}
    out = np.empty(k, dtype=np.int64)
    for i in range(k):
        j = int(js[i])
        vi = swap.get(i, i)
        vj = swap.get(j, j)
        out[i] = vj
        swap[j] = vi
    return out


def _decode_sites(idx: np.ndarray, box: Box) -> tuple[np.ndarray, np.ndarray]:
    # site index = (t - 1) * (2 h + 1) + (x + h), row-major in t then x
    h = int(box.x_max)
    width = 2 * h + 1
    ts = (idx // width + 1).astype(np.float64)
    xs = (idx % width - h).astype(np.float64)
    return ts, xs


def sample_lattice_cloud(m: int, box: Box, seed: SeedSpec) -> Environment:
    """m unweighted points on distinct lattice sites, uniform among subsets.

    Draw order: one vectorized integers() call (Fisher-Yates indices).
    Entries keep the sampled order; weights are all 1 so any order is
    canonical enough.
    """
    if box.mode != "lattice":
        raise ValueError("lattice cloud requires a lattice box")
    rng = derive_stream(seed)
    idx = _sites_without_replacement(rng, box.site_count, m)
    ts, xs = _decode_sites(idx, box)
    return Environment(
        kind="lattice-cloud", box=box, seed=seed,
        weights=np.ones(m), ts=ts, xs=xs,
    )


def sample_lattice_field(
    box: Box, alpha: float, seed: SeedSpec, top_k: int, method: str = "auto"
) -> Environment:
    """Top `top_k` values of an i.i.d. Pareto(alpha) field on the lattice.

    Each site carries omega = (1 - U)^(-1/alpha), so P(omega > y) =
    y^(-alpha) for y >= 1.  Only the top_k heaviest entries are
    returned, sorted by decreasing weight.

    method='full' draws one uniform per site (refused at >= 1e8 sites).
    method='order-statistic' draws the joint law of the top k order
    statistics directly: with Gamma_j = E_1 + ... + E_j partial sums of
    unit exponentials and Gamma_{N+1} = Gamma_k + Gamma(N + 1 - k), the
    j-th smallest uniform is Gamma_j / Gamma_{N+1} and the j-th largest
    weight is (Gamma_j / Gamma_{N+1})^(-1/alpha).  Locations are then a
    uniform k-subset of sites.  Both methods sample the same law.

    Draw order, order-statistic branch: top_k uniforms (exponentials
    via -log1p(-U)), one gamma variate, then the location indices.
    """
    if box.mode != "lattice":
        raise ValueError("field requires a lattice box")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n_sites = box.site_count
    if top_k < 0 or top_k > n_sites:
        raise ValueError("top_k out of range")
    if method == "auto":
        method = "order-statistic" if n_sites > _FULL_FIELD_AUTO else "full"
    if method not in ("full", "order-statistic"):
        raise ValueError(f"unknown field method {method!r}")
    if method == "full" and n_sites >= _FULL_FIELD_HARD:
        raise ValueError("full field materialization refused at >= 1e8 sites")
    rng = derive_stream(seed)

    if method == "full":
        u = rng.random(n_sites)
        w_all = (1.0 - u) ** (-1.0 / alpha)
        part = np.argpartition(-w_all, top_k - 1)[:top_k] if top_k else np.empty(0, np.int64)
        order = np.lexsort((part, -w_all[part]))
        idx = part[order]
        weights = w_all[idx]
    else:
        u = rng.random(top_k)
        gammas = np.cumsum(-np.log1p(-u))
        tail = rng.gamma(shape=float(n_sites + 1 - top_k), scale=1.0) if top_k < n_sites else 0.0
        total = (gammas[-1] if top_k else 0.0) + tail
        weights = (gammas / total) ** (-1.0 / alpha) if top_k else np.empty(0)
        idx = _sites_without_replacement(rng, n_sites, top_k)
    ts, xs = _decode_sites(idx, box)
    return Environment(
        kind="lattice-field", box=box, seed=seed,
        weights=np.asarray(weights, dtype=np.float64), ts=ts, xs=xs,
        alpha=float(alpha), method=method,
    )


def sample_ppp_ordered(ell: int, alpha: float, q: float, seed: SeedSpec) -> Environment:
    """Top `ell` atoms of the limiting heavy-tail point process on
    [0, 1] x [-q, q].

    Weights are M_i = (2 q)^(1/alpha) (E_1 + ... + E_i)^(-1/alpha)
    with E_j unit exponentials, automatically decreasing in i;
    locations are i.i.d. uniform on the strip.

    Exponentials, times and positions come from three separate lanes
    of the seed, so the sample is prefix-stable: at a fixed seed the
    first ell' atoms agree for every ell >= ell'.  Truncation
    comparisons at the same seed are therefore nested, and the value
    of the downstream maximization is nondecreasing in ell.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if q <= 0:
        raise ValueError("q must be positive")
    if ell < 0:
        raise ValueError("ell must be nonnegative")
    u = derive_lane(seed, 0).random(ell)
    gammas = np.cumsum(-np.log1p(-u))
    weights = (2.0 * q) ** (1.0 / alpha) * gammas ** (-1.0 / alpha)
    ts = derive_lane(seed, 1).random(ell)
    xs = (derive_lane(seed, 2).random(ell) * 2.0 - 1.0) * q
    return Environment(
        kind="ppp", box=Box("continuous", 1.0, q), seed=seed,
        weights=weights, ts=ts, xs=xs, alpha=float(alpha),
    )


def m_of(x: float, alpha: float) -> float:
    """Tail quantile scale m(x) = x^(1/alpha) of the Pareto field."""
    if x < 1:
        raise ValueError("m_of is defined for x >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    return float(x) ** (1.0 / alpha)
