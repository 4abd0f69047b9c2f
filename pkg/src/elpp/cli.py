"""Command line front end: one executable, one subcommand per capability.

Subcommands expose the samplers (`sample`), the budgeted solver
(`lpp`), the variational solver (`var`), the entropy-body volume
checks (`volume`), the replica experiments (`exp`), and a built-in
oracle-equivalence suite (`selftest`).  Every randomized command
either receives a master seed or generates one, prints it on the
diagnostic stream, and records it in the output metadata, so no
invocation is silently nondeterministic.

Exit codes: 0 success, 1 contract violation (bad flags, bad config,
domain errors), 2 I/O failure.  Errors are a single JSON line on
stderr.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from . import __version__
from .core import Box
from .environment import (
    GENERATOR_ID,
    Environment,
    SeedSpec,
    sample_lattice_cloud,
    sample_lattice_field,
    sample_ppp_ordered,
    sample_uniform_cloud,
)
from .solver import brute_force_elpp, elpp_value, min_entropy_for_count, value_only
from .variational import (
    beta_sweep,
    brute_force_variational,
    solve_tail,
    solve_variational,
)
from .volume import volume_mc
from .experiments import (
    _fmt,
    csv_lines,
    default_threads,
    jsonl_lines,
    run_blowup_demo,
    run_convergence_experiment,
    run_scaling_experiment,
    run_tail_experiment,
    run_truncation_experiment,
)

__all__ = ["main", "cli_main", "CliError"]

_CONFIG_KEYS = {"subcommand", "params", "master_seed", "output", "format"}


class CliError(Exception):
    """Contract violation surfaced to the user; carries the exit code."""

    def __init__(self, exit_code: int, message: str):
        super().__init__(message)
        self.exit_code = exit_code
        self.message = message


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract wants 1
    def error(self, message):
        raise CliError(1, message)


# ---------------------------------------------------------------------------
# typed parameters

def _int(v) -> int:
    if isinstance(v, bool):
        raise CliError(1, f"expected integer, got {v!r}")
    if isinstance(v, int):
        return v
    if isinstance(v, float) and v == int(v):
        return int(v)
    try:
        return int(str(v), 10)
    except ValueError:
        raise CliError(1, f"expected integer, got {v!r}") from None


def _real(v) -> float:
    if isinstance(v, bool):
        raise CliError(1, f"expected real, got {v!r}")
    if isinstance(v, (int, float)):
        return float(v)
    try:
        return float(str(v))
    except ValueError:
        raise CliError(1, f"expected real, got {v!r}") from None


def _text(v) -> str:
    if not isinstance(v, str):
        raise CliError(1, f"expected string, got {v!r}")
    return v


def _ints(v) -> tuple:
    if isinstance(v, str):
        v = [s for s in v.split(",") if s.strip()]
    if not isinstance(v, (list, tuple)):
        raise CliError(1, f"expected comma-separated integers, got {v!r}")
    return tuple(_int(x) for x in v)


def _reals(v) -> tuple:
    if isinstance(v, str):
        v = [s for s in v.split(",") if s.strip()]
    if not isinstance(v, (list, tuple)):
        raise CliError(1, f"expected comma-separated reals, got {v!r}")
    return tuple(_real(x) for x in v)


@dataclass(frozen=True)
class Param:
    name: str
    cast: Callable
    default: object
    help: str


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def _show(default) -> str:
    if isinstance(default, tuple):
        return ",".join(str(v) for v in default)
    return str(default)


def _add_params(parser: argparse.ArgumentParser, params: Iterable[Param]) -> None:
    seen = set()
    for p in params:
        if p.name in seen:
            continue
        seen.add(p.name)
        text = p.help if p.default is None else f"{p.help} (default: {_show(p.default)})"
        parser.add_argument(_flag(p.name), dest=p.name, default=None, help=text)


def _resolve_params(
    params: Sequence[Param], args: argparse.Namespace, config: dict
) -> tuple[dict, set]:
    """Merge flag > config > default; reject config keys off the table."""
    names = {p.name for p in params}
    unknown = set(config) - names
    if unknown:
        raise CliError(1, f"unknown config params: {', '.join(sorted(unknown))}")
    explicit = set()
    eff = {}
    for p in params:
        v = getattr(args, p.name, None)
        if v is not None:
            explicit.add(p.name)
        elif p.name in config:
            v = config[p.name]
            explicit.add(p.name)
        else:
            v = p.default
        eff[p.name] = None if v is None else p.cast(v)
    return eff, explicit


def _require(eff: dict, *names: str) -> None:
    missing = [n for n in names if eff.get(n) is None]
    if missing:
        raise CliError(1, f"missing required parameter(s): {', '.join(missing)}")


# ---------------------------------------------------------------------------
# config / seed / output plumbing

def _load_config(path: Optional[str], subcommand: str) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CliError(1, f"config is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise CliError(1, "config must be a JSON object")
    unknown = set(doc) - _CONFIG_KEYS
    if unknown:
        raise CliError(1, f"unknown config keys: {', '.join(sorted(unknown))}")
    got = doc.get("subcommand")
    if got is not None and got != subcommand:
        raise CliError(1, f"config subcommand {got!r} does not match {subcommand!r}")
    if "params" in doc and not isinstance(doc["params"], dict):
        raise CliError(1, "config params must be a mapping")
    return doc


def _resolve_seed(args: argparse.Namespace, config: dict) -> int:
    if getattr(args, "seed", None) is not None:
        return _int(args.seed)
    if config.get("master_seed") is not None:
        return _int(config["master_seed"])
    master = secrets.randbits(63)
    sys.stderr.write(_fmt({"generated_master_seed": master}) + "\n")
    return master


def _resolve_out(args: argparse.Namespace, config: dict) -> Optional[str]:
    if getattr(args, "out", None) is not None:
        return args.out
    return config.get("output")


def _resolve_format(
    args: argparse.Namespace, config: dict, default: str, allowed: tuple
) -> str:
    fmt = getattr(args, "format", None) or config.get("format") or default
    if fmt not in allowed:
        raise CliError(1, f"format {fmt!r} not supported here (allowed: {', '.join(allowed)})")
    return fmt


def _emit(lines: Iterable[str], out: Optional[str]) -> None:
    if out is None or out == "-":
        for line in lines:
            sys.stdout.write(line + "\n")
    else:
        with open(out, "w") as fh:
            for line in lines:
                fh.write(line + "\n")


def _doc_lines(subcommand: str, params: dict, outputs: dict) -> list:
    doc = {
        "version": __version__,
        "subcommand": subcommand,
        "params": params,
        "outputs": outputs,
    }
    return [_fmt(doc)]


def _load_env(path: str) -> Environment:
    with open(path) as fh:
        text = fh.read()
    try:
        return Environment.from_json(text)
    except (json.JSONDecodeError, KeyError, IndexError, ValueError) as e:
        raise CliError(1, f"bad environment file {path}: {e}") from None


def _points(path) -> list:
    return [[p.t, p.x] for p in path.points]


# ---------------------------------------------------------------------------
# subcommands

_SAMPLE_PARAMS = (
    Param("kind", _text, None, "sampler: uniform | lattice | lattice-field | ppp"),
    Param("m", _int, 100, "cloud size (uniform, lattice)"),
    Param("t_max", _real, 1.0, "continuous box time span"),
    Param("x_max", _real, 1.0, "continuous box half-width"),
    Param("n", _int, 64, "lattice time depth"),
    Param("half_width", _int, 64, "lattice half-width h"),
    Param("alpha", _real, 1.0, "Pareto tail index (lattice-field, ppp)"),
    Param("top_k", _int, 100, "entries kept from the lattice field"),
    Param("ell", _int, 100, "atoms kept from the PPP"),
    Param("q", _real, 8.0, "continuum strip half-width (ppp)"),
)


def _cmd_sample(args, config) -> int:
    eff, _ = _resolve_params(_SAMPLE_PARAMS, args, config.get("params", {}))
    _require(eff, "kind")
    master = _resolve_seed(args, config)
    seed = SeedSpec(master, 0)
    kind = eff["kind"]
    if kind == "uniform":
        env = sample_uniform_cloud(eff["m"], Box("continuous", eff["t_max"], eff["x_max"]), seed)
    elif kind == "lattice":
        env = sample_lattice_cloud(eff["m"], Box("lattice", eff["n"], eff["half_width"]), seed)
    elif kind == "lattice-field":
        env = sample_lattice_field(
            Box("lattice", eff["n"], eff["half_width"]), eff["alpha"], seed, eff["top_k"]
        )
    elif kind == "ppp":
        env = sample_ppp_ordered(eff["ell"], eff["alpha"], eff["q"], seed)
    else:
        raise CliError(1, f"unknown sampler kind {kind!r}")
    _resolve_format(args, config, "json", ("json",))
    _emit([env.to_json()], _resolve_out(args, config))
    return 0


_LPP_PARAMS = (
    Param("env", _text, None, "environment JSON file"),
    Param("budget", _real, None, "entropy budget (value mode)"),
    Param("count", _int, None, "target count (min-entropy mode)"),
)


def _cmd_lpp(args, config) -> int:
    eff, _ = _resolve_params(_LPP_PARAMS, args, config.get("params", {}))
    _require(eff, "env")
    if (eff["budget"] is None) == (eff["count"] is None):
        raise CliError(1, "exactly one of --budget and --count is required")
    env = _load_env(eff["env"])
    if eff["budget"] is not None:
        res = elpp_value(env, eff["budget"])
        outputs = {
            "value": res.value,
            "witness": _points(res.witness),
            "witness_entropy": res.witness.entropy,
        }
    else:
        outputs = {
            "count": eff["count"],
            "min_entropy": min_entropy_for_count(env, eff["count"]),
        }
    _resolve_format(args, config, "json", ("json",))
    _emit(_doc_lines("lpp", eff, outputs), _resolve_out(args, config))
    return 0


_VAR_PARAMS = (
    Param("env", _text, None, "environment JSON file"),
    Param("beta", _real, None, "inverse temperature"),
    Param("ell", _int, None, "restrict to the ell heaviest entries"),
    Param("tail_ell", _int, None, "solve over entries beyond this prefix instead"),
    Param("sweep", _reals, None, "comma-separated ascending beta grid"),
)


def _cmd_var(args, config) -> int:
    eff, _ = _resolve_params(_VAR_PARAMS, args, config.get("params", {}))
    _require(eff, "env")
    env = _load_env(eff["env"])
    if eff["sweep"] is not None:
        if eff["beta"] is not None or eff["tail_ell"] is not None:
            raise CliError(1, "--sweep excludes --beta and --tail-ell")
        sw = beta_sweep(env, eff["sweep"], eff["ell"])
        outputs = {
            "betas": list(sw.betas),
            "values": list(sw.values),
            "argmax_ids": [list(ids) for ids in sw.argmax_ids],
        }
    else:
        _require(eff, "beta")
        if eff["tail_ell"] is not None:
            res = solve_tail(env, eff["beta"], eff["tail_ell"])
        else:
            res = solve_variational(env, eff["beta"], eff["ell"])
        outputs = {
            "value": res.value,
            "beta": res.beta,
            "ell_used": res.ell_used,
            "argmax_ids": list(res.argmax_ids),
            "argmax": _points(res.argmax),
            "argmax_entropy": res.argmax.entropy,
        }
    _resolve_format(args, config, "json", ("json",))
    _emit(_doc_lines("var", eff, outputs), _resolve_out(args, config))
    return 0


_VOLUME_PARAMS = (
    Param("k", _int, None, "number of collected points"),
    Param("t", _real, 1.0, "time horizon"),
    Param("B", _real, 1.0, "entropy budget"),
    Param("samples", _int, 100000, "Monte Carlo sample count"),
)


def _cmd_volume(args, config) -> int:
    eff, _ = _resolve_params(_VOLUME_PARAMS, args, config.get("params", {}))
    _require(eff, "k")
    master = _resolve_seed(args, config)
    est = volume_mc(eff["k"], eff["t"], eff["B"], eff["samples"], SeedSpec(master, 0))
    fmt = _resolve_format(args, config, "csv", ("csv", "json"))
    out = _resolve_out(args, config)
    if fmt == "csv":
        header = ("k", "t", "B", "exact", "mc_mean", "mc_stderr", "samples")
        row = (est.k, est.t, est.B, est.exact, est.mc_mean, est.mc_stderr, est.samples)
        _emit(csv_lines("volume", eff, master, header, [row]), out)
    else:
        outputs = {
            "exact": est.exact,
            "mc_mean": est.mc_mean,
            "mc_stderr": est.mc_stderr,
            "master_seed": master,
            "generator_id": GENERATOR_ID,
        }
        _emit(_doc_lines("volume", eff, outputs), out)
    return 0


_EXP_COMMON = (
    Param("name", _text, None,
          "experiment: tail | scaling | convergence | truncation | blowup"),
    Param("replicas", _int, None, "independent replicas"),
)

_EXP_PARAMS = {
    "tail": _EXP_COMMON + (
        Param("mode", _text, "continuous", "environment mode: continuous | lattice"),
        Param("m", _int, 100, "points per replica"),
        Param("budget", _real, 1.0, "entropy budget"),
        Param("t_max", _real, 1.0, "continuous time span"),
        Param("x_max", _real, 1.0, "continuous half-width"),
        Param("n", _int, 64, "lattice time depth"),
        Param("half_width", _int, 64, "lattice half-width"),
    ),
    "scaling": _EXP_COMMON + (
        Param("alpha", _real, 1.0, "Pareto tail index, in (1/2, 2)"),
        Param("betas", _reals, (2.0,), "betas compared against the rescaled T_1"),
        Param("ell", _int, 200, "atoms kept per replica"),
        Param("q", _real, 16.0, "strip half-width"),
    ),
    "convergence": _EXP_COMMON + (
        Param("alpha", _real, 1.0, "Pareto tail index, in (1/2, 2)"),
        Param("nu", _real, 1.0, "continuum coupling"),
        Param("q", _real, 8.0, "strip half-width"),
        Param("ell", _int, 50, "truncation level"),
        Param("rungs", _ints, (256, 1024, 4096), "lattice depths n, ascending"),
        Param("gamma", _real, 0.75, "mesh exponent: h = round(n^gamma)"),
    ),
    "truncation": _EXP_COMMON + (
        Param("alpha", _real, 1.0, "Pareto tail index"),
        Param("nu", _real, 1.0, "continuum coupling"),
        Param("q", _real, 8.0, "strip half-width"),
        Param("ells", _ints, (10, 20, 40, 80), "truncation levels, ascending"),
        Param("n", _int, 512, "lattice depth for the tail side"),
        Param("h", _int, None, "lattice mesh (default: round(n^0.75))"),
        Param("keep", _int, None, "field entries kept (default: 2 max(ells))"),
    ),
    "blowup": _EXP_COMMON + (
        Param("alpha", _real, 0.4, "Pareto tail index, in (0, 2)"),
        Param("beta", _real, 0.25, "inverse temperature"),
        Param("q_ladder", _reals, (2.0, 8.0, 32.0), "strip half-widths, ascending"),
        Param("ell0", _int, 25, "records kept per unit strip width"),
    ),
}

_EXP_ALL_PARAMS = tuple(
    {p.name: p for plist in _EXP_PARAMS.values() for p in plist}.values()
)


def _exp_result(name: str, eff: dict, seed: SeedSpec, threads: int):
    if name == "tail":
        if eff["mode"] == "continuous":
            box = Box("continuous", eff["t_max"], eff["x_max"])
        elif eff["mode"] == "lattice":
            box = Box("lattice", eff["n"], eff["half_width"])
        else:
            raise CliError(1, f"unknown tail mode {eff['mode']!r}")
        res = run_tail_experiment(eff["m"], eff["budget"], box, eff["replicas"], seed, threads)
        header = ("m", "budget", "mode", "replicas", "mean", "variance",
                  "ratio_mean", "ratio_second_moment", "super_geometric_k",
                  "scale") + tuple(f"q{p}" for p, _ in res.stats.quantiles)
        rows = [(eff["m"], eff["budget"], eff["mode"], eff["replicas"],
                 res.stats.mean, res.stats.variance, res.ratio_mean,
                 res.ratio_second_moment, res.super_geometric_k, res.scale)
                + tuple(v for _, v in res.stats.quantiles)]
        return res, header, rows
    if name == "scaling":
        res = run_scaling_experiment(
            eff["alpha"], eff["betas"], eff["ell"], eff["q"], eff["replicas"],
            seed, threads,
        )
        header = ("beta", "scale_factor", "ks_distance", "ks_control", "tail_slope_t1")
        rows = [(c.beta, c.scale_factor, c.ks_distance, res.ks_control, res.tail_slope_t1)
                for c in res.comparisons]
        return res, header, rows
    if name == "convergence":
        res = run_convergence_experiment(
            eff["alpha"], eff["nu"], eff["q"], eff["ell"], eff["rungs"],
            eff["replicas"], seed, eff["gamma"], threads,
        )
        header = ("n", "h", "half_width", "beta_nh", "ks_distance")
        rows = [(r.n, r.h, r.half_width, r.beta_nh, r.ks_distance) for r in res.rungs]
        return res, header, rows
    if name == "truncation":
        res = run_truncation_experiment(
            eff["alpha"], eff["nu"], eff["q"], eff["ells"], eff["replicas"],
            seed, eff["n"], eff["h"], eff["keep"], threads,
        )
        header = ("ell", "median_tail", "median_rescaled", "median_continuum")
        rows = [(e.ell, e.median_tail, e.median_rescaled, e.median_continuum)
                for e in res.per_ell]
        return res, header, rows
    if name == "blowup":
        res = run_blowup_demo(
            eff["alpha"], eff["beta"], eff["q_ladder"], eff["ell0"],
            eff["replicas"], seed, threads,
        )
        header = ("q", "ell", "median", "mean")
        rows = [(r.q, r.ell, r.median, r.mean) for r in res.rungs]
        return res, header, rows
    raise CliError(1, f"unknown experiment {name!r}")


def _cmd_exp(args, config) -> int:
    config_params = dict(config.get("params", {}))
    threads = args.threads
    if threads is None:
        threads = config_params.pop("threads", None)
    else:
        config_params.pop("threads", None)
    threads = default_threads() if threads is None else _int(threads)
    name = args.name or config_params.get("name")
    if name is None:
        raise CliError(1, "missing required parameter(s): name")
    name = _text(name)
    if name not in _EXP_PARAMS:
        raise CliError(1, f"unknown experiment {name!r}")
    eff, _ = _resolve_params(_EXP_PARAMS[name], args, config_params)
    # flags that belong to some other experiment are contract violations
    stray = {
        p.name for p in _EXP_ALL_PARAMS
        if getattr(args, p.name, None) is not None
    } - {p.name for p in _EXP_PARAMS[name]}
    if stray:
        raise CliError(1, f"parameters not accepted by {name}: {', '.join(sorted(stray))}")
    _require(eff, "replicas")
    master = _resolve_seed(args, config)
    # threads never enters the output: records are schedule-independent
    seed = SeedSpec(master, 0)
    res, header, rows = _exp_result(name, eff, seed, threads)
    fmt = _resolve_format(args, config, "jsonl", ("jsonl", "csv"))
    out = _resolve_out(args, config)
    if fmt == "jsonl":
        _emit(jsonl_lines(name, eff, master, res.records), out)
    else:
        _emit(csv_lines(name, eff, master, header, rows), out)
    return 0


def _cmd_selftest(args, config) -> int:
    from .core import entropy_arrays

    lines = []
    failures = []

    def check(suite: str, ok: bool, detail: str) -> None:
        lines.append(f"{'ok' if ok else 'FAIL'} {suite}: {detail}")
        if not ok:
            failures.append(suite)

    bad = 0
    for i in range(30):
        box = (Box("continuous", 1.0, 1.0) if i % 2 == 0
               else Box("lattice", 8, 6))
        sampler = sample_uniform_cloud if i % 2 == 0 else sample_lattice_cloud
        env = sampler(10, box, SeedSpec(900 + i, 0))
        for budget in (0.1, 1.0, 10.0):
            if value_only(env, budget) != brute_force_elpp(env, budget):
                bad += 1
    check("solver-oracle", bad == 0, f"{bad} mismatches over 90 solves")

    bad = 0
    for i in range(30):
        env = sample_ppp_ordered(8, 1.0, 4.0, SeedSpec(700 + i, 0))
        for beta in (0.5, 2.0, 8.0):
            got = solve_variational(env, beta)
            want_value, want_ids = brute_force_variational(env, beta)
            if abs(got.value - want_value) > 1e-9 or tuple(sorted(got.argmax_ids)) != want_ids:
                bad += 1
    check("variational-oracle", bad == 0, f"{bad} mismatches over 90 solves")

    bad = 0
    for i in range(10):
        env = sample_uniform_cloud(8, Box("continuous", 1.0, 1.0), SeedSpec(550 + i, 0))
        for k in range(len(env) + 1):
            thresh = min_entropy_for_count(env, k)
            for budget in (0.05, 0.5, 2.0, 20.0):
                if (thresh <= budget) != (value_only(env, budget) >= k):
                    bad += 1
    check("duality", bad == 0, f"{bad} grid points broken")

    worst = 0.0
    for k in (1, 2, 3):
        est = volume_mc(k, 1.0, 1.0, 200000, SeedSpec(77, k))
        worst = max(worst, abs(est.mc_mean - est.exact) / est.mc_stderr)
    check("volume-anchors", worst < 4.0, f"max deviation {worst:.2f} stderr")

    short = sample_ppp_ordered(30, 1.0, 8.0, SeedSpec(42, 0))
    long = sample_ppp_ordered(60, 1.0, 8.0, SeedSpec(42, 0))
    stable = (
        all(short.weights == long.weights[:30])
        and all(short.ts == long.ts[:30])
        and all(short.xs == long.xs[:30])
    )
    check("ppp-prefix-stability", stable, "first 30 atoms shared between ell=30,60")

    ent = entropy_arrays
    check("entropy-sanity", ent([1.0], [1.0]) == 0.5 and ent([0.5, 1.0], [0.0, 0.0]) == 0.0,
          "hand values hold")

    _emit(lines, _resolve_out(args, config))
    if failures:
        raise CliError(1, "selftest failures: " + ", ".join(failures))
    return 0


# ---------------------------------------------------------------------------
# driver

_THREADS_HELP = (
    "worker processes for replica parallelism (default: the "
    "ELPP_THREADS environment variable if set, else 1)"
)


def _build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="elpp", description=__doc__.splitlines()[0])
    top.add_argument("--version", action="version", version=f"elpp {__version__}")
    sub = top.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    def common(p, seeded=True):
        p.add_argument("--config", default=None,
                       help="JSON RunConfig; explicit flags override its values")
        p.add_argument("--out", default=None,
                       help="output path (default: stdout)")
        p.add_argument("--format", default=None,
                       help="output format where a choice exists")
        if seeded:
            p.add_argument("--seed", default=None,
                           help="master seed; omitted: generated, printed, recorded")

    p = sub.add_parser("sample", help="generate an environment file",
                       description="Sample an environment and emit its JSON.")
    _add_params(p, _SAMPLE_PARAMS)
    common(p)
    p.set_defaults(run=_cmd_sample)

    p = sub.add_parser("lpp", help="budgeted solver on an environment",
                       description="Maximal count under an entropy budget, "
                                   "or least entropy for a target count.")
    _add_params(p, _LPP_PARAMS)
    common(p, seeded=False)
    p.set_defaults(run=_cmd_lpp)

    p = sub.add_parser("var", help="variational solver on an environment",
                       description="Maximize beta * weight - entropy over an "
                                   "entry prefix, a tail, or a beta grid.")
    _add_params(p, _VAR_PARAMS)
    common(p, seeded=False)
    p.set_defaults(run=_cmd_var)

    p = sub.add_parser("volume", help="entropy-body volume: exact and MC",
                       description="Closed-form volume next to a Monte Carlo "
                                   "estimate with its standard error.")
    _add_params(p, _VOLUME_PARAMS)
    common(p)
    p.set_defaults(run=_cmd_volume)

    epilog = []
    for name, plist in _EXP_PARAMS.items():
        fields = ", ".join(
            f"{p.name}={_show(p.default)}" if p.default is not None else p.name
            for p in plist if p.name not in ("name",)
        )
        epilog.append(f"  {name}: {fields}")
    p = sub.add_parser(
        "exp", help="run a replica experiment",
        description="Replica experiments; records as JSON Lines, summaries as CSV.",
        epilog="experiment parameters and defaults:\n" + "\n".join(epilog),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    _add_params(p, _EXP_ALL_PARAMS)
    p.add_argument("--threads", default=None, help=_THREADS_HELP)
    common(p)
    p.set_defaults(run=_cmd_exp)

    p = sub.add_parser("selftest", help="oracle-equivalence and volume suites",
                       description="Solver vs brute force, variational vs "
                                   "exhaustive, duality, volume anchors.")
    common(p, seeded=False)
    p.set_defaults(run=_cmd_selftest)

    return top


def cli_main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(sys.argv[1:] if argv is None else list(argv))
    if getattr(args, "subcommand", None) is None:
        raise CliError(1, "a subcommand is required (see --help)")
    config = _load_config(args.config, args.subcommand)
    return args.run(args, config)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        return cli_main(argv)
    except CliError as e:
        sys.stderr.write(_fmt({"error": e.message, "exit": e.exit_code}) + "\n")
        return e.exit_code
    except OSError as e:
        sys.stderr.write(_fmt({"error": str(e), "exit": 2}) + "\n")
        return 2
    except (ValueError, AssertionError) as e:
        sys.stderr.write(_fmt({"error": str(e), "exit": 1}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
