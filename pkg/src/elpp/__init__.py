"""Entropy-controlled last passage percolation.

Exact solvers for the budgeted point-collection problem and its
variational (energy minus entropy) relaxation, closed-form and Monte
Carlo volume checks for the entropy ball, and a replica-parallel
experiment engine with reproducible seeding.
"""

from .core import (
    Box,
    DeltaPath,
    EMPTY_PATH,
    ORIGIN,
    TimeSpacePoint,
    canonical_order,
    entropy,
    entropy_arrays,
    step_cost,
)
from .environment import (
    GENERATOR_ID,
    Environment,
    SeedSpec,
    derive_lane,
    derive_stream,
    m_of,
    sample_lattice_cloud,
    sample_lattice_field,
    sample_ppp_ordered,
    sample_uniform_cloud,
)
from .solver import (
    ElppResult,
    ParetoFrontier,
    brute_force_elpp,
    build_frontier,
    canonical_arrays,
    elpp_value,
    min_entropy_for_count,
    value_only,
)
from .variational import (
    BetaSweep,
    MaximizerReport,
    VariationalResult,
    beta_sweep,
    brute_force_variational,
    check_maximizer_unique,
    continuum_T_truncated,
    solve_tail,
    solve_variational,
)
from .volume import (
    VolumeEstimate,
    count_bound_discrete,
    count_exact_discrete,
    entropy_body_constant,
    volume_exact,
    volume_exact_log,
    volume_mc,
)
from .experiments import (
    BlowupResult,
    ConvergenceResult,
    ExperimentRecord,
    ScalingResult,
    SummaryStats,
    TailResult,
    TruncationResult,
    csv_lines,
    default_threads,
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

__version__ = "0.1.0"

__all__ = [
    "Box", "DeltaPath", "EMPTY_PATH", "ORIGIN", "TimeSpacePoint",
    "canonical_order", "entropy", "entropy_arrays", "step_cost",
    "GENERATOR_ID", "Environment", "SeedSpec", "derive_lane",
    "derive_stream", "m_of", "sample_lattice_cloud",
    "sample_lattice_field", "sample_ppp_ordered", "sample_uniform_cloud",
    "ElppResult", "ParetoFrontier", "brute_force_elpp", "build_frontier",
    "canonical_arrays", "elpp_value", "min_entropy_for_count",
    "value_only",
    "BetaSweep", "MaximizerReport", "VariationalResult", "beta_sweep",
    "brute_force_variational", "check_maximizer_unique",
    "continuum_T_truncated", "solve_tail", "solve_variational",
    "VolumeEstimate", "count_bound_discrete", "count_exact_discrete",
    "entropy_body_constant", "volume_exact", "volume_exact_log",
    "volume_mc",
    "BlowupResult", "ConvergenceResult", "ExperimentRecord",
    "ScalingResult", "SummaryStats", "TailResult", "TruncationResult",
    "csv_lines", "default_threads", "jsonl_lines", "ks_two_sample",
    "lattice_beta", "run_blowup_demo", "run_convergence_experiment",
    "run_scaling_experiment", "run_tail_experiment",
    "run_truncation_experiment", "summarize", "tail_slope",
    "write_jsonl", "write_summary_csv",
    "__version__",
]
