"""Reliability-thresholded coverage metrics for sampled completion logs.

Computes cover@tau (the fraction of tasks solvable with per-trial success
probability at least tau), pass@k in both exact-profile and unbiased-subset
form, maj@n / cons@n consensus scores, and excess-AUC dominance comparisons
between models — with the step-curve algebra carried out in exact rational
arithmetic.
"""

__version__ = "0.1.0"

from .curves import (
    CoverCurve,
    PassCurve,
    beta_mass_below,
    beta_weighted_pass,
    build_cover_curve,
    export_curve,
    fraction_nonzero,
    pass_curve,
    uniform_auc,
)
from .dominance import (
    CrossoverResult,
    DominanceReport,
    auc_plus_cover,
    avg_auc_plus,
    bootstrap_bands,
    check_cover_dominance,
    dominance_report,
    find_crossover,
    rank_models,
)
from .ingest import (
    ParseError,
    RunManifest,
    apply_grading,
    build_manifest,
    canonical_answer,
    counts_from_log,
    grade,
    load_run,
    parse_gold,
    parse_records,
    persist_run,
)
from .metrics import (
    aggregate,
    cons_at_n,
    cover_at_tau,
    estimate_success,
    maj_at_n,
    majority_threshold,
    pass_at_k_exact,
    pass_at_k_unbiased,
)
from .records import GoldAnswer, SampleRecord, SuccessProfile, TaskCounts, as_unit_rational
from .synth import (
    GuesserSpec,
    ProfileSpec,
    make_profile,
    simulate_completions,
    simulate_guesser,
    toy_model_a,
    toy_model_b,
)

__all__ = [
    "__version__",
    "CoverCurve",
    "PassCurve",
    "beta_mass_below",
    "beta_weighted_pass",
    "build_cover_curve",
    "export_curve",
    "fraction_nonzero",
    "pass_curve",
    "uniform_auc",
    "CrossoverResult",
    "DominanceReport",
    "auc_plus_cover",
    "avg_auc_plus",
    "bootstrap_bands",
    "check_cover_dominance",
    "dominance_report",
    "find_crossover",
    "rank_models",
    "ParseError",
    "RunManifest",
    "apply_grading",
    "build_manifest",
    "canonical_answer",
    "counts_from_log",
    "grade",
    "load_run",
    "parse_gold",
    "parse_records",
    "persist_run",
    "aggregate",
    "cons_at_n",
    "cover_at_tau",
    "estimate_success",
    "maj_at_n",
    "majority_threshold",
    "pass_at_k_exact",
    "pass_at_k_unbiased",
    "GoldAnswer",
    "SampleRecord",
    "SuccessProfile",
    "TaskCounts",
    "as_unit_rational",
    "GuesserSpec",
    "ProfileSpec",
    "make_profile",
    "simulate_completions",
    "simulate_guesser",
    "toy_model_a",
    "toy_model_b",
]
