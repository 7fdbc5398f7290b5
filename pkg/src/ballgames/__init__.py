"""Adaptive majority/plurality query games over colored balls.

An oracle answers size-q queries about a hidden coloring with NO or with
one ball of the winning class; the solvers locate a non-minority or
almost-plurality ball (or certify none exists) in a linear number of
queries, and the harness verifies every claim against the ground truth.
"""

from .algorithms import (
    AlgorithmParams,
    SolveResult,
    brute_force_fallback,
    mb_even_c_colors,
    mb_odd_c_colors,
    mb_odd_two_colors,
    operative_threshold,
    plurality_solve,
    route_solver,
    solve,
)
from .harness import (
    ExperimentRecord,
    Verdict,
    exhaustive_adversary_check,
    planted_coloring,
    random_coloring,
    replay_bundle,
    run_experiment,
    run_single,
    verify,
)
from .model import (
    Answer,
    BallStatus,
    GameConfig,
    HiddenColoring,
    Query,
    QueryKind,
    Target,
    Transcript,
    classify_ball,
    dump_coloring,
    largest_classes,
    load_coloring,
)
from .oracle import (
    OracleSession,
    PresentationPolicy,
    answer_majority,
    answer_plurality,
    enumerate_valid_answers,
    make_policy,
)
from .toolkit import (
    ComparisonOutcome,
    Completed,
    HaltedAtNo,
    InferenceError,
    ambiguous_median,
    find_opposite_k_sets,
    solve_small_nonminority,
    winner_out,
)

__all__ = [
    "AlgorithmParams",
    "Answer",
    "BallStatus",
    "ComparisonOutcome",
    "Completed",
    "ExperimentRecord",
    "GameConfig",
    "HaltedAtNo",
    "HiddenColoring",
    "InferenceError",
    "OracleSession",
    "PresentationPolicy",
    "Query",
    "QueryKind",
    "SolveResult",
    "Target",
    "Transcript",
    "Verdict",
    "ambiguous_median",
    "answer_majority",
    "answer_plurality",
    "brute_force_fallback",
    "classify_ball",
    "dump_coloring",
    "enumerate_valid_answers",
    "exhaustive_adversary_check",
    "find_opposite_k_sets",
    "largest_classes",
    "load_coloring",
    "make_policy",
    "mb_even_c_colors",
    "mb_odd_c_colors",
    "mb_odd_two_colors",
    "operative_threshold",
    "planted_coloring",
    "plurality_solve",
    "random_coloring",
    "replay_bundle",
    "route_solver",
    "run_experiment",
    "run_single",
    "solve",
    "solve_small_nonminority",
    "verify",
    "winner_out",
]

__version__ = "0.1.0"
