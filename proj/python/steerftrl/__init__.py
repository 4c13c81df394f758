"""Steering analysis for finite games with regularized learners."""

from steerftrl._core import (
    FiniteGame,
    GuardError,
    PointCloud,
    RegularizerBundle,
    SpecParseError,
    SteeringPlan,
    StrategyProfile,
    attainable_cloud,
    coverage,
    equivalence_check,
    eta_fields,
    greedy_steer_multi,
    lie_rank_sample,
    make_builtin,
    monotone_witness,
    multi_player_verdict,
    neutralizer_lp,
    parse_spec_text,
    plan_two_player,
    projected_rank,
    simplex_lattice,
    simulate,
    two_player_verdict,
    uniform_neutralizer,
    verify_plan,
    witness_monotonicity,
)

__all__ = [
    "FiniteGame",
    "GuardError",
    "PointCloud",
    "RegularizerBundle",
    "SpecParseError",
    "SteeringPlan",
    "StrategyProfile",
    "attainable_cloud",
    "coverage",
    "equivalence_check",
    "eta_fields",
    "greedy_steer_multi",
    "lie_rank_sample",
    "make_builtin",
    "monotone_witness",
    "multi_player_verdict",
    "neutralizer_lp",
    "parse_spec_text",
    "plan_two_player",
    "projected_rank",
    "simplex_lattice",
    "simulate",
    "two_player_verdict",
    "uniform_neutralizer",
    "verify_plan",
    "witness_monotonicity",
]

__version__ = "0.1.0"
