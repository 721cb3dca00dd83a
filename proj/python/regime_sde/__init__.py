"""Regime-switching SDEs whose volatility regime is chosen by their own law."""

from ._core import (
    Error,
    LevelProblem,
    ParseError,
    Problem,
    Schedule,
    branch_phi,
    build_schedule,
    check_assumptions,
    classify_level,
    delay_phi,
    explosion,
    gaussian,
    infinitely_many,
    linear,
    logdrift,
    no_local_solution,
    oscillation,
    oscillation_flips,
    simulate_exact,
    simulate_particles,
    std_normal_cdf,
    std_normal_quantile,
    two_solutions,
)

__all__ = [name for name in dir() if not name.startswith("_")]
