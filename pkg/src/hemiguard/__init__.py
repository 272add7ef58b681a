"""Perimeter defense on a hemisphere: solver, barrier, and simulator.

A single defender moves on the unit hemisphere while an intruder drives on
the ground plane toward the perimeter circle.  The package solves the
intruder's optimal breaching problem, draws the barrier separating the
winning regions, and integrates the closed-loop game under interchangeable
strategies.
"""
from .barrier import (
    BarrierCurve,
    BarrierSample,
    RegionLabel,
    barrier_curve,
    barrier_point,
    classify,
    curvature,
    level_set,
)
from .breach_solver import (
    BreachSolution,
    SolverBracket,
    approach_angle,
    optimal_payoff,
    oracle_solve,
    solve,
    theta_residual,
)
from .dynamics import (
    Control,
    ControlLaw,
    DefenderControl,
    IntruderControl,
    Strategy,
    TerminalEvent,
    TerminalKind,
    check_terminal,
    fixed_defender,
    fixed_intruder,
    integrate_step,
    optimal_defender,
    optimal_defender_strategy,
    optimal_intruder,
    optimal_intruder_strategy,
    random_defender,
    random_intruder,
    state_derivative,
    stationary_defender,
    stationary_intruder,
)
from .errors import (
    AmbiguousTerminal,
    DegenerateApproach,
    GameError,
    LevelSetInsidePerimeter,
    NoBracket,
    PoleSingularity,
    SingularCurvature,
)
from .geometry import (
    DefenderState,
    GameParams,
    GameState,
    IntruderState,
    chord_from_approach,
    defender_target_time,
    intruder_target_time,
    normalize_angle,
    payoff,
    relative_state,
)
from .simulation import (
    NashReport,
    NashRun,
    ScenarioSpec,
    Trajectory,
    nash_check,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousTerminal",
    "BarrierCurve",
    "BarrierSample",
    "BreachSolution",
    "Control",
    "ControlLaw",
    "DefenderControl",
    "DefenderState",
    "DegenerateApproach",
    "GameError",
    "GameParams",
    "GameState",
    "IntruderControl",
    "IntruderState",
    "LevelSetInsidePerimeter",
    "NashReport",
    "NashRun",
    "NoBracket",
    "PoleSingularity",
    "RegionLabel",
    "ScenarioSpec",
    "SingularCurvature",
    "SolverBracket",
    "Strategy",
    "TerminalEvent",
    "TerminalKind",
    "Trajectory",
    "approach_angle",
    "barrier_curve",
    "barrier_point",
    "chord_from_approach",
    "check_terminal",
    "classify",
    "curvature",
    "defender_target_time",
    "fixed_defender",
    "fixed_intruder",
    "integrate_step",
    "intruder_target_time",
    "level_set",
    "nash_check",
    "normalize_angle",
    "optimal_defender",
    "optimal_defender_strategy",
    "optimal_intruder",
    "optimal_intruder_strategy",
    "optimal_payoff",
    "oracle_solve",
    "payoff",
    "random_defender",
    "random_intruder",
    "relative_state",
    "run",
    "solve",
    "state_derivative",
    "stationary_defender",
    "stationary_intruder",
    "theta_residual",
]
