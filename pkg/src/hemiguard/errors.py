"""Domain errors shared across the solver, barrier, and simulation layers.

Every error carries a stable ``code`` string so command-line callers can
emit machine-readable diagnostics without parsing exception text.
"""


class GameError(Exception):
    """Base class for all domain errors raised by this package."""

    code = "game-error"


class DegenerateApproach(GameError):
    """The approach angle is undefined: the defender sits on the perimeter
    (zero elevation) and the breaching point is at azimuth 0 or pi relative
    to it, where the optimality relation has no one-sided limit.
    """

    code = "degenerate-approach"


class NoBracket(GameError):
    """The breaching-angle residual does not change sign on the search
    bracket; reported loudly instead of guessing a root."""

    code = "no-bracket"


class PoleSingularity(GameError):
    """Spherical-rate evaluation at the pole with a control that demands
    azimuthal motion (cos(phi_d) ~ 0 with omega_d^2 < 1)."""

    code = "pole-singularity"


class SingularCurvature(GameError):
    """Curvature requested on a curve that is not twice differentiable in
    its parameter (defender elevation zero)."""

    code = "singular-curvature"


class LevelSetInsidePerimeter(GameError):
    """An inward payoff level set would cross below the unit perimeter."""

    code = "level-set-inside-perimeter"


class AmbiguousTerminal(GameError):
    """Breach and capture tolerances fired on the same step; the outcome is
    reported as ambiguous rather than resolved silently."""

    code = "ambiguous-terminal"
