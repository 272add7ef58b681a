"""Optimal breaching-point solver.

For a given game state the intruder picks the perimeter point it can reach
with the best time margin over the defender.  At the optimum the approach
angle ``beta`` (chord vs. perimeter tangent at the breaching point) and the
breaching azimuth ``theta`` are coupled:

    cos(beta) = nu * cos(phi_d) * sin(theta) / sqrt(1 - cos^2(phi_d) cos^2(theta))
    theta     = psi - beta + acos(cos(beta) / r)

The solver finds the unique root of the second relation on the bracket
[psi, psi + acos(1/r)] by bisection with a short Newton polish, mirroring
negative-psi states through the symmetry theta -> -theta.  A dense-grid
maximizer of the raw payoff (``oracle_solve``) provides an independent
cross-check used by the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateApproach, NoBracket
from .geometry import (
    GameParams,
    GameState,
    defender_target_time,
    intruder_target_time,
    normalize_angle,
)

BRACKET_EPS = 1e-9
DEFAULT_TOL = 1e-12

# denominator below this is treated as the undefined corner
_DEGENERATE_DEN = 1e-12
# intruder within this of the perimeter is already at its target
_ON_PERIMETER = 1e-12
# a converged "root" whose residual exceeds this is a pinched discontinuity
_RESIDUAL_ACCEPT = 1e-8


@dataclass(frozen=True)
class BreachSolution:
    """Optimal breaching geometry for one game state.

    ``theta_star`` is the breaching azimuth relative to the defender (sign
    matches the intruder side), ``beta_star`` the approach angle in
    [0, pi/2], and ``p_star = tau_d - tau_a`` the time margin (positive:
    intruder first).
    """

    theta_star: float
    beta_star: float
    breach_point_azimuth: float
    tau_d: float
    tau_a: float
    p_star: float


@dataclass(frozen=True)
class SolverBracket:
    """Search interval for the breaching-angle residual."""

    theta_lo: float
    theta_hi: float
    tol: float = DEFAULT_TOL


def approach_angle(phi_d: float, theta: float, nu: float) -> float:
    """Optimal approach angle at breaching azimuth ``theta``.

    The denominator is evaluated as ``hypot(sin(phi_d), cos(phi_d) sin(theta))``,
    which is exact where the naive ``sqrt(1 - cos^2 cos^2)`` cancels; for
    ``phi_d = 0`` this reduces to ``acos(nu)`` identically on (0, pi).

    Raises
    ------
    DegenerateApproach
        If ``phi_d = 0`` and ``theta`` is congruent to 0 mod pi, where the
        two one-sided limits disagree.
    """
    den = math.hypot(math.sin(phi_d), math.cos(phi_d) * math.sin(theta))
    if den < _DEGENERATE_DEN:
        raise DegenerateApproach(
            f"approach angle undefined at phi_d={phi_d}, theta={theta}"
        )
    arg = nu * math.cos(phi_d) * math.sin(theta) / den
    return math.acos(min(1.0, max(-1.0, arg)))


def _residual(psi: float, phi_d: float, r: float, nu: float, theta: float) -> float:
    beta = approach_angle(phi_d, theta, nu)
    return theta - (psi - beta + math.acos(math.cos(beta) / r))


def theta_residual(state: GameState, params: GameParams, theta: float) -> float:
    """Defect of the breaching-angle coupling at ``theta``; zero at the optimum."""
    return _residual(state.psi, state.phi_d, state.r, params.nu, theta)


def _bisect(psi: float, phi_d: float, r: float, nu: float,
            lo: float, hi: float, tol: float) -> float:
    # invariant: residual(lo) <= 0 <= residual(hi)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _residual(psi, phi_d, r, nu, mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=8192)
def _solve_core(psi: float, phi_d: float, r: float, nu: float,
                tol: float) -> tuple[float, float, float, float, float]:
    """Positive-side solve; returns (theta, beta, tau_d, tau_a, p)."""
    if r <= 1.0 + _ON_PERIMETER:
        # intruder already on the perimeter: it breaches where it stands
        theta = psi
        beta = approach_angle(phi_d, theta, nu)
        tau_d = defender_target_time(phi_d, theta)
        return theta, beta, tau_d, 0.0, tau_d

    theta_t = psi + math.acos(1.0 / r)
    lo = psi + BRACKET_EPS
    f_lo = _residual(psi, phi_d, r, nu, lo)
    if f_lo > 0.0:
        # root at or below psi + eps: defender at the pole (theta* = psi) and
        # the antipodal state (psi = pi) land here; the residual at psi itself
        # is <= 0 whenever a root exists
        hi = lo
        lo = psi
        if _residual(psi, phi_d, r, nu, lo) > 0.0:
            raise NoBracket(
                f"residual positive at both bracket ends for psi={psi}, "
                f"phi_d={phi_d}, r={r}, nu={nu}"
            )
    else:
        hi = theta_t
        if _residual(psi, phi_d, r, nu, hi) < 0.0:
            raise NoBracket(
                f"residual negative across [psi, theta_t] for psi={psi}, "
                f"phi_d={phi_d}, r={r}, nu={nu}"
            )

    theta = _bisect(psi, phi_d, r, nu, lo, hi, tol)
    f_theta = _residual(psi, phi_d, r, nu, theta)

    # Newton polish while the central-difference slope is well conditioned
    for _ in range(2):
        if f_theta == 0.0:
            break
        h = 1e-7
        try:
            slope = (_residual(psi, phi_d, r, nu, theta + h)
                     - _residual(psi, phi_d, r, nu, theta - h)) / (2.0 * h)
        except DegenerateApproach:
            break
        if not math.isfinite(slope) or abs(slope) < 1e-6:
            break
        cand = theta - f_theta / slope
        if not psi <= cand <= theta_t:
            break
        f_cand = _residual(psi, phi_d, r, nu, cand)
        if abs(f_cand) >= abs(f_theta):
            break
        theta, f_theta = cand, f_cand

    if abs(f_theta) > max(_RESIDUAL_ACCEPT, tol):
        if math.sin(phi_d) < _DEGENERATE_DEN and abs(theta - math.pi) < 1e-3:
            # payoff maximum pinned at the antipodal kink of the defender time
            raise DegenerateApproach(
                f"optimal breaching pinned at the antipode for psi={psi}, r={r}"
            )
        raise NoBracket(
            f"bisection pinched a discontinuity at theta={theta} "
            f"(residual {f_theta:.3e})"
        )

    beta = approach_angle(phi_d, theta, nu)
    tau_d = defender_target_time(phi_d, theta)
    tau_a = intruder_target_time(r, theta - psi, nu)
    return theta, beta, tau_d, tau_a, tau_d - tau_a


def solve(state: GameState, params: GameParams, tol: float = DEFAULT_TOL,
          *, defender_azimuth: float = 0.0) -> BreachSolution:
    """Solve for the optimal breaching point of ``state``.

    Negative-psi states are mirrored through theta -> -theta; the returned
    ``theta_star`` carries the intruder's sign.  ``breach_point_azimuth`` is
    ``defender_azimuth + theta_star`` wrapped to (-pi, pi], which reduces to
    the defender-anchored azimuth when the default 0.0 is kept.

    Raises
    ------
    DegenerateApproach
        Perimeter defender with the optimum pinned at the antipodal corner.
    NoBracket
        The residual does not change sign on the bracket (numerical
        pathology; never silently resolved).
    """
    sign = -1.0 if state.psi < 0.0 else 1.0
    theta, beta, tau_d, tau_a, p = _solve_core(
        abs(state.psi), state.phi_d, state.r, params.nu, tol
    )
    theta_star = sign * theta
    return BreachSolution(
        theta_star=theta_star,
        beta_star=beta,
        breach_point_azimuth=normalize_angle(defender_azimuth + theta_star),
        tau_d=tau_d,
        tau_a=tau_a,
        p_star=p,
    )


def oracle_solve(state: GameState, params: GameParams,
                 grid_points: int = 100_000) -> BreachSolution:
    """Independent maximizer of the raw payoff by dense grid plus ternary
    refinement.  Slower than :func:`solve` and immune to its root-finding
    assumptions; ties break toward the lowest theta.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be >= 1000")
    sign = -1.0 if state.psi < 0.0 else 1.0
    psi, phi_d, r, nu = abs(state.psi), state.phi_d, state.r, params.nu

    if r <= 1.0 + _ON_PERIMETER:
        tau_d = defender_target_time(phi_d, psi)
        beta = approach_angle(phi_d, psi, nu)
        return BreachSolution(sign * psi, beta, normalize_angle(sign * psi),
                              tau_d, 0.0, tau_d)

    theta_t = psi + math.acos(1.0 / r)
    grid = np.linspace(psi, theta_t, grid_points)
    p_grid = (np.arccos(np.clip(math.cos(phi_d) * np.cos(grid), -1.0, 1.0))
              - np.sqrt(np.maximum(r * r + 1.0 - 2.0 * r * np.cos(grid - psi), 0.0)) / nu)
    imax = int(np.argmax(p_grid))

    def p_of(theta: float) -> float:
        return (defender_target_time(phi_d, theta)
                - intruder_target_time(r, theta - psi, nu))

    lo = float(grid[max(imax - 1, 0)])
    hi = float(grid[min(imax + 1, grid_points - 1)])
    for _ in range(60):
        third = (hi - lo) / 3.0
        m1 = lo + third
        m2 = hi - third
        if p_of(m1) < p_of(m2):
            lo = m1
        else:
            hi = m2
    theta = 0.5 * (lo + hi)

    try:
        beta = approach_angle(phi_d, theta, nu)
    except DegenerateApproach:
        # argmax at the antipodal kink; report the one-sided limit from below
        beta = approach_angle(phi_d, theta - 1e-9, nu)
    tau_d = defender_target_time(phi_d, theta)
    tau_a = intruder_target_time(r, theta - psi, nu)
    return BreachSolution(sign * theta, beta, normalize_angle(sign * theta),
                          tau_d, tau_a, tau_d - tau_a)


def optimal_payoff(state: GameState, params: GameParams
                   ) -> tuple[float, float, float, float]:
    """Best time margin of ``state`` as (theta_star, tau_d, tau_a, p_star).

    Total even where :func:`solve` refuses: at the perimeter-defender
    antipodal corner the maximum sits exactly at the kink theta = pi, whose
    payoff is still well defined although the approach angle is not.
    """
    try:
        sol = solve(state, params)
        return sol.theta_star, sol.tau_d, sol.tau_a, sol.p_star
    except DegenerateApproach:
        theta = math.pi if state.psi >= 0.0 else -math.pi
        tau_d = defender_target_time(state.phi_d, math.pi)
        tau_a = intruder_target_time(state.r, math.pi - abs(state.psi), params.nu)
        return theta, tau_d, tau_a, tau_d - tau_a
