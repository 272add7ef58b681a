"""Barrier construction and winning-region classification.

The barrier is the locus of intruder positions whose best time margin is
exactly zero: launch a chord from each perimeter point at the optimal
approach angle and walk outward the distance the intruder covers while the
defender walks its arc.  Sweeping the breaching azimuth ``theta`` over
[0, pi] and mirroring gives a closed curve around the perimeter separating
the intruder-winning region (outside reachable in time) from the
defender-winning region.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateApproach, LevelSetInsidePerimeter, SingularCurvature
from .geometry import (
    GameParams,
    GameState,
    defender_target_time,
    normalize_angle,
)
from .breach_solver import approach_angle, solve

DEFAULT_SAMPLES = 256
DEFAULT_BAND = 1e-6
DEFAULT_CURVATURE_STEP = 1e-4


class RegionLabel(enum.Enum):
    """Game-of-kind classification of a state."""

    INTRUDER_WINNING = "intruder-winning"
    DEFENDER_WINNING = "defender-winning"
    ON_BARRIER = "on-barrier"


@dataclass(frozen=True)
class BarrierSample:
    """One barrier point: breaching azimuth ``theta``, approach angle
    ``beta``, chord length ``x``, and the polar position (``r``, ``psi``)
    of the zero-margin intruder start."""

    theta: float
    beta: float
    x: float
    r: float
    psi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", normalize_angle(self.psi))


@dataclass(frozen=True)
class BarrierCurve:
    """Sampled barrier (or payoff level set) for one defender elevation."""

    phi_d: float
    nu: float
    samples: tuple[BarrierSample, ...]


def barrier_point(phi_d: float, nu: float, theta: float) -> BarrierSample:
    """Construct the zero-margin point for breaching azimuth ``theta``.

    The chord length equals ``nu`` times the defender's arc time, and the
    start radius follows from the chord triangle:
    ``r = sqrt(x^2 + 1 + 2 x sin(beta))``,
    ``psi = theta + beta - acos(cos(beta) / r)``.

    Raises
    ------
    DegenerateApproach
        For ``phi_d = 0`` with ``theta`` congruent to 0 mod pi (no
        two-sided limit; see :func:`barrier_curve` for the one-sided fill).
    """
    if not -1e-12 <= theta <= math.pi + 1e-12:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    beta = approach_angle(phi_d, theta, nu)
    x = nu * defender_target_time(phi_d, theta)
    r = math.sqrt(x * x + 1.0 + 2.0 * x * math.sin(beta))
    psi = theta + beta - math.acos(math.cos(beta) / r)
    return BarrierSample(theta=theta, beta=beta, x=x, r=r, psi=psi)


def _edge_sample(nu: float, theta: float) -> BarrierSample:
    # one-sided limit for the perimeter defender, where the approach angle
    # tends to acos(nu) as theta -> 0+ or pi-
    beta = math.acos(nu)
    x = nu * defender_target_time(0.0, theta)
    r = math.sqrt(x * x + 1.0 + 2.0 * x * math.sin(beta))
    psi = theta + beta - math.acos(math.cos(beta) / r)
    return BarrierSample(theta=theta, beta=beta, x=x, r=r, psi=psi)


def _upper_sample(phi_d: float, nu: float, theta: float) -> BarrierSample:
    try:
        return barrier_point(phi_d, nu, theta)
    except DegenerateApproach:
        return _edge_sample(nu, theta)


def _mirror(sample: BarrierSample) -> BarrierSample:
    return BarrierSample(theta=-sample.theta, beta=sample.beta,
                         x=sample.x, r=sample.r, psi=-sample.psi)


def barrier_curve(phi_d: float, nu: float,
                  n_samples: int = DEFAULT_SAMPLES) -> BarrierCurve:
    """Sample the barrier at uniform ``theta`` over [-pi, pi].

    Negative azimuths are mirror images of the positive side, so the curve
    is symmetric about ``psi = 0`` by construction.  For ``phi_d > 0`` the
    first and last samples coincide under azimuth normalization and the
    curve is closed; the ``phi_d = 0`` endpoints are filled with one-sided
    limits.
    """
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    samples = []
    for i in range(n_samples):
        theta = -math.pi + 2.0 * math.pi * i / (n_samples - 1)
        upper = _upper_sample(phi_d, nu, abs(theta))
        samples.append(_mirror(upper) if theta < 0.0 else upper)
    return BarrierCurve(phi_d=phi_d, nu=nu, samples=tuple(samples))


def classify(state: GameState, params: GameParams,
             band: float = DEFAULT_BAND) -> RegionLabel:
    """Label a state by the sign of its best time margin.

    Margins within ``band`` of zero are reported as on the barrier.
    Solver errors propagate (the perimeter-defender antipodal corner has no
    defined approach angle; see ``solver.optimal_payoff`` for a total
    margin evaluation).
    """
    p_star = solve(state, params).p_star
    if p_star > band:
        return RegionLabel.INTRUDER_WINNING
    if p_star < -band:
        return RegionLabel.DEFENDER_WINNING
    return RegionLabel.ON_BARRIER


def _radial(phi_d: float, nu: float, theta: float) -> float:
    # r(theta) is even about both 0 and pi; fold so central differences can
    # straddle the endpoints
    folded = abs(theta)
    if folded > math.pi:
        folded = 2.0 * math.pi - folded
    return barrier_point(phi_d, nu, folded).r


def curvature(phi_d: float, nu: float, theta: float,
              h: float = DEFAULT_CURVATURE_STEP) -> float:
    """Polar-form curvature of the barrier in its ``theta`` parameterization.

    Central differences of ``r(theta)`` at step ``h`` feed
    ``|r^2 + 2 r'^2 - r r''| / (r^2 + r'^2)^(3/2)``.  Exact for the pole
    defender, whose barrier is the circle ``r = 1 + nu pi / 2``.

    Raises
    ------
    SingularCurvature
        For ``phi_d = 0``, where the radial profile has endpoint kinks.
    """
    if phi_d < 1e-12:
        raise SingularCurvature("curvature undefined for a perimeter defender")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    r0 = _radial(phi_d, nu, theta)
    r_plus = _radial(phi_d, nu, theta + h)
    r_minus = _radial(phi_d, nu, theta - h)
    r1 = (r_plus - r_minus) / (2.0 * h)
    r2 = (r_plus - 2.0 * r0 + r_minus) / (h * h)
    num = abs(r0 * r0 + 2.0 * r1 * r1 - r0 * r2)
    den = (r0 * r0 + r1 * r1) ** 1.5
    return num / den


def level_set(phi_d: float, nu: float, k: float,
              n_samples: int = DEFAULT_SAMPLES) -> BarrierCurve:
    """Offset the barrier to the locus of margin ``k``.

    Each barrier point slides along its chord line (the outward normal
    direction) by ``nu * |k|``: outward for ``k < 0`` (the intruder needs
    ``|k|`` more time), inward for ``k > 0``.

    Raises
    ------
    LevelSetInsidePerimeter
        If the inward offset would cross below the unit perimeter.
    """
    if n_samples < 16:
        raise ValueError("n_samples must be >= 16")
    samples = []
    for i in range(n_samples):
        theta = -math.pi + 2.0 * math.pi * i / (n_samples - 1)
        base = _upper_sample(phi_d, nu, abs(theta))
        x_off = base.x - nu * k
        if x_off < -1e-12:
            raise LevelSetInsidePerimeter(
                f"level k={k} crosses the perimeter at theta={base.theta} "
                f"(chord {base.x:.6f}, max inward {base.x / nu:.6f})"
            )
        x_off = max(x_off, 0.0)
        r_off = math.sqrt(x_off * x_off + 1.0 + 2.0 * x_off * math.sin(base.beta))
        psi_off = base.theta + base.beta - math.acos(math.cos(base.beta) / r_off)
        shifted = BarrierSample(theta=base.theta, beta=base.beta,
                                x=x_off, r=r_off, psi=psi_off)
        samples.append(_mirror(shifted) if theta < 0.0 else shifted)
    return BarrierCurve(phi_d=phi_d, nu=nu, samples=tuple(samples))
