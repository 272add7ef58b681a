"""Coordinate bundles and closed-form timing geometry.

The defender walks the surface of a unit hemisphere at unit speed, so its
time to reach a point on the base perimeter is a great-circle arc length.
The intruder moves on the base plane at speed ``nu <= 1``, so its time to a
perimeter point is a straight chord length over ``nu``.  Everything else in
the package is built from these two target times.

Angles are radians everywhere.  Azimuths are wrapped to (-pi, pi] once, at
type construction; downstream math assumes already-normalized values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi

# slack for float dust on validation boundaries
_EDGE = 1e-9


def normalize_angle(angle: float) -> float:
    """Wrap an angle to the interval (-pi, pi]."""
    wrapped = math.remainder(angle, TWO_PI)
    if wrapped <= -math.pi:
        wrapped += TWO_PI
    return wrapped


def _clamped_acos(value: float) -> float:
    return math.acos(min(1.0, max(-1.0, value)))


@dataclass(frozen=True)
class GameParams:
    """Game constants: the intruder speed ratio ``nu`` in (0, 1]."""

    nu: float = 0.8

    def __post_init__(self) -> None:
        if not 0.0 < self.nu <= 1.0:
            raise ValueError(f"nu must lie in (0, 1], got {self.nu}")


@dataclass(frozen=True)
class GameState:
    """Defender-anchored state of the reduced game.

    Attributes
    ----------
    psi : float
        Intruder azimuth relative to the defender, wrapped to (-pi, pi].
    phi_d : float
        Defender elevation on the hemisphere, in [0, pi/2].
    r : float
        Intruder distance from the hemisphere axis, >= 1.
    """

    psi: float
    phi_d: float
    r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi", normalize_angle(self.psi))
        if not -_EDGE <= self.phi_d <= HALF_PI + _EDGE:
            raise ValueError(f"phi_d must lie in [0, pi/2], got {self.phi_d}")
        if self.r < 1.0 - _EDGE:
            raise ValueError(f"r must be >= 1, got {self.r}")


@dataclass(frozen=True)
class DefenderState:
    """Absolute defender position: azimuth (wrapped) and elevation."""

    psi_d: float
    phi_d: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi_d", normalize_angle(self.psi_d))
        if not -_EDGE <= self.phi_d <= HALF_PI + _EDGE:
            raise ValueError(f"phi_d must lie in [0, pi/2], got {self.phi_d}")


@dataclass(frozen=True)
class IntruderState:
    """Absolute intruder position on the base plane: azimuth and radius."""

    psi_a: float
    r: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "psi_a", normalize_angle(self.psi_a))
        if self.r < 1.0 - _EDGE:
            raise ValueError(f"r must be >= 1, got {self.r}")


def relative_state(defender: DefenderState, intruder: IntruderState) -> GameState:
    """Reduce an absolute state pair to the defender-anchored game state."""
    return GameState(
        psi=intruder.psi_a - defender.psi_d,
        phi_d=defender.phi_d,
        r=intruder.r,
    )


def defender_target_time(phi_d: float, theta: float) -> float:
    """Defender time to the perimeter point at relative azimuth ``theta``.

    Great-circle distance between the surface point at elevation ``phi_d``
    (azimuth 0) and the perimeter point at azimuth ``theta``:
    ``acos(cos(phi_d) * cos(theta))``.
    """
    return _clamped_acos(math.cos(phi_d) * math.cos(theta))


def intruder_target_time(r: float, delta: float, nu: float) -> float:
    """Intruder time to a perimeter point separated by azimuth ``delta``.

    Chord length by the law of cosines, divided by the speed ratio:
    ``sqrt(r^2 + 1 - 2 r cos(delta)) / nu``.
    """
    chord_sq = r * r + 1.0 - 2.0 * r * math.cos(delta)
    return math.sqrt(max(chord_sq, 0.0)) / nu


def chord_from_approach(r: float, beta: float) -> float:
    """Chord length from radius ``r`` to the perimeter at approach angle ``beta``.

    ``beta`` is the angle between the chord and the perimeter tangent at the
    breaching point.  Positive root of ``r^2 = x^2 + 1 + 2 x sin(beta)``:
    ``x = -sin(beta) + sqrt(r^2 - cos(beta)^2)``.
    """
    cos_b = math.cos(beta)
    disc = r * r - cos_b * cos_b
    return math.sqrt(max(disc, 0.0)) - math.sin(beta)


def payoff(state: GameState, params: GameParams, theta: float) -> float:
    """Time margin at the breaching point ``theta``: defender time minus
    intruder time.  Positive means the intruder arrives first."""
    return defender_target_time(state.phi_d, theta) - intruder_target_time(
        state.r, theta - state.psi, params.nu
    )


def defender_unit_vector(psi_d: float, phi_d: float) -> tuple[float, float, float]:
    """Cartesian unit vector of a defender surface position."""
    c = math.cos(phi_d)
    return (c * math.cos(psi_d), c * math.sin(psi_d), math.sin(phi_d))


def intruder_plane_vector(psi_a: float, r: float) -> tuple[float, float]:
    """Cartesian base-plane position of the intruder."""
    return (r * math.cos(psi_a), r * math.sin(psi_a))


def perimeter_point(azimuth: float) -> tuple[float, float]:
    """Cartesian base-plane position of a perimeter point."""
    return (math.cos(azimuth), math.sin(azimuth))
