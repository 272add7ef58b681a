"""Equations of motion, control laws, integration, terminal detection.

The defender moves at unit speed on the hemisphere surface, parameterized by
its altitudinal rate ``omega_d`` and an azimuthal direction sign; the implied
azimuthal rate is ``sqrt(1 - omega_d^2) / cos(phi_d)``.  The intruder moves in
the base plane at up to speed ``nu``, parameterized by a heading angle
measured from the inward radial direction.  In the defender-anchored state
``z = (psi, phi_d, r)`` the dynamics read

    psi_dot = v_a sin(gamma_a) / r - sign * sqrt(1 - omega_d^2) / cos(phi_d)
    phi_dot = omega_d
    r_dot   = -v_a cos(gamma_a)

Integration happens in absolute Cartesian coordinates (defender 3-vector on
the unit sphere, intruder 2-vector) with a classical fixed-step 4-stage
scheme, so the ``cos(phi_d)`` singularity at the pole never enters the
integrator; the defender is renormalized onto the sphere after each step and
held above the base plane.  The relative-coordinate rates remain available
as reported quantities through :func:`state_derivative`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .breach_solver import solve
from .errors import AmbiguousTerminal, DegenerateApproach, PoleSingularity
from .geometry import (
    DefenderState,
    GameParams,
    GameState,
    IntruderState,
    defender_unit_vector,
    intruder_plane_vector,
    normalize_angle,
    perimeter_point,
    relative_state,
)

TOL_BREACH = 1e-6
TOL_CAPTURE = 1e-3
RESAMPLE_INTERVAL = 0.1
DITHER_PERIOD = 1e-3

_POLE_RHO = 1e-12


@dataclass(frozen=True)
class DefenderControl:
    """Unit-speed defender control: altitudinal rate and azimuthal direction."""

    omega_d: float
    azimuth_sign: float = 1.0

    def __post_init__(self) -> None:
        if not -1.0 <= self.omega_d <= 1.0:
            raise ValueError(f"omega_d must lie in [-1, 1], got {self.omega_d}")
        object.__setattr__(self, "azimuth_sign",
                           1.0 if self.azimuth_sign >= 0.0 else -1.0)


@dataclass(frozen=True)
class IntruderControl:
    """Intruder control: heading from the inward radial, fraction of ``nu``."""

    gamma_a: float
    speed_fraction: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gamma_a", normalize_angle(self.gamma_a))
        if not 0.0 <= self.speed_fraction <= 1.0:
            raise ValueError(
                f"speed_fraction must lie in [0, 1], got {self.speed_fraction}"
            )


Control = Union[DefenderControl, IntruderControl]
ControlLaw = Callable[[float, DefenderState, IntruderState, GameParams], Control]


@dataclass(frozen=True)
class Strategy:
    """A named control law ``(t, defender, intruder, params) -> control``.

    Laws are pure functions; randomized strategies derive their draws from
    an explicit seed and the current time, never from call order, so a
    strategy object can be reused across runs without state leaking.
    """

    name: str
    law: ControlLaw


class TerminalKind(enum.Enum):
    DEFENDER_WIN = "defender-win"
    INTRUDER_WIN = "intruder-win"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class TerminalEvent:
    """How a game ended: outcome kind, terminal time, final reduced state."""

    kind: TerminalKind
    t_f: float
    final_state: GameState


def state_derivative(state: GameState, dc: DefenderControl, ic: IntruderControl,
                     params: GameParams) -> tuple[float, float, float]:
    """Relative-state rates (psi_dot, phi_dot, r_dot) under the given controls.

    Raises
    ------
    PoleSingularity
        At the pole with a nonzero azimuthal component, where the azimuthal
        rate is undefined.
    """
    cphi = math.cos(state.phi_d)
    omega = dc.omega_d
    if cphi < _POLE_RHO and omega * omega < 1.0:
        raise PoleSingularity(
            f"azimuthal rate undefined at the pole with omega_d={omega}"
        )
    azimuthal = 0.0 if omega * omega >= 1.0 else math.sqrt(1.0 - omega * omega) / cphi
    v_a = params.nu * ic.speed_fraction
    psi_dot = v_a * math.sin(ic.gamma_a) / state.r - dc.azimuth_sign * azimuthal
    r_dot = -v_a * math.cos(ic.gamma_a)
    return psi_dot, omega, r_dot


def _surface_frame(d: tuple[float, float, float]
                   ) -> tuple[tuple[float, float, float], tuple[float, float, float]]:
    # orthonormal tangent frame (uphill, eastward); azimuth convention psi=0
    # at the exact pole, where every meridian is equivalent
    x, y, z = d
    rho = math.hypot(x, y)
    if rho < _POLE_RHO:
        cpsi, spsi = 1.0, 0.0
    else:
        cpsi, spsi = x / rho, y / rho
    e_phi = (-z * cpsi, -z * spsi, rho)
    e_psi = (-spsi, cpsi, 0.0)
    return e_phi, e_psi


def _defender_velocity(d: tuple[float, float, float],
                       dc: DefenderControl) -> tuple[float, float, float]:
    x, y, _ = d
    omega = dc.omega_d
    if math.hypot(x, y) < _POLE_RHO and omega * omega < 1.0:
        raise PoleSingularity(
            f"azimuthal direction undefined at the pole with omega_d={omega}"
        )
    tangential = dc.azimuth_sign * math.sqrt(max(1.0 - omega * omega, 0.0))
    e_phi, e_psi = _surface_frame(d)
    return (omega * e_phi[0] + tangential * e_psi[0],
            omega * e_phi[1] + tangential * e_psi[1],
            omega * e_phi[2])


def _intruder_velocity(a: tuple[float, float], ic: IntruderControl,
                       params: GameParams) -> tuple[float, float]:
    x, y = a
    r = math.hypot(x, y)
    speed = params.nu * ic.speed_fraction
    if speed == 0.0:
        return (0.0, 0.0)
    u_in = (-x / r, -y / r)
    u_tan = (-y / r, x / r)
    cg, sg = math.cos(ic.gamma_a), math.sin(ic.gamma_a)
    return (speed * (cg * u_in[0] + sg * u_tan[0]),
            speed * (cg * u_in[1] + sg * u_tan[1]))


def _project_defender(x: float, y: float, z: float) -> tuple[float, float, float]:
    # back onto the unit sphere, then onto the closed upper hemisphere
    n = math.sqrt(x * x + y * y + z * z)
    x, y, z = x / n, y / n, z / n
    if z < 0.0:
        rho = math.hypot(x, y)
        x, y, z = x / rho, y / rho, 0.0
    return x, y, min(z, 1.0)


def _rk4_raw(d: tuple[float, float, float], a: tuple[float, float],
             dc: DefenderControl, ic: IntruderControl, params: GameParams,
             dt: float) -> tuple[tuple[float, float, float], tuple[float, float]]:
    def stage(dd: tuple[float, float, float], aa: tuple[float, float]):
        return _defender_velocity(dd, dc), _intruder_velocity(aa, ic, params)

    k1d, k1a = stage(d, a)
    h = 0.5 * dt
    k2d, k2a = stage((d[0] + h * k1d[0], d[1] + h * k1d[1], d[2] + h * k1d[2]),
                     (a[0] + h * k1a[0], a[1] + h * k1a[1]))
    k3d, k3a = stage((d[0] + h * k2d[0], d[1] + h * k2d[1], d[2] + h * k2d[2]),
                     (a[0] + h * k2a[0], a[1] + h * k2a[1]))
    k4d, k4a = stage((d[0] + dt * k3d[0], d[1] + dt * k3d[1], d[2] + dt * k3d[2]),
                     (a[0] + dt * k3a[0], a[1] + dt * k3a[1]))
    w = dt / 6.0
    d_new = _project_defender(
        d[0] + w * (k1d[0] + 2.0 * k2d[0] + 2.0 * k3d[0] + k4d[0]),
        d[1] + w * (k1d[1] + 2.0 * k2d[1] + 2.0 * k3d[1] + k4d[1]),
        d[2] + w * (k1d[2] + 2.0 * k2d[2] + 2.0 * k3d[2] + k4d[2]),
    )
    a_new = (a[0] + w * (k1a[0] + 2.0 * k2a[0] + 2.0 * k3a[0] + k4a[0]),
             a[1] + w * (k1a[1] + 2.0 * k2a[1] + 2.0 * k3a[1] + k4a[1]))
    return d_new, a_new


def integrate_step(states: tuple[DefenderState, IntruderState],
                   controls: tuple[DefenderControl, IntruderControl],
                   params: GameParams, dt: float
                   ) -> tuple[DefenderState, IntruderState]:
    """Advance both agents one fixed step under held controls.

    Runge-Kutta 4 on the absolute Cartesian pair; the defender is projected
    back onto the (upper) unit sphere afterwards.

    Raises
    ------
    PoleSingularity
        Propagated from the defender velocity at the exact pole.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    defender, intruder = states
    dc, ic = controls
    d = defender_unit_vector(defender.psi_d, defender.phi_d)
    a = intruder_plane_vector(intruder.psi_a, intruder.r)
    (dx, dy, dz), (ax, ay) = _rk4_raw(d, a, dc, ic, params, dt)
    return (
        DefenderState(psi_d=math.atan2(dy, dx),
                      phi_d=math.asin(min(max(dz, -1.0), 1.0))),
        IntruderState(psi_a=math.atan2(ay, ax), r=math.hypot(ax, ay)),
    )


def check_terminal(state: GameState, tol_breach: float = TOL_BREACH,
                   tol_capture: float = TOL_CAPTURE, *,
                   t: float = 0.0) -> TerminalEvent | None:
    """Terminal test: breach (intruder win) vs capture manifold (defender win).

    The game is over for the intruder's side when it reaches the perimeter
    with angular separation to spare, and for the defender's side when it
    holds the blocking configuration ``psi = phi_d = 0`` while the intruder
    is still outside.

    Raises
    ------
    AmbiguousTerminal
        Both tolerances satisfied in the same step; reported rather than
        resolved silently.
    """
    separation = math.hypot(state.psi, state.phi_d)
    breached = state.r <= 1.0 + tol_breach
    captured = separation <= tol_capture
    if breached and captured:
        raise AmbiguousTerminal(
            f"breach and capture in the same step (r={state.r}, "
            f"separation={separation})"
        )
    if breached:
        return TerminalEvent(TerminalKind.INTRUDER_WIN, t, state)
    if captured:
        return TerminalEvent(TerminalKind.DEFENDER_WIN, t, state)
    return None


def optimal_defender_strategy(defender: DefenderState, intruder: IntruderState,
                              params: GameParams) -> DefenderControl:
    """Head along the great circle toward the optimal breaching point.

    The unit geodesic tangent decomposes exactly into (phi_dot, azimuthal)
    components, so the control reproduces it at full speed.  At the pole
    every meridian is a geodesic and pure descent is returned, likewise for
    an exactly head-on intruder; at the degenerate antipodal corner of a
    perimeter defender the tie is broken by vertical motion, after which
    the solve is regular again.
    """
    state = relative_state(defender, intruder)
    try:
        sol = solve(state, params)
    except DegenerateApproach:
        return DefenderControl(omega_d=1.0)
    if math.cos(defender.phi_d) < 1e-9:
        return DefenderControl(omega_d=-1.0)
    if state.psi == 0.0:
        # head-on tie: the two symmetric breaching points are equally good,
        # so descend toward the perimeter point directly below
        return DefenderControl(omega_d=-1.0)
    d = defender_unit_vector(defender.psi_d, defender.phi_d)
    b_az = defender.psi_d + sol.theta_star
    bx, by = math.cos(b_az), math.sin(b_az)
    dot = bx * d[0] + by * d[1]
    t_vec = (bx - dot * d[0], by - dot * d[1], -dot * d[2])
    norm = math.sqrt(t_vec[0] ** 2 + t_vec[1] ** 2 + t_vec[2] ** 2)
    if norm < 1e-12:
        # already on the breaching point; lift to keep unit speed admissible
        return DefenderControl(omega_d=1.0)
    e_phi, e_psi = _surface_frame(d)
    omega = (t_vec[0] * e_phi[0] + t_vec[1] * e_phi[1] + t_vec[2] * e_phi[2]) / norm
    side = t_vec[0] * e_psi[0] + t_vec[1] * e_psi[1]
    return DefenderControl(omega_d=min(max(omega, -1.0), 1.0),
                           azimuth_sign=1.0 if side >= 0.0 else -1.0)


def optimal_intruder_strategy(defender: DefenderState, intruder: IntruderState,
                              params: GameParams) -> IntruderControl:
    """Head straight for the optimal breaching point at full speed."""
    state = relative_state(defender, intruder)
    if state.r <= 1.0 + 1e-12:
        return IntruderControl(gamma_a=0.0)
    try:
        sol = solve(state, params)
        b_az = defender.psi_d + sol.theta_star
    except DegenerateApproach:
        # antipodal kink: the best breaching point is opposite the defender
        b_az = defender.psi_d + math.copysign(math.pi, state.psi)
    ax, ay = intruder_plane_vector(intruder.psi_a, intruder.r)
    bx, by = perimeter_point(b_az)
    wx, wy = bx - ax, by - ay
    if math.hypot(wx, wy) < 1e-12:
        return IntruderControl(gamma_a=0.0)
    cpsi, spsi = math.cos(intruder.psi_a), math.sin(intruder.psi_a)
    inward = -wx * cpsi - wy * spsi
    transverse = -wx * spsi + wy * cpsi
    return IntruderControl(gamma_a=math.atan2(transverse, inward))


def optimal_defender() -> Strategy:
    return Strategy("optimal", lambda t, d, a, p: optimal_defender_strategy(d, a, p))


def optimal_intruder() -> Strategy:
    return Strategy("optimal", lambda t, d, a, p: optimal_intruder_strategy(d, a, p))


def stationary_defender(period: float = DITHER_PERIOD) -> Strategy:
    """Hold position to within one step: the unit-speed constraint admits no
    rest, so the defender dithers vertically with alternating sign."""
    def law(t: float, defender: DefenderState, intruder: IntruderState,
            params: GameParams) -> DefenderControl:
        k = int(math.floor(t / period + 1e-9))
        return DefenderControl(omega_d=1.0 if k % 2 == 0 else -1.0)

    return Strategy("stationary", law)


def stationary_intruder() -> Strategy:
    return Strategy("stationary",
                    lambda t, d, a, p: IntruderControl(0.0, speed_fraction=0.0))


def fixed_defender(omega_d: float, azimuth_sign: float = 1.0) -> Strategy:
    control = DefenderControl(omega_d=omega_d, azimuth_sign=azimuth_sign)
    return Strategy(f"fixed:{omega_d:g}", lambda t, d, a, p: control)


def fixed_intruder(gamma_a: float, speed_fraction: float = 1.0) -> Strategy:
    control = IntruderControl(gamma_a=gamma_a, speed_fraction=speed_fraction)
    return Strategy(f"fixed:{gamma_a:g}", lambda t, d, a, p: control)


def random_defender(seed: int, resample: float = RESAMPLE_INTERVAL) -> Strategy:
    """Piecewise-constant uniform draws, re-keyed every ``resample`` units."""
    def law(t: float, defender: DefenderState, intruder: IntruderState,
            params: GameParams) -> DefenderControl:
        k = int(math.floor(t / resample + 1e-9))
        rng = np.random.default_rng((seed, k))
        return DefenderControl(omega_d=float(rng.uniform(-1.0, 1.0)),
                               azimuth_sign=1.0 if rng.random() < 0.5 else -1.0)

    return Strategy(f"random:{seed}", law)


def random_intruder(seed: int, resample: float = RESAMPLE_INTERVAL) -> Strategy:
    """Piecewise-constant uniform heading and speed fraction."""
    def law(t: float, defender: DefenderState, intruder: IntruderState,
            params: GameParams) -> IntruderControl:
        k = int(math.floor(t / resample + 1e-9))
        rng = np.random.default_rng((seed, k))
        return IntruderControl(gamma_a=float(rng.uniform(-math.pi, math.pi)),
                               speed_fraction=float(rng.uniform(0.0, 1.0)))

    return Strategy(f"random:{seed}", law)
