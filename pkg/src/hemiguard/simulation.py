"""Full-game orchestration and the Nash-equilibrium property check.

A run integrates the closed-loop dynamics: the strategy laws are evaluated
at every integrator stage, so the discretized system is the feedback field
itself and payoff conservation under optimal play is limited by the scheme
order, not by control lag.  Each recorded step re-solves the breaching
problem from scratch; the payoff trace is therefore a chain of independent
witnesses rather than an accumulated quantity.  A step that crosses a
terminal shell is redone under held start-of-step controls and the crossing
located by linear interpolation inside it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .breach_solver import optimal_payoff
from .dynamics import (
    DefenderControl,
    IntruderControl,
    Strategy,
    TerminalEvent,
    TerminalKind,
    TOL_BREACH,
    TOL_CAPTURE,
    _defender_velocity,
    _intruder_velocity,
    _project_defender,
    _rk4_raw,
    check_terminal,
    optimal_defender,
    optimal_intruder,
)
from .errors import AmbiguousTerminal
from .geometry import (
    DefenderState,
    GameParams,
    GameState,
    IntruderState,
    defender_unit_vector,
    intruder_plane_vector,
    normalize_angle,
)

DEFAULT_DT = 1e-3
TIMEOUT_FACTOR = 4.0
DEFAULT_NASH_SLACK = 1e-3


@dataclass(frozen=True)
class ScenarioSpec:
    """One game setup: initial reduced state, strategies, and step control.

    The defender starts at azimuth 0, so the initial intruder azimuth equals
    ``initial_state.psi``.  ``timeout`` of None means four times the initial
    intruder target time.  ``seed`` is bookkeeping for reproducibility
    reports; randomized strategies carry their own seeds.
    """

    initial_state: GameState
    params: GameParams
    defender_strategy: Strategy
    intruder_strategy: Strategy
    dt: float = DEFAULT_DT
    timeout: float | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.dt <= 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.timeout is not None and self.timeout <= 0.0:
            raise ValueError(f"timeout must be positive, got {self.timeout}")


@dataclass(frozen=True)
class Trajectory:
    """Recorded game: states, applied controls, and per-step breach solves."""

    times: tuple[float, ...]
    defender_states: tuple[DefenderState, ...]
    intruder_states: tuple[IntruderState, ...]
    controls: tuple[tuple[DefenderControl, IntruderControl], ...]
    payoff_trace: tuple[float, ...]
    tau_d_trace: tuple[float, ...]
    tau_a_trace: tuple[float, ...]
    terminal: TerminalEvent


def _clamp(value: float, lo: float, hi: float) -> float:
    return lo if value < lo else hi if value > hi else value


def _typed_defender(d: tuple[float, float, float]) -> DefenderState:
    return DefenderState(psi_d=math.atan2(d[1], d[0]),
                         phi_d=math.asin(_clamp(d[2], 0.0, 1.0)))


def _typed_intruder(a: tuple[float, float]) -> IntruderState:
    # clamp covers sub-step transients just below the perimeter
    return IntruderState(psi_a=math.atan2(a[1], a[0]),
                         r=max(math.hypot(a[0], a[1]), 1.0))


def _relative(d: tuple[float, float, float],
              a: tuple[float, float]) -> tuple[float, float, float]:
    psi = normalize_angle(math.atan2(a[1], a[0]) - math.atan2(d[1], d[0]))
    return psi, math.asin(_clamp(d[2], 0.0, 1.0)), math.hypot(a[0], a[1])


def _closed_loop_step(t: float, d: tuple[float, float, float],
                      a: tuple[float, float], spec: ScenarioSpec
                      ) -> tuple[tuple[float, float, float], tuple[float, float]]:
    params = spec.params
    dt = spec.dt

    def field(tt: float, dd: tuple[float, float, float], aa: tuple[float, float]):
        defender = _typed_defender(dd)
        intruder = _typed_intruder(aa)
        dc = spec.defender_strategy.law(tt, defender, intruder, params)
        ic = spec.intruder_strategy.law(tt, defender, intruder, params)
        return _defender_velocity(dd, dc), _intruder_velocity(aa, ic, params)

    h = 0.5 * dt
    k1d, k1a = field(t, d, a)
    k2d, k2a = field(t + h,
                     (d[0] + h * k1d[0], d[1] + h * k1d[1], d[2] + h * k1d[2]),
                     (a[0] + h * k1a[0], a[1] + h * k1a[1]))
    k3d, k3a = field(t + h,
                     (d[0] + h * k2d[0], d[1] + h * k2d[1], d[2] + h * k2d[2]),
                     (a[0] + h * k2a[0], a[1] + h * k2a[1]))
    k4d, k4a = field(t + dt,
                     (d[0] + dt * k3d[0], d[1] + dt * k3d[1], d[2] + dt * k3d[2]),
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


def run(spec: ScenarioSpec) -> Trajectory:
    """Integrate one game until breach, capture, or timeout.

    Deterministic: two runs of equal specs produce bit-identical traces.
    A timeout is a normal outcome; integration and terminal-ambiguity errors
    propagate as exceptions.
    """
    params = spec.params
    dt = spec.dt
    d = defender_unit_vector(0.0, spec.initial_state.phi_d)
    a = intruder_plane_vector(spec.initial_state.psi, spec.initial_state.r)

    timeout = spec.timeout
    if timeout is None:
        tau_a0 = optimal_payoff(spec.initial_state, params)[2]
        timeout = max(TIMEOUT_FACTOR * tau_a0, dt)

    times: list[float] = []
    defenders: list[DefenderState] = []
    intruders: list[IntruderState] = []
    controls: list[tuple[DefenderControl, IntruderControl]] = []
    p_trace: list[float] = []
    tau_d_trace: list[float] = []
    tau_a_trace: list[float] = []

    def record(t: float, dd: tuple[float, float, float],
               aa: tuple[float, float]) -> GameState:
        defender = _typed_defender(dd)
        intruder = _typed_intruder(aa)
        state = GameState(psi=intruder.psi_a - defender.psi_d,
                          phi_d=defender.phi_d, r=intruder.r)
        _, tau_d, tau_a, p = optimal_payoff(state, params)
        times.append(t)
        defenders.append(defender)
        intruders.append(intruder)
        controls.append((spec.defender_strategy.law(t, defender, intruder, params),
                         spec.intruder_strategy.law(t, defender, intruder, params)))
        p_trace.append(p)
        tau_d_trace.append(tau_d)
        tau_a_trace.append(tau_a)
        return state

    def packaged(event: TerminalEvent) -> Trajectory:
        return Trajectory(
            times=tuple(times),
            defender_states=tuple(defenders),
            intruder_states=tuple(intruders),
            controls=tuple(controls),
            payoff_trace=tuple(p_trace),
            tau_d_trace=tuple(tau_d_trace),
            tau_a_trace=tuple(tau_a_trace),
            terminal=event,
        )

    state0 = record(0.0, d, a)
    event = check_terminal(state0, t=0.0)
    if event is not None:
        return packaged(event)

    max_steps = int(math.ceil(timeout / dt)) + 2
    for i in range(max_steps):
        t = i * dt
        if t >= timeout - 1e-12:
            psi, phi, r = _relative(d, a)
            return packaged(TerminalEvent(TerminalKind.TIMEOUT, t,
                                          GameState(psi, phi, r)))

        d_new, a_new = _closed_loop_step(t, d, a, spec)
        t_new = (i + 1) * dt

        psi_p, phi_p, r_p = _relative(d, a)
        psi_n, phi_n, r_n = _relative(d_new, a_new)
        sep_p = math.hypot(psi_p, phi_p)
        sep_n = math.hypot(psi_n, phi_n)
        if r_n <= 1.0 + TOL_BREACH or sep_n <= TOL_CAPTURE:
            # Redo the crossing step under held start-of-step controls: the
            # feedback laws are not meaningful past the terminal shells, and
            # re-aiming at mid-step stages there would bend the endpoint the
            # interpolation relies on.
            defender = _typed_defender(d)
            intruder = _typed_intruder(a)
            dc = spec.defender_strategy.law(t, defender, intruder, params)
            ic = spec.intruder_strategy.law(t, defender, intruder, params)
            d_new, a_new = _rk4_raw(d, a, dc, ic, params, dt)
            psi_n, phi_n, r_n = _relative(d_new, a_new)
            sep_n = math.hypot(psi_n, phi_n)
        breached = r_n <= 1.0 + TOL_BREACH
        captured = sep_n <= TOL_CAPTURE
        if breached and captured:
            raise AmbiguousTerminal(
                f"breach and capture in the same step at t={t_new} "
                f"(r={r_n}, separation={sep_n})"
            )
        if breached or captured:
            if breached:
                kind = TerminalKind.INTRUDER_WIN
                alpha = (r_p - (1.0 + TOL_BREACH)) / (r_p - r_n)
            else:
                kind = TerminalKind.DEFENDER_WIN
                alpha = (sep_p - TOL_CAPTURE) / (sep_p - sep_n)
            alpha = _clamp(alpha, 0.0, 1.0)
            d_f = _project_defender(d[0] + alpha * (d_new[0] - d[0]),
                                    d[1] + alpha * (d_new[1] - d[1]),
                                    d[2] + alpha * (d_new[2] - d[2]))
            a_f = (a[0] + alpha * (a_new[0] - a[0]),
                   a[1] + alpha * (a_new[1] - a[1]))
            t_f = t + alpha * dt
            state_f = record(t_f, d_f, a_f)
            return packaged(TerminalEvent(kind, t_f, state_f))

        d, a = d_new, a_new
        record(t_new, d, a)

    raise RuntimeError("step budget exhausted without reaching the timeout")


@dataclass(frozen=True)
class NashRun:
    """Terminal record of one strategy pairing inside a Nash report."""

    role: str
    defender: str
    intruder: str
    seed: int
    outcome: TerminalKind
    t_f: float
    terminal_payoff: float


@dataclass(frozen=True)
class NashReport:
    """Terminal payoffs of the optimal pair against one-sided deviations.

    ``ordering_holds`` asserts the saddle inequality: no alternate intruder
    beats the optimal pair by more than ``slack``, and no alternate defender
    concedes less.
    """

    center_payoff: float
    alt_intruder_max: float
    alt_defender_min: float
    slack: float
    ordering_holds: bool
    runs: tuple[NashRun, ...]


def nash_check(initial: GameState, params: GameParams,
               alt_defenders: list[Strategy], alt_intruders: list[Strategy],
               dt: float = DEFAULT_DT, timeout: float | None = None,
               seed: int = 0, slack: float = DEFAULT_NASH_SLACK) -> NashReport:
    """Play the optimal pair and every one-sided deviation from ``initial``.

    Runs are independent and aggregated by sorted (role, names, seed) keys,
    so the report does not depend on execution order.  Any failing run
    aborts the report with its exception.
    """
    if not alt_defenders or not alt_intruders:
        raise ValueError("alternate strategy lists must be nonempty")

    def play(defender: Strategy, intruder: Strategy, role: str) -> NashRun:
        spec = ScenarioSpec(initial_state=initial, params=params,
                            defender_strategy=defender,
                            intruder_strategy=intruder,
                            dt=dt, timeout=timeout, seed=seed)
        traj = run(spec)
        return NashRun(role=role, defender=defender.name, intruder=intruder.name,
                       seed=seed, outcome=traj.terminal.kind,
                       t_f=traj.terminal.t_f,
                       terminal_payoff=traj.payoff_trace[-1])

    center = play(optimal_defender(), optimal_intruder(), "center")
    runs = [center]
    runs += [play(optimal_defender(), gamma, "alt-intruder")
             for gamma in alt_intruders]
    runs += [play(omega, optimal_intruder(), "alt-defender")
             for omega in alt_defenders]
    runs.sort(key=lambda row: (row.role, row.defender, row.intruder, row.seed))

    alt_intruder_max = max(row.terminal_payoff for row in runs
                           if row.role == "alt-intruder")
    alt_defender_min = min(row.terminal_payoff for row in runs
                           if row.role == "alt-defender")
    ordering = (alt_intruder_max <= center.terminal_payoff + slack
                and center.terminal_payoff <= alt_defender_min + slack)
    return NashReport(center_payoff=center.terminal_payoff,
                      alt_intruder_max=alt_intruder_max,
                      alt_defender_min=alt_defender_min,
                      slack=slack, ordering_holds=ordering, runs=tuple(runs))
