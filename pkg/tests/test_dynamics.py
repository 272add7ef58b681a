"""Equations of motion, control laws, stepping, and terminal detection."""
import math

import numpy as np
import pytest

from hemiguard import (
    AmbiguousTerminal,
    DefenderControl,
    DefenderState,
    GameParams,
    GameState,
    IntruderControl,
    IntruderState,
    PoleSingularity,
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

PARAMS = GameParams(nu=0.8)


def test_control_validation():
    DefenderControl(omega_d=1.0)
    with pytest.raises(ValueError):
        DefenderControl(omega_d=1.2)
    # direction collapses to a sign
    assert DefenderControl(omega_d=0.0, azimuth_sign=0.5).azimuth_sign == 1.0
    assert DefenderControl(omega_d=0.0, azimuth_sign=-3.0).azimuth_sign == -1.0
    with pytest.raises(ValueError):
        IntruderControl(gamma_a=0.0, speed_fraction=1.5)
    assert IntruderControl(gamma_a=3 * math.pi).gamma_a == pytest.approx(math.pi)


def test_state_derivative_matches_hand_formula():
    state = GameState(psi=0.9, phi_d=0.3 * math.pi, r=2.0)
    dc = DefenderControl(omega_d=0.4, azimuth_sign=-1.0)
    ic = IntruderControl(gamma_a=0.25, speed_fraction=0.9)
    psi_dot, phi_dot, r_dot = state_derivative(state, dc, ic, PARAMS)
    v_a = 0.8 * 0.9
    assert phi_dot == 0.4
    assert r_dot == pytest.approx(-v_a * math.cos(0.25), abs=1e-15)
    expected_psi = (v_a * math.sin(0.25) / 2.0
                    + math.sqrt(1.0 - 0.16) / math.cos(0.3 * math.pi))
    assert psi_dot == pytest.approx(expected_psi, abs=1e-12)


def test_state_derivative_pole_guard():
    pole = GameState(psi=0.5, phi_d=math.pi / 2, r=2.0)
    ic = IntruderControl(gamma_a=0.0)
    with pytest.raises(PoleSingularity):
        state_derivative(pole, DefenderControl(omega_d=0.5), ic, PARAMS)
    # purely altitudinal motion stays defined at the pole
    psi_dot, phi_dot, _ = state_derivative(
        pole, DefenderControl(omega_d=-1.0), ic, PARAMS)
    assert phi_dot == -1.0
    assert psi_dot == pytest.approx(0.8 * math.sin(0.0) / 2.0)


def test_defender_moves_at_unit_speed():
    # with the intruder frozen, psi_dot is purely the defender's azimuth rate
    rng = np.random.default_rng(23)
    frozen = IntruderControl(gamma_a=0.0, speed_fraction=0.0)
    for _ in range(200):
        state = GameState(psi=float(rng.uniform(-3.0, 3.0)),
                          phi_d=float(rng.uniform(0.0, 1.5)),
                          r=1.0 + float(rng.uniform(0.0, 3.0)))
        dc = DefenderControl(omega_d=float(rng.uniform(-1.0, 1.0)),
                             azimuth_sign=float(rng.choice([-1.0, 1.0])))
        psi_dot, phi_dot, _ = state_derivative(state, dc, frozen, PARAMS)
        speed = math.hypot(phi_dot, psi_dot * math.cos(state.phi_d))
        assert speed == pytest.approx(1.0, abs=1e-12)


def test_integrate_step_meridian_climb_is_exact():
    states = (DefenderState(psi_d=0.7, phi_d=0.2),
              IntruderState(psi_a=2.0, r=3.0))
    controls = (DefenderControl(omega_d=1.0),
                IntruderControl(gamma_a=0.0, speed_fraction=0.0))
    defender, intruder = integrate_step(states, controls, PARAMS, 1e-2)
    assert defender.phi_d == pytest.approx(0.2 + 1e-2, abs=1e-12)
    assert defender.psi_d == pytest.approx(0.7, abs=1e-12)
    assert intruder.r == 3.0


def test_integrate_step_equator_walk():
    states = (DefenderState(psi_d=0.0, phi_d=0.0),
              IntruderState(psi_a=2.0, r=3.0))
    controls = (DefenderControl(omega_d=0.0, azimuth_sign=1.0),
                IntruderControl(gamma_a=0.0, speed_fraction=0.0))
    defender, _ = integrate_step(states, controls, PARAMS, 1e-2)
    assert defender.psi_d == pytest.approx(1e-2, abs=1e-9)
    assert defender.phi_d == pytest.approx(0.0, abs=1e-9)


def test_integrate_step_radial_run_is_exact():
    states = (DefenderState(psi_d=0.0, phi_d=1.0),
              IntruderState(psi_a=1.3, r=2.5))
    controls = (DefenderControl(omega_d=1.0),
                IntruderControl(gamma_a=0.0, speed_fraction=1.0))
    _, intruder = integrate_step(states, controls, PARAMS, 1e-2)
    # straight-line motion is integrated exactly
    assert intruder.r == pytest.approx(2.5 - 0.8 * 1e-2, abs=1e-14)
    assert intruder.psi_a == pytest.approx(1.3, abs=1e-14)


def test_integrate_step_tangential_run():
    states = (DefenderState(psi_d=0.0, phi_d=1.0),
              IntruderState(psi_a=0.0, r=2.0))
    controls = (DefenderControl(omega_d=1.0),
                IntruderControl(gamma_a=math.pi / 2, speed_fraction=1.0))
    _, intruder = integrate_step(states, controls, PARAMS, 1e-3)
    assert intruder.psi_a == pytest.approx(0.8 * 1e-3 / 2.0, abs=1e-9)
    assert intruder.r == pytest.approx(2.0, abs=1e-9)


def test_integrate_step_rejects_bad_dt():
    states = (DefenderState(psi_d=0.0, phi_d=0.5),
              IntruderState(psi_a=0.0, r=2.0))
    controls = (DefenderControl(omega_d=0.5),
                IntruderControl(gamma_a=0.0))
    with pytest.raises(ValueError):
        integrate_step(states, controls, PARAMS, 0.0)


def test_check_terminal_partition():
    assert check_terminal(GameState(psi=0.9, phi_d=0.5, r=2.0)) is None
    breach = check_terminal(GameState(psi=0.9, phi_d=0.5, r=1.0), t=2.5)
    assert breach is not None
    assert breach.kind is TerminalKind.INTRUDER_WIN
    assert breach.t_f == 2.5
    capture = check_terminal(GameState(psi=2e-4, phi_d=3e-4, r=1.5))
    assert capture is not None
    assert capture.kind is TerminalKind.DEFENDER_WIN
    with pytest.raises(AmbiguousTerminal):
        check_terminal(GameState(psi=1e-4, phi_d=0.0, r=1.0))


def test_optimal_defender_heads_for_breaching_point():
    defender = DefenderState(psi_d=0.0, phi_d=0.3 * math.pi)
    intruder = IntruderState(psi_a=0.9, r=2.0)
    control = optimal_defender_strategy(defender, intruder, PARAMS)
    assert control.omega_d == pytest.approx(-0.353589321, abs=1e-6)
    assert control.azimuth_sign == 1.0
    # the same geometry shifted in azimuth gives the same control
    shifted = optimal_defender_strategy(
        DefenderState(psi_d=2.0, phi_d=0.3 * math.pi),
        IntruderState(psi_a=2.9, r=2.0), PARAMS)
    assert shifted.omega_d == pytest.approx(control.omega_d, abs=1e-12)


def test_optimal_defender_special_cases():
    # head-on tie and pole: descend along the meridian
    head_on = optimal_defender_strategy(
        DefenderState(psi_d=0.3, phi_d=0.5),
        IntruderState(psi_a=0.3, r=2.0), PARAMS)
    assert head_on.omega_d == -1.0
    pole = optimal_defender_strategy(
        DefenderState(psi_d=0.0, phi_d=math.pi / 2),
        IntruderState(psi_a=1.0, r=2.0), PARAMS)
    assert pole.omega_d == -1.0
    # antipodal corner of a perimeter defender: break the tie by climbing
    corner = optimal_defender_strategy(
        DefenderState(psi_d=0.0, phi_d=0.0),
        IntruderState(psi_a=math.pi, r=2.0), PARAMS)
    assert corner.omega_d == 1.0


def test_optimal_intruder_heads_for_breaching_point():
    from hemiguard import solve
    defender = DefenderState(psi_d=0.0, phi_d=0.3 * math.pi)
    intruder = IntruderState(psi_a=0.9, r=2.0)
    control = optimal_intruder_strategy(defender, intruder, PARAMS)
    assert control.gamma_a == pytest.approx(0.22173852, abs=1e-6)
    assert control.speed_fraction == 1.0
    # independent check: heading angle from planar geometry to the solve's B
    sol = solve(GameState(psi=0.9, phi_d=0.3 * math.pi, r=2.0), PARAMS)
    bx, by = math.cos(sol.theta_star), math.sin(sol.theta_star)
    ax, ay = 2.0 * math.cos(0.9), 2.0 * math.sin(0.9)
    wx, wy = bx - ax, by - ay
    inward = -(wx * math.cos(0.9) + wy * math.sin(0.9))
    transverse = -wx * math.sin(0.9) + wy * math.cos(0.9)
    assert control.gamma_a == pytest.approx(
        math.atan2(transverse, inward), abs=1e-12)


def test_optimal_intruder_on_perimeter_goes_radial():
    control = optimal_intruder_strategy(
        DefenderState(psi_d=0.0, phi_d=0.5),
        IntruderState(psi_a=1.0, r=1.0), PARAMS)
    assert control.gamma_a == 0.0


def test_fixed_and_stationary_strategies():
    defender = DefenderState(psi_d=0.0, phi_d=0.5)
    intruder = IntruderState(psi_a=1.0, r=2.0)
    fd = fixed_defender(0.3, azimuth_sign=-1.0)
    c = fd.law(0.0, defender, intruder, PARAMS)
    assert (c.omega_d, c.azimuth_sign) == (0.3, -1.0)
    assert fd.name == "fixed:0.3"
    fi = fixed_intruder(0.5, speed_fraction=0.7)
    c = fi.law(3.0, defender, intruder, PARAMS)
    assert (c.gamma_a, c.speed_fraction) == (0.5, 0.7)
    si = stationary_intruder()
    assert si.law(0.0, defender, intruder, PARAMS).speed_fraction == 0.0
    # the stationary defender dithers direction but keeps |omega| = 1
    sd = stationary_defender()
    a = sd.law(0.0, defender, intruder, PARAMS)
    b = sd.law(1.5e-3, defender, intruder, PARAMS)
    assert abs(a.omega_d) == 1.0
    assert a.omega_d == -b.omega_d


def test_random_strategies_are_time_seeded():
    defender = DefenderState(psi_d=0.0, phi_d=0.5)
    intruder = IntruderState(psi_a=1.0, r=2.0)
    ri = random_intruder(42)
    again = random_intruder(42)
    other = random_intruder(43)
    # same seed, same resample window: identical draws across objects
    for t in (0.0, 0.05, 0.099, 0.15, 1.0):
        a = ri.law(t, defender, intruder, PARAMS)
        b = again.law(t, defender, intruder, PARAMS)
        assert (a.gamma_a, a.speed_fraction) == (b.gamma_a, b.speed_fraction)
        assert 0.0 <= a.speed_fraction <= 1.0
    # constant within a window
    w0 = ri.law(0.0, defender, intruder, PARAMS)
    w0_late = ri.law(0.099, defender, intruder, PARAMS)
    assert w0.gamma_a == w0_late.gamma_a
    # different seeds decorrelate
    draws = [ri.law(0.1 * k, defender, intruder, PARAMS).gamma_a
             for k in range(5)]
    draws_other = [other.law(0.1 * k, defender, intruder, PARAMS).gamma_a
                   for k in range(5)]
    assert draws != draws_other
    rd = random_defender(7)
    for t in (0.0, 0.25):
        c = rd.law(t, defender, intruder, PARAMS)
        assert -1.0 <= c.omega_d <= 1.0
    assert rd.name == "random:7"


def test_packaged_strategy_names():
    assert optimal_defender().name == "optimal"
    assert optimal_intruder().name == "optimal"
    assert stationary_defender().name == "stationary"
    assert random_intruder(3).name == "random:3"
