"""Barrier construction, classification, curvature, and level sets."""
import math

import pytest

from hemiguard import (
    GameParams,
    GameState,
    LevelSetInsidePerimeter,
    RegionLabel,
    SingularCurvature,
    barrier_curve,
    barrier_point,
    classify,
    curvature,
    level_set,
    payoff,
)

PARAMS = GameParams(nu=0.8)


def test_barrier_point_perimeter_defender():
    s = barrier_point(0.0, 0.8, math.pi / 3)
    assert s.beta == pytest.approx(0.6435011088, abs=1e-9)
    assert s.x == pytest.approx(0.8377580410, abs=1e-9)
    assert s.r == pytest.approx(1.6453413580, abs=1e-9)
    assert s.psi == pytest.approx(0.6276625797, abs=1e-9)


def test_barrier_point_pole_defender_is_circle():
    # every azimuth is equidistant from the pole, so r = 1 + nu pi / 2
    for theta in (0.0, 0.7, 2.0, math.pi):
        s = barrier_point(math.pi / 2, 0.8, theta)
        assert s.beta == pytest.approx(math.pi / 2, abs=1e-12)
        assert s.x == pytest.approx(0.8 * math.pi / 2, abs=1e-12)
        assert s.r == pytest.approx(2.2566370614, abs=1e-9)


def test_barrier_point_under_defender():
    s = barrier_point(0.3 * math.pi, 0.8, 0.0)
    assert s.beta == pytest.approx(math.pi / 2, abs=1e-12)
    assert s.r == pytest.approx(1.7539822369, abs=1e-9)
    assert s.psi == pytest.approx(0.0, abs=1e-12)


def test_barrier_samples_have_zero_margin():
    curve = barrier_curve(0.3 * math.pi, 0.8, n_samples=64)
    assert len(curve.samples) == 64
    for s in curve.samples:
        state = GameState(psi=s.psi, phi_d=0.3 * math.pi, r=s.r)
        assert abs(payoff(state, PARAMS, s.theta)) < 1e-9


def test_barrier_curve_closes_and_mirrors():
    curve = barrier_curve(0.2 * math.pi, 0.8, n_samples=65)
    first, last = curve.samples[0], curve.samples[-1]
    fx = first.r * math.cos(first.psi), first.r * math.sin(first.psi)
    lx = last.r * math.cos(last.psi), last.r * math.sin(last.psi)
    assert math.hypot(fx[0] - lx[0], fx[1] - lx[1]) < 1e-9
    n = len(curve.samples)
    for i in range(1, n - 1):
        mate = curve.samples[n - 1 - i]
        assert curve.samples[i].psi == pytest.approx(-mate.psi, abs=1e-12)
        assert curve.samples[i].r == pytest.approx(mate.r, abs=1e-12)


def test_barrier_radius_grows_away_from_defender():
    # odd count puts theta = 0 on the grid
    curve = barrier_curve(0.3 * math.pi, 0.8, n_samples=65)
    upper = [s for s in curve.samples if 0.0 <= s.theta <= math.pi]
    radii = [s.r for s in upper]
    assert radii == sorted(radii)
    assert radii[0] == pytest.approx(1.7539822369, abs=1e-9)


def test_barrier_curve_rejects_tiny_sampling():
    with pytest.raises(ValueError):
        barrier_curve(0.3 * math.pi, 0.8, n_samples=8)
    with pytest.raises(ValueError):
        level_set(0.3 * math.pi, 0.8, 0.1, n_samples=4)


def test_classify_splits_at_the_barrier():
    s = barrier_point(0.3 * math.pi, 0.8, 1.0)
    on = GameState(psi=s.psi, phi_d=0.3 * math.pi, r=s.r)
    assert classify(on, PARAMS) is RegionLabel.ON_BARRIER
    inside = GameState(psi=s.psi, phi_d=0.3 * math.pi, r=s.r - 1e-3)
    outside = GameState(psi=s.psi, phi_d=0.3 * math.pi, r=s.r + 1e-3)
    assert classify(inside, PARAMS) is RegionLabel.INTRUDER_WINNING
    assert classify(outside, PARAMS) is RegionLabel.DEFENDER_WINNING


def test_classify_band_override():
    state = GameState(psi=0.9, phi_d=0.3 * math.pi, r=2.0)
    assert classify(state, PARAMS) is RegionLabel.INTRUDER_WINNING
    assert classify(state, PARAMS, band=1.0) is RegionLabel.ON_BARRIER


def test_curvature_of_pole_circle():
    expected = 1.0 / (1.0 + 0.4 * math.pi)
    for theta in (0.0, 1.0, math.pi):
        assert curvature(math.pi / 2, 0.8, theta) == pytest.approx(
            expected, abs=1e-6)


def test_curvature_guards():
    with pytest.raises(SingularCurvature):
        curvature(0.0, 0.8, 1.0)
    with pytest.raises(ValueError):
        curvature(0.3 * math.pi, 0.8, -0.1)


def test_level_set_zero_is_the_barrier():
    base = barrier_curve(0.3 * math.pi, 0.8, n_samples=32)
    zero = level_set(0.3 * math.pi, 0.8, 0.0, n_samples=32)
    for a, b in zip(base.samples, zero.samples):
        assert a.r == pytest.approx(b.r, abs=1e-12)
        assert a.psi == pytest.approx(b.psi, abs=1e-12)


def test_level_set_holds_requested_margin():
    for k in (0.3, -0.5):
        curve = level_set(0.3 * math.pi, 0.8, k, n_samples=32)
        for s in curve.samples:
            state = GameState(psi=s.psi, phi_d=0.3 * math.pi, r=s.r)
            assert payoff(state, PARAMS, s.theta) == pytest.approx(k, abs=1e-9)


def test_level_set_shifts_along_the_chord():
    base = barrier_curve(0.3 * math.pi, 0.8, n_samples=32)
    inner = level_set(0.3 * math.pi, 0.8, 0.3, n_samples=32)
    for a, b in zip(base.samples, inner.samples):
        assert a.x - b.x == pytest.approx(0.8 * 0.3, abs=1e-12)


def test_level_set_refuses_to_cross_perimeter():
    with pytest.raises(LevelSetInsidePerimeter):
        level_set(0.3 * math.pi, 0.8, 1.5)
