import numpy as np
import pytest

from lwphase.core.exceptions import RetardationError
from lwphase.models.constants import CODATA2018
from lwphase.models.kinematics import SpinConfiguration, Worldline
from lwphase.services.retardation import (
    default_tolerance,
    lightcone_arrival,
    pair_retardation,
    resolution_floor,
    retarded_time,
)
from lwphase.services.validation import random_worldline, uniform_motion_delay

C = CODATA2018.c
TOL = 1e-12 * C


def test_static_source():
    """Test the retarded time of a static source is t - r/c."""
    w = Worldline.static([0.0, 0.0, 0.0], -1.0, 1.0)
    rp = retarded_time(w, [0.3 * C, 0.4 * C, 0.0], 0.8, TOL, C)
    assert rp.t_ret == pytest.approx(0.3, abs=TOL / C)
    assert rp.d == pytest.approx(0.5 * C, rel=1e-12)
    assert rp.denom == pytest.approx(rp.d, rel=1e-15)
    assert rp.residual <= TOL


@pytest.mark.parametrize("speed", [0.0, 0.1, 0.5, 0.9])
def test_uniform_motion_matches_quadratic(speed):
    """Test straight-line sources against the closed-form delay."""
    x0 = np.array([0.2, -0.1, 0.05]) * C
    v = np.array([0.6, 0.0, 0.8]) * speed * C
    w = Worldline([0.0, 10.0], np.stack([x0, v])[np.newaxis, :, :])
    t = 8.0
    target = w.position(t) + np.array([0.1, 0.25, -0.05]) * C
    expected = uniform_motion_delay(x0, v, target, t, C)
    rp = retarded_time(w, target, t, 1e-13 * C * expected, C)
    assert (t - rp.t_ret) == pytest.approx(expected, rel=1e-12)


def test_denominator_for_receding_source():
    """Test d - d.v/c exceeds d for a source moving away from the field point."""
    v = np.array([-0.5 * C, 0.0, 0.0])
    w = Worldline([0.0, 10.0], np.stack([np.zeros(3), v])[np.newaxis, :, :])
    rp = retarded_time(w, [0.0, 0.0, 0.0], 5.0, TOL, C)
    assert rp.denom == pytest.approx(1.5 * rp.d, rel=1e-12)


def test_root_before_worldline_start_raises():
    """Test a retarded time earlier than the static history is reported."""
    w = Worldline.static([0.0, 0.0, 0.0], 0.0, 1.0)
    with pytest.raises(RetardationError):
        retarded_time(w, [C, 0.0, 0.0], 0.5, TOL, C)


def test_field_time_after_domain_raises():
    """Test a field time beyond the source domain is reported."""
    w = Worldline.static([0.0, 0.0, 0.0], 0.0, 1.0)
    with pytest.raises(RetardationError):
        retarded_time(w, [1.0, 0.0, 0.0], 2.0, TOL, C)


def test_coincident_event_raises():
    """Test a field point on the source worldline is reported."""
    w = Worldline.static([1.0, 2.0, 3.0], 0.0, 1.0)
    with pytest.raises(RetardationError):
        retarded_time(w, [1.0, 2.0, 3.0], 0.5, TOL, C)


def test_non_positive_tolerance():
    """Test the tolerance must be positive."""
    w = Worldline.static([0.0, 0.0, 0.0], 0.0, 1.0)
    with pytest.raises(ValueError):
        retarded_time(w, [1.0, 0.0, 0.0], 0.5, 0.0, C)


def test_random_worldline_residuals():
    """Test residuals stay within tolerance on random subluminal cubics."""
    rng = np.random.default_rng(11)
    for _ in range(200):
        w = random_worldline(rng, C)
        t = w.domain[1] - rng.uniform(0.0, 0.25)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        target = w.position(t) + direction * rng.uniform(0.01, 0.3) * C
        rp = retarded_time(w, target, t, TOL, C)
        assert rp.residual <= TOL
        assert w.domain[0] <= rp.t_ret < t


def test_pair_retardation(static_pair):
    """Test the pair helper uses particle b's position as the field point."""
    scenario = static_pair(d=2.0)
    sigma = SpinConfiguration.from_label("ud")
    rp = pair_retardation(scenario, sigma, 0, 1, 0.5)
    assert rp.d == pytest.approx(2.0, rel=1e-12)
    assert rp.t_ret == pytest.approx(0.5 - 2.0 / C, rel=1e-12)
    assert default_tolerance(scenario) == pytest.approx(2.0e-12)


def test_pair_retardation_same_particle(static_pair):
    """Test a == b is rejected."""
    with pytest.raises(ValueError):
        pair_retardation(static_pair(), SpinConfiguration.from_label("uu"), 1, 1, 0.5)


def test_lightcone_arrival():
    """Test the forward lightcone reaches a static target after r/c."""
    target = Worldline.static([3.0, 0.0, 0.0], 0.0, 1.0)
    arrival = lightcone_arrival(target, 0.2, [0.0, 0.0, 0.0], 1e-12, C)
    assert arrival == pytest.approx(0.2 + 3.0 / C, abs=1e-15)


def test_lightcone_arrival_after_domain():
    """Test a signal that arrives after the target domain gives None."""
    target = Worldline.static([C, 0.0, 0.0], 0.0, 1.0)
    assert lightcone_arrival(target, 0.5, [0.0, 0.0, 0.0], TOL, C) is None


def test_metre_separation_at_half_a_second(static_pair):
    """Test a 1e-12 m request at t = 0.5 s is held to the double-precision floor instead of failing."""
    scenario = static_pair(d=1.0, T=1.0)
    rp = pair_retardation(scenario, SpinConfiguration.from_label("uu"), 0, 1, 0.5, 1e-12)
    assert rp.bound > 1e-12
    assert rp.residual <= rp.bound
    assert rp.t_ret == pytest.approx(0.5 - 1.0 / C, abs=1e-15)
    assert rp.d == 1.0


def test_resolution_floor_scales_with_time():
    """Test the floor is a few ulps of c t plus the positions."""
    origin = np.zeros(3)
    near = resolution_floor(1e-9, 0.0, origin, origin, C)
    far = resolution_floor(1.0, 1.0 - 1.0 / C, origin, origin, C)
    assert far == pytest.approx(near * 1e9)
    assert 1e-12 < far < 1e-5
    assert resolution_floor(1.0, 0.9, np.array([3.0, 4.0, 0.0]), origin, C) > far


def test_retarded_time_increases_with_field_time():
    """Test t_ret grows strictly with t for a fixed field point."""
    rng = np.random.default_rng(3)
    w = random_worldline(rng, C)
    end = w.domain[1]
    target = w.position(end) + np.array([0.0, 0.3, 0.0]) * C
    times = np.linspace(end - 0.25, end, 50)
    t_rets = [retarded_time(w, target, t, TOL, C).t_ret for t in times]
    assert np.all(np.diff(t_rets) > 0)
