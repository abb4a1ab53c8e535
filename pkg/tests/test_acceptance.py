"""
End-to-end checks of the physics the package is built to reproduce.
"""
import math
import time

import numpy as np
import pytest

from lwphase.models.boost import boost_scenario
from lwphase.models.constants import CODATA2018, ELEMENTARY_CHARGE, planck_charge, planck_mass
from lwphase.models.kinematics import SpinConfiguration, v_bilinear_gravity
from lwphase.services.action import ActionModel, delta_phi, field_h, integrand_exact, phase, phase_table
from lwphase.services.entanglement import SpinState, entanglement_report, negativity
from lwphase.services.scenarios import (
    BMVParams,
    build_bmv,
    build_spacelike,
    electron_interferometer,
    estimate_retardation_correction,
)
from lwphase.services.validation import (
    ValidationReport,
    check_retardation_residuals,
    check_static_conventions,
    check_uniform_motion,
)

pytestmark = pytest.mark.slow

C, G, HBAR = CODATA2018.c, CODATA2018.G, CODATA2018.hbar


@pytest.mark.parametrize("model", list(ActionModel))
def test_newtonian_limit(static_pair, model):
    """Test the static pair reproduces G m1 m2 T / (hbar d) quickly in every model."""
    scenario = static_pair(mass=1e-12, d=1.0, T=1.0)
    start = time.perf_counter()
    result = phase(scenario, SpinConfiguration.from_label("uu"), model, 1e-10)
    elapsed = time.perf_counter() - start
    assert result.phase == pytest.approx(G * 1e-24 / HBAR, rel=1e-8)
    assert elapsed < 1.0


def test_spacelike_split_does_not_entangle():
    """Test slow-motion phases stay additive across a spacelike split while instantaneous ones entangle."""
    tol = 1e-9
    params = BMVParams(A=3.0 * planck_mass(CODATA2018), d=1.0, delta_x=0.15, T=0.8 / C, ramp_fraction=0.45)
    start = time.perf_counter()
    scenario = build_spacelike(params)
    initial = SpinState.uniform(2)

    slow = entanglement_report(initial, phase_table(scenario, ActionModel.SLOW_MOTION, tol), 10.0 * tol)
    assert slow.is_separable_by_phase_additivity
    assert slow.phase_residual <= 10.0 * tol
    assert slow.negativity <= 1e-9

    inst_table = phase_table(scenario, ActionModel.INSTANTANEOUS, tol)
    inst = entanglement_report(initial, inst_table, 10.0 * tol)
    assert delta_phi(inst_table) > 0.0
    assert inst.negativity > 1e-2
    assert time.perf_counter() - start < 10.0


def test_retardation_correction_estimate():
    """Test the electron preset's slow-motion minus instantaneous delta_phi against its estimate."""
    params = electron_interferometer()
    assert ELEMENTARY_CHARGE / planck_charge(CODATA2018) == pytest.approx(0.0854, abs=1e-4)
    estimate = estimate_retardation_correction(params)
    assert estimate == pytest.approx(6.6e-4, rel=0.01)

    scenario = build_bmv(params)
    tol = 1e-8
    slow = delta_phi(phase_table(scenario, ActionModel.SLOW_MOTION, tol))
    inst = delta_phi(phase_table(scenario, ActionModel.INSTANTANEOUS, tol))
    ratio = abs(slow - inst) / estimate
    assert 1.0 / 3.0 < ratio < 3.0


def test_slow_motion_convergence():
    """Test |exact - slow| / |exact| falls at least linearly with peak v/c."""
    d, delta_x, ramp = 1.0, 0.1, 0.1
    sigma = SpinConfiguration.from_label("ud")
    betas = [1e-2, 1e-3, 1e-4]
    ratios = []
    for beta in betas:
        T = 0.75 / (C * beta)
        mass = math.sqrt(HBAR * d / (G * T))
        params = BMVParams(A=mass, d=d, delta_x=delta_x, T=T, ramp_fraction=ramp)
        assert params.peak_speed() / C == pytest.approx(beta, rel=1e-12)
        scenario = build_bmv(params)
        exact = phase(scenario, sigma, ActionModel.EXACT, 1e-11).phase
        slow = phase(scenario, sigma, ActionModel.SLOW_MOTION, 1e-11).phase
        ratios.append(abs(exact - slow) / abs(exact))
    for (b1, r1), (b2, r2) in zip(zip(betas, ratios), zip(betas[1:], ratios[1:])):
        assert r2 <= 2.0 * r1 * (b2 / b1)


@pytest.mark.parametrize("beta", [[0.0, 0.2, 0.0], [0.2, 0.0, 0.0], [-0.15, 0.1, 0.05]])
def test_boost_invariance(beta):
    """Test the exact phase is unchanged by boosts of about 0.2 c in any direction."""
    tol = 1e-9
    params = BMVParams(A=1e-9, d=1.0, delta_x=0.05, T=1e-6, ramp_fraction=0.1)
    scenario = build_bmv(params)
    boosted = boost_scenario(scenario, beta)
    sigma = SpinConfiguration.from_label("ud")
    before = phase(scenario, sigma, ActionModel.EXACT, tol).phase
    after = phase(boosted, sigma, ActionModel.EXACT, tol).phase
    assert abs(after - before) <= 10.0 * (2.0 * tol + 1e-10 * abs(before))


def test_negativity_oracle():
    """Test negativity of (0, dphi, 0, 0) phases against 1/2 |sin(dphi/2)| on 32 points."""
    uniform = SpinState.uniform(2).amplitudes
    for dphi in np.linspace(0.0, 2.0 * math.pi, 32):
        state = SpinState(uniform * np.exp(1j * np.array([0.0, dphi, 0.0, 0.0])))
        assert negativity(state) == pytest.approx(0.5 * abs(math.sin(0.5 * dphi)), abs=1e-10)


def test_retarded_time_solver_at_scale():
    """Test residuals on 10^4 random worldlines and uniform motion against the quadratic."""
    report = ValidationReport()
    check_retardation_residuals(report, 10_000, 1.0)
    check_uniform_motion(report, 10_000)
    assert report.passed, report.checks


def test_convention_chain(static_pair):
    """Test the rest-frame integrand and the static metric perturbation."""
    report = ValidationReport()
    check_static_conventions(report, v_bilinear_gravity)
    assert report.passed, report.checks

    scenario = static_pair(mass=2.0, d=3.0)
    uu = SpinConfiguration.from_label("uu")
    both_terms = integrand_exact(scenario, uu, 0, 1, 0.5) + integrand_exact(scenario, uu, 1, 0, 0.5)
    assert both_terms == pytest.approx(G * 4.0 / 3.0, rel=1e-12)

    h = field_h(scenario, uu, 0.5, [0.0, 4.0, 0.0])
    # distances 4 and 5 to the two masses
    assert h[0, 0] == pytest.approx(2.0 * G * 2.0 / C ** 2 * (1.0 / 4.0 + 1.0 / 5.0), rel=1e-10)
