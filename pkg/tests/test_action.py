import math

import numpy as np
import pytest

from lwphase.core.exceptions import ScenarioError
from lwphase.models.constants import CODATA2018
from lwphase.models.kinematics import BranchScenario, Interaction, Particle, SpinConfiguration, Worldline
from lwphase.services.action import (
    ActionModel,
    PhaseResult,
    PhaseTable,
    delta_phi,
    field_A,
    field_h,
    pair_corners,
    pair_phase,
    phase,
    phase_table,
    wrap_phase,
)

G, HBAR, C, K_E = CODATA2018.G, CODATA2018.hbar, CODATA2018.c, CODATA2018.k_e
UU = SpinConfiguration.from_label("uu")


def _lone(mass=1.0, charge=0.0, interaction=Interaction.GRAVITY):
    w = Worldline.static([0.0, 0.0, 0.0], -1.0, 1.0)
    return BranchScenario((Particle(mass, charge, w, w),), interaction, (0.0, 1.0))


@pytest.mark.parametrize("model", list(ActionModel))
def test_static_pair_newtonian_phase(static_pair, model):
    """Test every model gives G m1 m2 T / (hbar d) for two particles at rest."""
    scenario = static_pair(mass=1e-12, d=1.0, T=1.0)
    result = phase(scenario, UU, model, 1e-10)
    expected = G * 1e-24 / HBAR
    assert result.phase == pytest.approx(expected, rel=1e-8)
    assert result.quad_error <= 1e-10


@pytest.mark.parametrize("model", list(ActionModel))
def test_static_pair_em_phase_is_negative(static_pair, model):
    """Test like charges at rest give -k_e q1 q2 T / (hbar d)."""
    scenario = static_pair(charge=1e-22, interaction=Interaction.ELECTROMAGNETISM)
    result = phase(scenario, UU, model, 1e-10)
    assert result.phase == pytest.approx(-K_E * 1e-44 / HBAR, rel=1e-8)
    assert result.phase < 0


def test_pair_phase_is_half_of_symmetric_total(static_pair):
    """Test each ordered pair carries half of the static phase."""
    scenario = static_pair()
    forward = pair_phase(scenario, UU, 0, 1, ActionModel.EXACT, 1e-11)
    backward = pair_phase(scenario, UU, 1, 0, ActionModel.EXACT, 1e-11)
    assert forward.phase == pytest.approx(backward.phase, rel=1e-12)
    assert forward.phase + backward.phase == pytest.approx(G * 1e-24 / HBAR, rel=1e-8)


def test_pair_phase_sub_interval(static_pair):
    """Test an explicit interval integrates only that part of the window."""
    scenario = static_pair()
    full = pair_phase(scenario, UU, 0, 1, ActionModel.SLOW_MOTION, 1e-11)
    half = pair_phase(scenario, UU, 0, 1, ActionModel.SLOW_MOTION, 1e-11, interval=(0.0, 0.5))
    assert half.phase == pytest.approx(0.5 * full.phase, rel=1e-10)


def test_self_interaction_is_rejected(static_pair):
    """Test a == b raises."""
    with pytest.raises(ValueError):
        pair_phase(static_pair(), UU, 1, 1, ActionModel.EXACT, 1e-10)


def test_single_particle_has_no_phase():
    """Test N=1 has no pair terms and a zero phase."""
    result = phase(_lone(), SpinConfiguration.from_label("u"), ActionModel.EXACT, 1e-10)
    assert result == PhaseResult(0.0, 0.0)


def test_phase_argument_errors(static_pair):
    """Test non-positive tolerance and a spin configuration of the wrong length."""
    scenario = static_pair()
    with pytest.raises(ValueError):
        phase(scenario, UU, ActionModel.EXACT, 0.0)
    with pytest.raises(ScenarioError):
        phase(scenario, SpinConfiguration.from_label("uud"), ActionModel.EXACT, 1e-10)


def test_displaced_branches_delta_phi(displaced_pair):
    """Test delta_phi of static displaced branches against the Newtonian sum."""
    mass = 1e-12
    scenario = displaced_pair(mass=mass, d=1.0, delta_x=0.2, T=1.0)
    expected = G * mass ** 2 / HBAR * (1.0 / 1.2 - 2.0 + 1.0 / 0.8)
    for model in ActionModel:
        table = phase_table(scenario, model, 1e-12)
        assert delta_phi(table) == pytest.approx(expected, rel=1e-6)


def test_static_pair_delta_phi_vanishes(static_pair):
    """Test identical branches give equal phases and delta_phi = 0."""
    table = phase_table(static_pair(), ActionModel.EXACT, 1e-10)
    phases = table.phases()
    assert np.all(phases == phases[0])
    assert delta_phi(table) == 0.0


def test_phase_table_workers_match_serial(displaced_pair):
    """Test a process pool returns the same table as the serial path."""
    scenario = displaced_pair()
    serial = phase_table(scenario, ActionModel.SLOW_MOTION, 1e-11, workers=1)
    pooled = phase_table(scenario, ActionModel.SLOW_MOTION, 1e-11, workers=2)
    assert np.array_equal(serial.phases(), pooled.phases())
    assert serial.scenario_digest == pooled.scenario_digest


def test_delta_phi_needs_two_particles(make_table):
    """Test delta_phi is only defined for N=2."""
    with pytest.raises(ValueError):
        delta_phi(make_table(np.zeros(8)))


def test_phase_table_structure(make_table):
    """Test lookup by label, basis order and shifted copies."""
    table = make_table([0.1, 0.2, 0.3, 0.4])
    assert table["du"].phase == 0.3
    assert [s.label for s in table.configurations()] == ["uu", "ud", "du", "dd"]
    shifted = table.shifted([1.0, 0.0, 0.0, 1.0])
    assert shifted.phases().tolist() == pytest.approx([1.1, 0.2, 0.3, 1.4])
    assert delta_phi(shifted) == pytest.approx(delta_phi(table) + 2.0)


def test_phase_table_requires_every_configuration():
    """Test a table with missing configurations is rejected."""
    with pytest.raises(ValueError):
        PhaseTable({UU: PhaseResult(0.0, 0.0)}, ActionModel.EXACT, "x", 1e-9)


def test_wrap_phase():
    """Test wrapping into (-pi, pi]."""
    assert wrap_phase(1.5 * math.pi) == pytest.approx(-0.5 * math.pi)
    assert wrap_phase(2.0 * math.pi + 0.1) == pytest.approx(0.1)
    assert wrap_phase(-math.pi) == math.pi
    assert wrap_phase(math.pi) == math.pi


def test_field_h_static_mass():
    """Test h00 = hii = 2Gm/(c^2 r) and vanishing off-diagonal terms at rest."""
    scenario = _lone(mass=2.0)
    h = field_h(scenario, SpinConfiguration.from_label("u"), 0.5, [3.0, 0.0, 0.0])
    expected = 2.0 * G * 2.0 / (C ** 2 * 3.0)
    assert np.diag(h) == pytest.approx([expected] * 4, rel=1e-12)
    assert np.all(h[~np.eye(4, dtype=bool)] == 0.0)


def test_field_A_static_charge():
    """Test A0 = k_e q/(c r) with no vector potential at rest."""
    scenario = _lone(mass=0.0, charge=1e-9, interaction=Interaction.ELECTROMAGNETISM)
    potential = field_A(scenario, SpinConfiguration.from_label("u"), 0.5, [0.0, 2.0, 0.0])
    assert potential[0] == pytest.approx(K_E * 1e-9 / (C * 2.0), rel=1e-12)
    assert np.all(potential[1:] == 0.0)


def test_field_on_the_worldline_raises():
    """Test evaluating a field on top of a source particle."""
    with pytest.raises(ScenarioError):
        field_h(_lone(), SpinConfiguration.from_label("u"), 0.5, [0.0, 0.0, 0.0])


def test_pair_corners_include_lightcone_arrival():
    """Test a source corner shows up at the target after the light travel time."""
    source = Worldline.from_waypoints([-1.0, 0.3, 1.0], [[0.0, 0.0, 0.0]] * 3)
    target = Worldline.static([1.0, 0.0, 0.0], -1.0, 1.0)
    scenario = BranchScenario(
        (Particle(1.0, 0.0, source, source), Particle(1.0, 0.0, target, target)), Interaction.GRAVITY, (0.0, 1.0)
    )
    retarded = pair_corners(scenario, UU, 0, 1, ActionModel.EXACT)
    instantaneous = pair_corners(scenario, UU, 0, 1, ActionModel.INSTANTANEOUS)
    assert retarded == [pytest.approx(0.3 + 1.0 / C, abs=1e-15)]
    assert instantaneous == [0.3]
    assert pair_corners(scenario, UU, 1, 0, ActionModel.EXACT) == [0.3]


def _static_couple(couplings, interaction=Interaction.GRAVITY, branches=((0.0, 0.0), (1.0, 1.0))):
    """Two static particles with (coupling, (up x, down x)) each over [0, 1]."""
    particles = []
    for coupling, xs in zip(couplings, branches):
        up, down = (Worldline.static([x, 0.0, 0.0], -1e-7, 1.0) for x in xs)
        if interaction is Interaction.GRAVITY:
            particles.append(Particle(coupling, 0.0, up, down))
        else:
            particles.append(Particle(0.0, coupling, up, down))
    return BranchScenario(tuple(particles), interaction, (0.0, 1.0))


def test_delta_phi_symmetric_under_label_swap():
    """Test relabelling the particles maps ud onto du and keeps delta_phi."""
    scenario = _static_couple((1e-12, 3e-12), branches=((-0.1, 0.05), (1.2, 0.9)))
    swapped = BranchScenario(
        tuple(reversed(scenario.particles)), scenario.interaction, scenario.window, scenario.constants
    )
    table = phase_table(scenario, ActionModel.EXACT, 1e-10)
    other = phase_table(swapped, ActionModel.EXACT, 1e-10)
    assert other["ud"].phase == pytest.approx(table["du"].phase, rel=1e-9)
    assert other["du"].phase == pytest.approx(table["ud"].phase, rel=1e-9)
    assert delta_phi(other) == pytest.approx(delta_phi(table), rel=1e-8)
    assert table["ud"].phase != pytest.approx(table["du"].phase, rel=1e-3)


@pytest.mark.parametrize(
    "interaction, base, scaled, factor",
    [
        (Interaction.GRAVITY, (1e-12, 1e-12), (2e-12, 3e-12), 6.0),
        (Interaction.ELECTROMAGNETISM, (1e-22, 1e-22), (-1e-22, 2e-22), -2.0),
    ],
)
def test_phase_is_bilinear_in_couplings(interaction, base, scaled, factor):
    """Test the phase scales with the product of the two masses or charges."""
    reference = phase(_static_couple(base, interaction), UU, ActionModel.EXACT, 1e-10).phase
    result = phase(_static_couple(scaled, interaction), UU, ActionModel.EXACT, 1e-10).phase
    assert result == pytest.approx(factor * reference, rel=1e-9)
