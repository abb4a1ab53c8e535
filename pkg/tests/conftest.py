import json

import numpy as np
import pytest

from lwphase.models.constants import CODATA2018
from lwphase.models.kinematics import BranchScenario, Interaction, Particle, SpinConfiguration, Worldline
from lwphase.services.action import ActionModel, PhaseResult, PhaseTable


@pytest.fixture
def static_pair():
    """Factory for two particles at rest a distance d apart over [0, T]."""
    def make(mass=1e-12, d=1.0, T=1.0, interaction=Interaction.GRAVITY, charge=0.0, constants=CODATA2018):
        history = -10.0 * d / constants.c
        particles = []
        for x in (0.0, d):
            w = Worldline.static([x, 0.0, 0.0], history, T)
            particles.append(Particle(mass=mass, charge=charge, worldline_up=w, worldline_down=w))
        return BranchScenario(tuple(particles), interaction, (0.0, T), constants)
    return make


@pytest.fixture
def displaced_pair():
    """
    Factory for two particles whose branches sit at rest at their displaced
    positions for the whole window: up-branches delta_x/2 away from the
    partner, down-branches delta_x/2 toward it.
    """
    def make(mass=1e-12, d=1.0, delta_x=0.2, T=1.0):
        history = -10.0 * d / CODATA2018.c
        half = 0.5 * delta_x
        particles = []
        for x, away in ((0.0, -1.0), (d, 1.0)):
            up = Worldline.static([x + away * half, 0.0, 0.0], history, T)
            down = Worldline.static([x - away * half, 0.0, 0.0], history, T)
            particles.append(Particle(mass=mass, charge=0.0, worldline_up=up, worldline_down=down))
        return BranchScenario(tuple(particles), Interaction.GRAVITY, (0.0, T))
    return make


@pytest.fixture
def make_table():
    """Factory for a PhaseTable from phases in basis order."""
    def make(phases, model=ActionModel.INSTANTANEOUS):
        n = int(round(np.log2(len(phases))))
        entries = {s: PhaseResult(float(phases[s.index]), 0.0) for s in SpinConfiguration.all(n)}
        return PhaseTable(entries, model, "test", 1e-12)
    return make


@pytest.fixture
def write_scenario(tmp_path):
    """Write a scenario dict to a JSON file and return its path."""
    def write(data, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)
    return write
