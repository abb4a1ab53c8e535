from .constants import CODATA2018, PhysicalConstants, planck_charge, planck_mass
from .kinematics import (
    BranchScenario,
    Interaction,
    Kinematics4,
    Particle,
    Spin,
    SpinConfiguration,
    Worldline,
    v_bilinear_em,
    v_bilinear_gravity,
)
from .boost import LorentzBoost, boost_scenario

__all__ = [
    "CODATA2018",
    "PhysicalConstants",
    "planck_charge",
    "planck_mass",
    "BranchScenario",
    "Interaction",
    "Kinematics4",
    "Particle",
    "Spin",
    "SpinConfiguration",
    "Worldline",
    "v_bilinear_em",
    "v_bilinear_gravity",
    "LorentzBoost",
    "boost_scenario",
]
