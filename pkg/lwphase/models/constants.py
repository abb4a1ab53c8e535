"""
Physical constants and Planck-scale reference quantities.

All values are SI. Defaults are CODATA 2018; any of them can be overridden
per run, which is how the Newtonian-limit checks dial c up.
"""
import math
from dataclasses import dataclass, replace
from typing import Optional

from ..core.exceptions import ScenarioError

# CODATA 2018
SPEED_OF_LIGHT = 299792458.0  # m/s, exact
GRAVITATIONAL_CONSTANT = 6.67430e-11  # m^3 kg^-1 s^-2
REDUCED_PLANCK = 1.054571817e-34  # J s
VACUUM_PERMITTIVITY = 8.8541878128e-12  # F/m
ELEMENTARY_CHARGE = 1.602176634e-19  # C, exact
ELECTRON_MASS = 9.1093837015e-31  # kg

_KE_CONSISTENCY = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    c: float = SPEED_OF_LIGHT
    G: float = GRAVITATIONAL_CONSTANT
    hbar: float = REDUCED_PLANCK
    k_e: float = 1.0 / (4.0 * math.pi * VACUUM_PERMITTIVITY)
    epsilon0: float = VACUUM_PERMITTIVITY

    def __post_init__(self):
        for name in ("c", "G", "hbar", "k_e", "epsilon0"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ScenarioError(f"must be finite and strictly positive, got {value!r}", field=f"constants.{name}")
        expected = 1.0 / (4.0 * math.pi * self.epsilon0)
        if abs(self.k_e - expected) > _KE_CONSISTENCY * expected:
            raise ScenarioError(
                f"k_e={self.k_e!r} inconsistent with 1/(4*pi*epsilon0)={expected!r}",
                field="constants.k_e",
            )

    @classmethod
    def with_overrides(
        cls,
        c: Optional[float] = None,
        G: Optional[float] = None,
        hbar: Optional[float] = None,
        k_e: Optional[float] = None,
        epsilon0: Optional[float] = None,
    ) -> "PhysicalConstants":
        """
        Build constants from CODATA defaults and partial overrides.

        Only one of k_e and epsilon0 needs to be given; the other is derived.
        """
        base = cls()
        if k_e is not None and epsilon0 is None:
            epsilon0 = 1.0 / (4.0 * math.pi * k_e)
        elif epsilon0 is not None and k_e is None:
            k_e = 1.0 / (4.0 * math.pi * epsilon0)
        changes = {
            name: value
            for name, value in (("c", c), ("G", G), ("hbar", hbar), ("k_e", k_e), ("epsilon0", epsilon0))
            if value is not None
        }
        return replace(base, **changes)


CODATA2018 = PhysicalConstants()


def planck_mass(constants: PhysicalConstants) -> float:
    """Planck mass sqrt(hbar c / G) in kg."""
    return math.sqrt(constants.hbar * constants.c / constants.G)


def planck_charge(constants: PhysicalConstants) -> float:
    """Planck charge sqrt(4 pi epsilon0 hbar c) in C."""
    return math.sqrt(4.0 * math.pi * constants.epsilon0 * constants.hbar * constants.c)
