"""
Canonical two-particle interferometer scenarios and closed-form estimators.

Particle 0 starts at the origin, particle 1 at distance d along x. Each spin
branch stays at rest, ramps (cubic smoothstep) to its displaced position,
holds, ramps back and rests again. Up-branches move away from the partner,
down-branches toward it.

Timeline: t_i = 0, t1 = t_hold, t2 = t1 + T, t3 = t2 + d/c, and the window
closes at t2 + (largest branch distance)/c + t_hold so every signal emitted
during the motion has arrived.
"""
import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..core.config import settings
from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..models.constants import CODATA2018, ELEMENTARY_CHARGE, PhysicalConstants, planck_charge, planck_mass
from ..models.kinematics import BranchScenario, Interaction, Particle, SpinConfiguration, Worldline
from .action import ActionModel, PhaseResult, pair_phase

# Estimators are first order in delta_x/d
ESTIMATOR_MAX_RATIO = 0.3

_SEPARATION_AXIS = np.array([1.0, 0.0, 0.0])
_HISTORY_LIGHT_TIMES = 3.0
_HISTORY_WINDOW_FRACTION = 0.1

ELECTRON_RAMP_TIME = 1e-11  # s


class SplitGeometry(str, enum.Enum):
    SYMMETRIC = "symmetric"
    ONE_SIDED = "one_sided"


@dataclass(frozen=True)
class BMVParams:
    """
    Parameters of the two-particle interferometer.

    Args:
        A: mass (kg, gravity) or charge (C, electromagnetism) of each particle
        d: initial separation (m)
        delta_x: separation between the two branches of one particle (m)
        T: superposition duration t2 - t1 (s)
        t_hold: static padding before t1 and after the last signal (s)
        interaction: gravity or electromagnetism
        ramp_fraction: share of T spent on each ramp, in (0, 0.5]
        geometry: symmetric (both branches move delta_x/2) or one_sided
            (the up-branch stays, the down-branch moves delta_x)
    """

    A: float
    d: float
    delta_x: float
    T: float
    t_hold: float = 0.0
    interaction: Interaction = Interaction.GRAVITY
    ramp_fraction: float = field(default_factory=lambda: settings.RAMP_FRACTION)
    geometry: SplitGeometry = SplitGeometry.SYMMETRIC

    def __post_init__(self):
        object.__setattr__(self, "interaction", Interaction(self.interaction))
        object.__setattr__(self, "geometry", SplitGeometry(self.geometry))
        if not self.d > 0:
            raise ScenarioError(f"separation must be positive, got {self.d!r}", field="d")
        if not 0 <= self.delta_x < self.d:
            raise ScenarioError(f"need 0 <= delta_x < d, got delta_x={self.delta_x!r}", field="delta_x")
        if not self.closest_approach > 0:
            raise ScenarioError("branches would touch; reduce delta_x", field="delta_x")
        if not self.T > 0:
            raise ScenarioError(f"duration must be positive, got {self.T!r}", field="T")
        if not self.t_hold >= 0:
            raise ScenarioError(f"hold time must be non-negative, got {self.t_hold!r}", field="t_hold")
        if not 0 < self.ramp_fraction <= 0.5:
            raise ScenarioError(f"ramp fraction must lie in (0, 0.5], got {self.ramp_fraction!r}", field="ramp_fraction")
        if self.interaction is Interaction.GRAVITY and not self.A > 0:
            raise ScenarioError("mass must be positive", field="A")
        if self.interaction is Interaction.ELECTROMAGNETISM and self.A == 0:
            raise ScenarioError("charge must be non-zero", field="A")

    @property
    def D(self) -> float:
        """d - delta_x"""
        return self.d - self.delta_x

    @property
    def closest_approach(self) -> float:
        """Smallest distance between any two branches of different particles."""
        if self.geometry is SplitGeometry.ONE_SIDED:
            return self.d - 2.0 * self.delta_x
        return self.d - self.delta_x

    @property
    def farthest_separation(self) -> float:
        if self.geometry is SplitGeometry.ONE_SIDED:
            return self.d
        return self.d + self.delta_x

    @property
    def ramp_time(self) -> float:
        return self.ramp_fraction * self.T

    def displacements(self) -> tuple:
        """(up, down) displacement magnitudes toward the partner; negative is away."""
        if self.geometry is SplitGeometry.ONE_SIDED:
            return 0.0, self.delta_x
        return -0.5 * self.delta_x, 0.5 * self.delta_x

    def peak_speed(self) -> float:
        """Peak branch speed; a cubic smoothstep over time r covering s peaks at 1.5 s / r."""
        s = max(abs(x) for x in self.displacements())
        return 1.5 * s / self.ramp_time


@dataclass(frozen=True)
class BMVTimeline:
    t_i: float
    t1: float
    t2: float
    t3: float
    t_f: float


def bmv_timeline(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> BMVTimeline:
    t1 = params.t_hold
    t2 = t1 + params.T
    t3 = t2 + params.d / constants.c
    t_f = t2 + params.farthest_separation / constants.c + params.t_hold
    return BMVTimeline(0.0, t1, t2, t3, t_f)


def _branch_worldline(
    origin: np.ndarray,
    shift: np.ndarray,
    timeline: BMVTimeline,
    ramp: float,
    plateau: float,
    t_start: float,
) -> Worldline:
    times = [t_start, timeline.t1, timeline.t1 + ramp, timeline.t2 - ramp, timeline.t2, timeline.t_f]
    positions = [origin, origin, origin + shift, origin + shift, origin, origin]
    if plateau <= 0.0 or times[2] >= times[3]:
        del times[3], positions[3]
    return Worldline.from_waypoints(times, positions)


def build_bmv(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> BranchScenario:
    """
    Two particles with spin-dependent displacement along their separation.

    Worldlines carry a static history reaching back a few light-crossing
    times before the window so retarded times at t_i stay inside the domain.

    Raises:
        ScenarioError: if the ramps would need |v| >= c
    """
    if params.peak_speed() >= constants.c:
        raise ScenarioError(
            f"ramps need peak speed {params.peak_speed() / constants.c!r} c; lengthen T or the ramp fraction",
            field="ramp_fraction",
        )
    timeline = bmv_timeline(params, constants)
    lookback = (
        _HISTORY_LIGHT_TIMES * params.farthest_separation / constants.c
        + _HISTORY_WINDOW_FRACTION * (timeline.t_f - timeline.t_i)
    )
    t_start = timeline.t_i - lookback
    ramp = params.ramp_time
    plateau = params.T * (1.0 - 2.0 * params.ramp_fraction)
    toward_up, toward_down = params.displacements()

    particles = []
    for origin, toward in ((np.zeros(3), _SEPARATION_AXIS), (params.d * _SEPARATION_AXIS, -_SEPARATION_AXIS)):
        up = _branch_worldline(origin, toward_up * toward, timeline, ramp, plateau, t_start)
        down = _branch_worldline(origin, toward_down * toward, timeline, ramp, plateau, t_start)
        if params.interaction is Interaction.GRAVITY:
            particles.append(Particle(mass=params.A, charge=0.0, worldline_up=up, worldline_down=down))
        else:
            particles.append(Particle(mass=0.0, charge=params.A, worldline_up=up, worldline_down=down))

    scenario = BranchScenario(tuple(particles), params.interaction, (timeline.t_i, timeline.t_f), constants)
    logger.info(
        f"built {params.geometry.value} scenario: d={params.d!r} delta_x={params.delta_x!r} "
        f"T={params.T!r} cT/d={constants.c * params.T / params.d!r} digest={scenario.digest()}"
    )
    return scenario


def build_spacelike(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> BranchScenario:
    """
    As build_bmv, with the superposition shorter than the light-crossing time.

    Raises:
        ScenarioError: if c T >= d
    """
    cT = constants.c * params.T
    if not cT < params.d:
        raise ScenarioError(f"spacelike split needs c*T < d, got c*T/d={cT / params.d!r}", field="T")
    if cT >= params.closest_approach:
        logger.warning(
            f"c*T={cT!r} m reaches the closest branch distance {params.closest_approach!r} m; "
            "phases need not be exactly additive"
        )
    return build_bmv(params, constants)


def reference_scale(interaction: Interaction, constants: PhysicalConstants = CODATA2018) -> float:
    """Planck mass for gravity, Planck charge for electromagnetism."""
    if Interaction(interaction) is Interaction.GRAVITY:
        return planck_mass(constants)
    return planck_charge(constants)


def delta_phi_scaling(a_ratio: float, x_ratio: float, ct_over_D: float) -> float:
    """(A/A_P)^2 (delta_x/d)^2 (cT/D)"""
    if x_ratio > ESTIMATOR_MAX_RATIO:
        logger.warning(f"delta_x/d={x_ratio!r} is outside the small-displacement regime of the estimate")
    return a_ratio ** 2 * x_ratio ** 2 * ct_over_D


def estimate_delta_phi(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> float:
    """
    Order-of-magnitude phase difference; entanglement peaks near pi.

    Args:
        params: interferometer parameters
        constants: physical constants

    Returns:
        (A/A_P)^2 (delta_x/d)^2 (cT/D) in radians
    """
    a_ratio = abs(params.A) / reference_scale(params.interaction, constants)
    return delta_phi_scaling(a_ratio, params.delta_x / params.d, constants.c * params.T / params.D)


def estimate_retardation_correction(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> float:
    """
    Change of the estimate under T -> T - d/c: (A/A_P)^2 (delta_x/d)^2.

    Assumes the branches split and recombine abruptly. Ramps longer than d/c
    let the slow-motion phase follow the instantaneous one and the actual
    correction falls far below this value.
    """
    a_ratio = abs(params.A) / reference_scale(params.interaction, constants)
    x_ratio = params.delta_x / params.d
    if x_ratio > ESTIMATOR_MAX_RATIO:
        logger.warning(f"delta_x/d={x_ratio!r} is outside the small-displacement regime of the estimate")
    return a_ratio ** 2 * x_ratio ** 2


def newtonian_delta_phi(params: BMVParams, constants: PhysicalConstants = CODATA2018) -> float:
    """
    phi_uu - phi_ud - phi_du + phi_dd for square pulses of length T in the
    instantaneous static limit, using the exact branch distances.
    """
    if params.interaction is Interaction.GRAVITY:
        strength = constants.G * params.A ** 2 / constants.hbar
    else:
        strength = -constants.k_e * params.A ** 2 / constants.hbar
    up, down = params.displacements()
    # branch distance shrinks by the sum of both particles' displacements toward each other
    distance = {
        "uu": params.d - 2.0 * up,
        "ud": params.d - up - down,
        "du": params.d - up - down,
        "dd": params.d - 2.0 * down,
    }
    combo = math.fsum(
        [1.0 / distance["uu"], -1.0 / distance["ud"], -1.0 / distance["du"], 1.0 / distance["dd"]]
    )
    return strength * params.T * combo


def electron_interferometer() -> BMVParams:
    """
    Single-electron interferometer at d = 1 cm with delta_x/d = 0.3 and
    T = 50 ns.

    The branches split and recombine over 10 ps ramps, about 0.3 d/c and a
    peak speed of 0.75 c. Ramps much longer than d/c wash out the
    retardation correction that estimate_retardation_correction predicts.
    """
    T = 50e-9
    return BMVParams(
        A=ELEMENTARY_CHARGE,
        d=1e-2,
        delta_x=3e-3,
        T=T,
        t_hold=5e-9,
        interaction=Interaction.ELECTROMAGNETISM,
        ramp_fraction=ELECTRON_RAMP_TIME / T,
    )


def interval_decomposition(
    scenario: BranchScenario,
    params: BMVParams,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    model: ActionModel,
    tol: float,
) -> List[PhaseResult]:
    """
    Pair phase integrated separately over [t_i, t1], [t1, t2], [t2, t3] and
    [t3, t_f]. The four pieces add up to the full-window pair phase.

    Args:
        scenario: scenario built from params
        params: parameters used to build it, for the split times
        sigma: spin configuration
        a: source particle
        b: target particle
        model: action model
        tol: total error budget, shared equally by the pieces
    """
    timeline = bmv_timeline(params, scenario.constants)
    t_i, t_f = scenario.window
    edges = [t_i, timeline.t1, timeline.t2, min(timeline.t3, t_f), t_f]
    return [
        pair_phase(scenario, sigma, a, b, model, tol / 4.0, interval=(lo, hi))
        for lo, hi in zip(edges[:-1], edges[1:])
    ]


def scenario_for(
    builder: str,
    params: BMVParams,
    constants: Optional[PhysicalConstants] = None,
) -> BranchScenario:
    """Dispatch on builder name: "bmv" or "spacelike"."""
    constants = constants or CODATA2018
    if builder == "bmv":
        return build_bmv(params, constants)
    if builder == "spacelike":
        return build_spacelike(params, constants)
    raise ScenarioError(f"unknown builder {builder!r}", field="builder.type")
