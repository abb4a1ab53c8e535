"""
Built-in invariant suite behind ``lwphase validate``.

Each check returns a CheckResult with the measured value and the bound it was
held to. A fault can be injected into the gravity bilinear to confirm the
suite notices convention errors.
"""
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from ..core.config import settings
from ..core.logger import logger
from ..core.performance import time_it
from ..models.boost import boost_scenario
from ..models.constants import CODATA2018, ELEMENTARY_CHARGE, planck_mass
from ..models.kinematics import (
    ETA,
    BranchScenario,
    Interaction,
    Kinematics4,
    Particle,
    SpinConfiguration,
    Worldline,
    v_bilinear_gravity,
)
from .action import (
    ActionModel,
    Bilinear,
    PhaseResult,
    PhaseTable,
    delta_phi,
    field_A,
    field_h,
    integrand_exact,
    phase,
    phase_table,
)
from .entanglement import SpinState, concurrence, entanglement_report, evolve, negativity
from .retardation import retarded_time
from .scenarios import BMVParams, build_bmv, build_spacelike

_SEED = 7
_RANDOM_SEGMENTS = 3
_RANDOM_MAX_BETA = 0.2
_ORACLE_POINTS = 32


def flipped_bilinear(ka: Kinematics4, kb: Kinematics4) -> float:
    """Sign-flipped contraction."""
    return -v_bilinear_gravity(ka, kb)


def untraced_bilinear(ka: Kinematics4, kb: Kinematics4) -> float:
    """V_a:V_b with the trace reversal left out."""
    return float(np.einsum("mn,mn->", ka.tensor, ETA @ kb.tensor @ ETA))


FAULTS: Dict[str, Bilinear] = {
    "flip-bilinear": flipped_bilinear,
    "untraced-bilinear": untraced_bilinear,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    bound: float
    detail: str = ""


@dataclass
class ValidationReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, value: float, bound: float, detail: str = "", at_least: bool = False) -> CheckResult:
        """Record value <= bound, or value > bound when at_least is set."""
        passed = value > bound if at_least else value <= bound
        result = CheckResult(name, bool(passed), float(value), float(bound), detail)
        self.checks.append(result)
        status = "PASS" if result.passed else "FAIL"
        relation = ">" if at_least else "<="
        log = logger.info if result.passed else logger.error
        log(f"[{status}] {name}: {value!r} {relation} {bound!r} {detail}".rstrip())
        return result


def _relative(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def random_worldline(rng: np.random.Generator, c: float = CODATA2018.c) -> Worldline:
    """
    Subluminal C1 piecewise cubic with node speeds below 0.2 c.

    The Hermite basis bounds the speed by 1.5 |dx|/h + |v0| + |v1|, so the
    whole curve stays below 0.7 c.
    """
    steps = rng.uniform(0.5, 1.5, _RANDOM_SEGMENTS)
    times = np.concatenate(([0.0], np.cumsum(steps)))
    positions = [rng.uniform(-1.0, 1.0, 3) * c]
    for h in steps:
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        positions.append(positions[-1] + direction * rng.uniform(0.0, _RANDOM_MAX_BETA * c * h))
    velocities = []
    for _ in times:
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        velocities.append(direction * rng.uniform(0.0, _RANDOM_MAX_BETA * c))
    return Worldline.from_waypoints(times, positions, velocities)


def check_retardation_residuals(report: ValidationReport, samples: int, tol_scale: float) -> None:
    """Random worldlines and field events; every residual must respect the tolerance."""
    rng = np.random.default_rng(_SEED)
    c = CODATA2018.c
    tol = settings.RETARDATION_RELATIVE_TOL / tol_scale * c
    worst = 0.0
    for _ in range(samples):
        w = random_worldline(rng, c)
        end = w.domain[1]
        t = end - rng.uniform(0.0, 0.25)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        target = w.position(t) + direction * rng.uniform(0.01, 0.3) * c
        rp = retarded_time(w, target, t, tol, c)
        worst = max(worst, rp.residual / rp.bound)
    report.add("retardation_residuals", worst, 1.0, f"({samples} worldlines, residual/bound)")


def uniform_motion_delay(x0, v, target, t: float, c: float) -> float:
    """Closed-form c tau = |R + v tau| for x(t') = x0 + v t', R = target - x(t)."""
    x0, v, target = (np.asarray(a, dtype=float) for a in (x0, v, target))
    r = target - x0 - v * t
    rv = float(r @ v)
    rr = float(r @ r)
    a = c * c - float(v @ v)
    root = math.sqrt(rv * rv + a * rr)
    # stable branch of the quadratic
    if rv >= 0:
        return (rv + root) / a
    return rr / (root - rv)


def check_uniform_motion(report: ValidationReport, samples: int) -> None:
    """Straight-line sources against the closed-form delay, 1e-12 relative."""
    rng = np.random.default_rng(_SEED + 1)
    c = CODATA2018.c
    worst = 0.0
    for _ in range(samples):
        x0 = rng.uniform(-1.0, 1.0, 3) * c
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        v = direction * rng.uniform(0.0, 0.5) * c
        w = Worldline([0.0, 4.0], np.stack([x0, v])[np.newaxis, :, :])
        t = rng.uniform(3.0, 4.0)
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        target = w.position(t) + direction * rng.uniform(0.05, 0.3) * c
        expected = uniform_motion_delay(x0, v, target, t, c)
        rp = retarded_time(w, target, t, 1e-13 * c * expected, c)
        worst = max(worst, _relative(t - rp.t_ret, expected))
    report.add("uniform_motion_quadratic", worst, 1e-12, f"({samples} cases, relative delay error)")


def _static_pair(mass: float = 1.0, d: float = 1.0) -> BranchScenario:
    history = -10.0 * d / CODATA2018.c
    particles = []
    for x in (0.0, d):
        w = Worldline.static([x, 0.0, 0.0], history, 1.0)
        particles.append(Particle(mass=mass, charge=0.0, worldline_up=w, worldline_down=w))
    return BranchScenario(tuple(particles), Interaction.GRAVITY, (0.0, 1.0))


def check_static_conventions(report: ValidationReport, gravity_bilinear: Bilinear) -> None:
    """Rest-frame bilinear, exact integrand and static fields against Newtonian values."""
    k = CODATA2018
    rest = Kinematics4.at_rest(k.c)
    pair_sum = gravity_bilinear(rest, rest) + gravity_bilinear(rest, rest)
    report.add("bilinear_at_rest", _relative(pair_sum, k.c ** 4), 1e-12, "(ordered-pair sum vs c^4)")

    scenario = _static_pair()
    sigma = SpinConfiguration.from_label("uu")
    value = integrand_exact(scenario, sigma, 0, 1, 0.5, gravity_bilinear=gravity_bilinear)
    report.add("exact_integrand_at_rest", _relative(value, 0.5 * k.G), 1e-12, "(per ordered pair vs G m m / 2d)")

    w = Worldline.static([0.0, 0.0, 0.0], -1.0, 1.0)
    lone_mass = BranchScenario((Particle(2.0, 0.0, w, w),), Interaction.GRAVITY, (0.0, 1.0))
    h = field_h(lone_mass, SpinConfiguration.from_label("u"), 0.5, [1.0, 0.0, 0.0])
    report.add("static_h00", _relative(h[0, 0], 2.0 * k.G * 2.0 / k.c ** 2), 1e-10, "(vs 2 G m / c^2 r)")

    lone_charge = BranchScenario((Particle(0.0, ELEMENTARY_CHARGE, w, w),), Interaction.ELECTROMAGNETISM, (0.0, 1.0))
    a = field_A(lone_charge, SpinConfiguration.from_label("u"), 0.5, [1.0, 0.0, 0.0])
    report.add("static_A0", _relative(a[0], k.k_e * ELEMENTARY_CHARGE / k.c), 1e-10, "(vs k_e q / c r)")


def _moving_params() -> BMVParams:
    # peak |v|/c ~ 1e-3, cT/d = 300
    return BMVParams(A=1e-9, d=1.0, delta_x=0.05, T=1e-6, ramp_fraction=0.1)


def check_model_hierarchy(report: ValidationReport, tol: float, gravity_bilinear: Bilinear) -> None:
    """exact ~ slow_motion to O(v/c), slow_motion ~ instantaneous to O(d/cT)."""
    params = _moving_params()
    scenario = build_bmv(params)
    sigma = SpinConfiguration.from_label("ud")
    beta = params.peak_speed() / scenario.constants.c
    exact = phase(scenario, sigma, ActionModel.EXACT, tol, gravity_bilinear).phase
    slow = phase(scenario, sigma, ActionModel.SLOW_MOTION, tol).phase
    inst = phase(scenario, sigma, ActionModel.INSTANTANEOUS, tol).phase
    report.add("exact_vs_slow_motion", _relative(exact, slow), 10.0 * beta, f"(peak v/c={beta:.3g})")
    ratio = params.d / (scenario.constants.c * params.T)
    report.add("slow_motion_vs_instantaneous", _relative(slow, inst), ratio, "(bound d/cT)")


def check_boost_invariance(report: ValidationReport, tol: float, gravity_bilinear: Bilinear) -> None:
    """Exact phase before and after 0.2 c boosts perpendicular to and along the separation."""
    scenario = build_bmv(_moving_params())
    sigma = SpinConfiguration.from_label("ud")
    before = phase(scenario, sigma, ActionModel.EXACT, tol, gravity_bilinear).phase
    refit_tol = 1e-10 * abs(before)
    worst = 0.0
    for beta in ([0.0, 0.2, 0.0], [0.2, 0.0, 0.0]):
        after = phase(boost_scenario(scenario, beta), sigma, ActionModel.EXACT, tol, gravity_bilinear).phase
        worst = max(worst, abs(after - before))
    report.add("boost_invariance", worst, 10.0 * (2.0 * tol + refit_tol), "(|beta|=0.2, both directions)")


def check_spacelike_separability(report: ValidationReport, tol: float) -> None:
    """Spacelike split: slow_motion phases additive, instantaneous phases entangling."""
    params = BMVParams(A=3.0 * planck_mass(CODATA2018), d=1.0, delta_x=0.15, T=0.8 / CODATA2018.c, ramp_fraction=0.45)
    scenario = build_spacelike(params)
    initial = SpinState.uniform(2)
    slow = entanglement_report(initial, phase_table(scenario, ActionModel.SLOW_MOTION, tol), 10.0 * tol)
    report.add("spacelike_additivity", slow.phase_residual, 10.0 * tol, "(slow_motion)")
    report.add("spacelike_negativity", slow.negativity, 1e-9, "(slow_motion)")
    inst_table = phase_table(scenario, ActionModel.INSTANTANEOUS, tol)
    report.add("instantaneous_delta_phi", delta_phi(inst_table), 0.0, "(instantaneous)", at_least=True)
    inst = entanglement_report(initial, inst_table, 10.0 * tol)
    report.add("instantaneous_negativity", inst.negativity, 1e-2, "(instantaneous)", at_least=True)


def check_entanglement_oracle(report: ValidationReport) -> None:
    """Negativity of (0, dphi, 0, 0) phases against 1/2 |sin(dphi/2)|, plus a Bell state."""
    uniform = SpinState.uniform(2).amplitudes
    worst = 0.0
    for dphi in np.linspace(0.0, 2.0 * math.pi, _ORACLE_POINTS):
        state = SpinState(uniform * np.exp(1j * np.array([0.0, dphi, 0.0, 0.0])))
        worst = max(worst, abs(negativity(state) - 0.5 * abs(math.sin(dphi / 2.0))))
    report.add("negativity_oracle", worst, 1e-10, f"({_ORACLE_POINTS}-point grid)")

    bell = SpinState.normalized([1.0, 0.0, 0.0, 1.0])
    report.add("bell_negativity", abs(negativity(bell) - 0.5), 1e-12)
    report.add("bell_concurrence", abs(concurrence(bell) - 1.0), 1e-12)


def check_local_phase_invariance(report: ValidationReport) -> None:
    """Global and single-spin phase offsets must leave negativity and concurrence unchanged."""
    rng = np.random.default_rng(_SEED + 2)
    configs = SpinConfiguration.all(2)
    table = PhaseTable(
        {s: PhaseResult(float(p), 0.0) for s, p in zip(configs, rng.uniform(-math.pi, math.pi, 4))},
        ActionModel.INSTANTANEOUS,
        "local-phase-invariance",
        0.0,
    )
    global_offset = rng.uniform(-math.pi, math.pi)
    first, second = rng.uniform(-math.pi, math.pi, (2, 2))
    shifted = table.shifted([global_offset + first[s.index // 2] + second[s.index % 2] for s in configs])
    amplitudes = rng.normal(size=4) + 1j * rng.normal(size=4)
    worst = 0.0
    for initial in (SpinState.uniform(2), SpinState.normalized(amplitudes)):
        before, after = evolve(initial, table), evolve(initial, shifted)
        worst = max(
            worst,
            abs(negativity(after) - negativity(before)),
            abs(concurrence(after) - concurrence(before)),
        )
    report.add("local_phase_invariance", worst, 1e-12, "(negativity and concurrence)")


@time_it
def run_validation(
    tol_scale: float = 1.0,
    fault: Optional[str] = None,
    samples: int = 1000,
) -> ValidationReport:
    """
    Run every check.

    Args:
        tol_scale: divide all numerical tolerances by this factor
        fault: optional key of FAULTS to inject into the gravity bilinear
        samples: random worldlines for the retardation checks

    Returns:
        ValidationReport; .passed is False if any check failed
    """
    if not tol_scale > 0:
        raise ValueError("tol_scale must be positive")
    gravity_bilinear: Callable = v_bilinear_gravity
    if fault is not None:
        if fault not in FAULTS:
            raise ValueError(f"unknown fault {fault!r}; choose from {sorted(FAULTS)}")
        logger.warning(f"injecting fault {fault!r}")
        gravity_bilinear = FAULTS[fault]
    tol = settings.DEFAULT_TOLERANCE / tol_scale

    report = ValidationReport()
    check_retardation_residuals(report, samples, tol_scale)
    check_uniform_motion(report, samples)
    check_static_conventions(report, gravity_bilinear)
    check_model_hierarchy(report, tol, gravity_bilinear)
    check_boost_invariance(report, tol, gravity_bilinear)
    check_spacelike_separability(report, tol)
    check_entanglement_oracle(report)
    check_local_phase_invariance(report)
    logger.info(f"validation {'passed' if report.passed else 'FAILED'}: {len(report.checks)} checks")
    return report
