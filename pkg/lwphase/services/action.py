"""
On-shell action phases.

For every spin configuration sigma the phase is phi_sigma = S_F^sigma / hbar,
where S_F is a sum over ordered pairs (a, b), a != b, of time integrals along
particle b's branch worldline of an integrand that depends on particle a at
the retarded time t_ab(t). Self-interaction terms (a == b) only add a global
phase and are dropped.

Per ordered pair and per unit time, the integrands are

    exact          gravity  (G / c^4) m_a m_b Vbar_a(t_ab):V_b(t) / (d - d.v_a/c)
                   EM       (k_e / 2c^2) q_a q_b v_a(t_ab).v_b(t) / (d - d.v_a/c)
    slow_motion    gravity  G m_a m_b / (2 d)       EM  -k_e q_a q_b / (2 d)
    instantaneous  as slow_motion with d = |x_b(t) - x_a(t)|

With two particles at rest the exact gravity integrand is G m_a m_b / (2 d)
per ordered term, so all three models give G m1 m2 T / (hbar d).
"""
import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import settings
from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..core.performance import time_it
from ..models.kinematics import (
    BranchScenario,
    Interaction,
    Kinematics4,
    SpinConfiguration,
    trace_reversed,
    v_bilinear_em,
    v_bilinear_gravity,
)
from .quadrature import integrate_panels
from .retardation import default_tolerance, lightcone_arrival, pair_retardation, retarded_time

Bilinear = Callable[[Kinematics4, Kinematics4], float]


class ActionModel(str, enum.Enum):
    EXACT = "exact"
    SLOW_MOTION = "slow_motion"
    INSTANTANEOUS = "instantaneous"


@dataclass(frozen=True)
class PhaseResult:
    phase: float
    quad_error: float


@dataclass(frozen=True)
class PhaseTable:
    entries: Dict[SpinConfiguration, PhaseResult]
    model: ActionModel
    scenario_digest: str
    tolerance: float

    def __post_init__(self):
        n = len(next(iter(self.entries)))
        if len(self.entries) != 2 ** n:
            raise ValueError(f"phase table needs all {2 ** n} spin configurations, got {len(self.entries)}")

    @property
    def n_particles(self) -> int:
        return len(next(iter(self.entries)))

    def configurations(self) -> List[SpinConfiguration]:
        return sorted(self.entries, key=lambda s: s.index)

    def phases(self) -> np.ndarray:
        """Phases in basis order (particle 0 most significant, up = 0)."""
        return np.array([self.entries[s].phase for s in self.configurations()])

    def __getitem__(self, label: str) -> PhaseResult:
        return self.entries[SpinConfiguration.from_label(label)]

    def shifted(self, offsets: Sequence[float]) -> "PhaseTable":
        """Copy with offsets[i] added to the i-th phase in basis order."""
        entries = {
            s: PhaseResult(self.entries[s].phase + float(offsets[s.index]), self.entries[s].quad_error)
            for s in self.entries
        }
        return PhaseTable(entries, self.model, self.scenario_digest, self.tolerance)


def _check_pair(scenario: BranchScenario, a: int, b: int) -> None:
    if a == b:
        raise ValueError("self-interaction terms are excluded; a and b must differ")
    n = scenario.n_particles
    if not (0 <= a < n and 0 <= b < n):
        raise ScenarioError(f"particle indices ({a}, {b}) out of range for {n} particles", field="pair")


def integrand_exact(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    t: float,
    tol: Optional[float] = None,
    gravity_bilinear: Bilinear = v_bilinear_gravity,
) -> float:
    """Exact retarded (Lienard-Wiechert type) integrand in joules."""
    _check_pair(scenario, a, b)
    k = scenario.constants
    rp = pair_retardation(scenario, sigma, a, b, t, tol)
    ka = Kinematics4.from_velocity(rp.v_ret, k.c)
    kb = scenario.worldline(b, sigma).kinematics(t, k.c)
    pa, pb = scenario.particles[a], scenario.particles[b]
    if scenario.interaction is Interaction.GRAVITY:
        return k.G / k.c ** 4 * pa.mass * pb.mass * gravity_bilinear(ka, kb) / rp.denom
    return k.k_e / (2.0 * k.c ** 2) * pa.charge * pb.charge * v_bilinear_em(ka, kb) / rp.denom


def _static_coupling(scenario: BranchScenario, a: int, b: int) -> float:
    k = scenario.constants
    pa, pb = scenario.particles[a], scenario.particles[b]
    if scenario.interaction is Interaction.GRAVITY:
        return 0.5 * k.G * pa.mass * pb.mass
    return -0.5 * k.k_e * pa.charge * pb.charge


def integrand_slow_motion(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    t: float,
    tol: Optional[float] = None,
) -> float:
    """Velocities dropped, retardation kept."""
    _check_pair(scenario, a, b)
    rp = pair_retardation(scenario, sigma, a, b, t, tol)
    return _static_coupling(scenario, a, b) / rp.d


def integrand_instantaneous(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    t: float,
) -> float:
    """Retarded time replaced by coordinate time."""
    _check_pair(scenario, a, b)
    d_vec = scenario.worldline(b, sigma).position(t) - scenario.worldline(a, sigma).position(t)
    d = float(np.sqrt(d_vec @ d_vec))
    if d == 0.0:
        raise ScenarioError(f"particles {a} and {b} coincide at t={t!r}", field="particles")
    return _static_coupling(scenario, a, b) / d


def pair_corners(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    model: ActionModel,
    tol: Optional[float] = None,
) -> List[float]:
    """
    Times in the window where the (a, b) integrand has a kink: corners of b's
    worldline and, for retarded models, the arrival times at b of signals
    leaving a's corners.
    """
    tol = tol if tol is not None else default_tolerance(scenario)
    c = scenario.constants.c
    t_i, t_f = scenario.target_window(b)
    source = scenario.worldline(a, sigma)
    target = scenario.worldline(b, sigma)
    corners = [t for t in target.corners if t_i < t < t_f]
    for tau in source.corners:
        if tau >= t_f:
            continue
        if model is ActionModel.INSTANTANEOUS:
            arrival = tau
        else:
            arrival = lightcone_arrival(target, tau, source.position(tau), tol, c)
        if arrival is not None and t_i < arrival < t_f:
            corners.append(arrival)
    return sorted(set(corners))


def _pair_integrand(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    model: ActionModel,
    retard_tol: float,
    gravity_bilinear: Bilinear,
) -> Callable[[float], float]:
    hbar = scenario.constants.hbar
    if model is ActionModel.EXACT:
        return lambda t: integrand_exact(scenario, sigma, a, b, t, retard_tol, gravity_bilinear) / hbar
    if model is ActionModel.SLOW_MOTION:
        return lambda t: integrand_slow_motion(scenario, sigma, a, b, t, retard_tol) / hbar
    return lambda t: integrand_instantaneous(scenario, sigma, a, b, t) / hbar


def pair_phase(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    a: int,
    b: int,
    model: ActionModel,
    tol: float,
    interval: Optional[Tuple[float, float]] = None,
    gravity_bilinear: Bilinear = v_bilinear_gravity,
) -> PhaseResult:
    """
    Phase contributed by the ordered pair (a, b) over interval (default: the
    window of the target particle b).
    """
    _check_pair(scenario, a, b)
    lo, hi = interval if interval is not None else scenario.target_window(b)
    retard_tol = default_tolerance(scenario)
    f = _pair_integrand(scenario, sigma, a, b, ActionModel(model), retard_tol, gravity_bilinear)
    corners = pair_corners(scenario, sigma, a, b, ActionModel(model), retard_tol)
    result = integrate_panels(f, lo, hi, corners, tol)
    logger.debug(
        f"pair ({a},{b}) sigma={sigma.label} model={ActionModel(model).value}: "
        f"{result.value!r} rad over {result.panels} panels"
    )
    return PhaseResult(result.value, result.error)


def phase(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    model: ActionModel,
    tol: float,
    gravity_bilinear: Bilinear = v_bilinear_gravity,
) -> PhaseResult:
    """
    Accumulated phase phi_sigma = S_F^sigma / hbar over the scenario window.

    Args:
        scenario: branch scenario
        sigma: spin configuration selecting one worldline per particle
        model: exact, slow_motion or instantaneous
        tol: absolute error budget in radians
        gravity_bilinear: contraction used by the exact gravity integrand

    Returns:
        PhaseResult with the phase and its quadrature error estimate
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    if len(sigma) != scenario.n_particles:
        raise ScenarioError(
            f"spin configuration has {len(sigma)} entries for {scenario.n_particles} particles", field="sigma"
        )
    n = scenario.n_particles
    pairs = [(a, b) for a in range(n) for b in range(n) if a != b]
    if not pairs:
        return PhaseResult(0.0, 0.0)
    pair_tol = tol / len(pairs)
    results = [pair_phase(scenario, sigma, a, b, model, pair_tol, gravity_bilinear=gravity_bilinear) for a, b in pairs]
    return PhaseResult(math.fsum(r.phase for r in results), math.fsum(r.quad_error for r in results))


def _phase_for(
    sigma: SpinConfiguration,
    scenario: BranchScenario,
    model: ActionModel,
    tol: float,
    gravity_bilinear: Bilinear,
) -> PhaseResult:
    return phase(scenario, sigma, model, tol, gravity_bilinear)


@time_it
def phase_table(
    scenario: BranchScenario,
    model: ActionModel,
    tol: float,
    workers: Optional[int] = None,
    gravity_bilinear: Bilinear = v_bilinear_gravity,
) -> PhaseTable:
    """
    Phases for all 2^N spin configurations.

    Configurations are independent; with workers > 1 they are spread over a
    process pool. Results are collected in basis order either way.
    """
    model = ActionModel(model)
    configs = scenario.configurations()
    workers = workers if workers is not None else settings.MAX_WORKERS
    logger.info(
        f"phase table: {len(configs)} configurations, model={model.value}, "
        f"interaction={scenario.interaction.value}, tol={tol!r}"
    )
    job = partial(_phase_for, scenario=scenario, model=model, tol=tol, gravity_bilinear=gravity_bilinear)
    if workers > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, configs))
    else:
        results = [job(sigma) for sigma in configs]
    return PhaseTable(dict(zip(configs, results)), model, scenario.digest(), tol)


def delta_phi(table: PhaseTable) -> float:
    """phi_uu - phi_ud - phi_du + phi_dd, the local-phase-free N=2 combination."""
    if table.n_particles != 2:
        raise ValueError("delta_phi is defined for two particles")
    return math.fsum([table["uu"].phase, -table["ud"].phase, -table["du"].phase, table["dd"].phase])


def wrap_phase(value: float) -> float:
    """Reduce to (-pi, pi] for display."""
    wrapped = math.remainder(value, 2.0 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def field_h(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    t: float,
    x,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Retarded metric perturbation h^{mu nu}(t, x), summed over particles:
    (4G/c^4) m_a Vbar_a^{mu nu}(t_a) / (d_a - d_a.v_a/c).

    Raises:
        ScenarioError: if x sits on a particle at time t
    """
    k = scenario.constants
    tol = tol if tol is not None else default_tolerance(scenario)
    x = np.asarray(x, dtype=float)
    h = np.zeros((4, 4))
    for a, p in enumerate(scenario.particles):
        w = scenario.worldline(a, sigma)
        _check_off_worldline(w.position(t), x, a, t)
        rp = retarded_time(w, x, t, tol, k.c)
        va = Kinematics4.from_velocity(rp.v_ret, k.c)
        h += 4.0 * k.G / k.c ** 4 * p.mass * trace_reversed(va.tensor) / rp.denom
    return h


def field_A(
    scenario: BranchScenario,
    sigma: SpinConfiguration,
    t: float,
    x,
    tol: Optional[float] = None,
) -> np.ndarray:
    """
    Retarded four-potential A^mu(t, x) = (k_e/c^2) sum q_a v_a^mu(t_a) / (d_a - d_a.v_a/c).

    Raises:
        ScenarioError: if x sits on a particle at time t
    """
    k = scenario.constants
    tol = tol if tol is not None else default_tolerance(scenario)
    x = np.asarray(x, dtype=float)
    potential = np.zeros(4)
    for a, p in enumerate(scenario.particles):
        w = scenario.worldline(a, sigma)
        _check_off_worldline(w.position(t), x, a, t)
        rp = retarded_time(w, x, t, tol, k.c)
        va = Kinematics4.from_velocity(rp.v_ret, k.c)
        potential += k.k_e / k.c ** 2 * p.charge * va.v4 / rp.denom
    return potential


def _check_off_worldline(position: np.ndarray, x: np.ndarray, a: int, t: float) -> None:
    if np.array_equal(position, x):
        raise ScenarioError(f"field point coincides with particle {a} at t={t!r}", field="x")
