"""
Spin-state assembly and entanglement measures.

The final spin state is sum_sigma A_sigma exp(i phi_sigma) |sigma>. Negativity
(any bipartition) is the primary measure; for two particles the concurrence
from the spin-flip construction is reported as an independent cross-check.
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..models.kinematics import Spin
from .action import PhaseTable

_NORM_TOL = 1e-12
_MAX_PARTICLES = 4

SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


@dataclass(frozen=True)
class SpinState:
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        n = int(round(math.log2(amps.size))) if amps.size else 0
        if amps.size < 2 or 2 ** n != amps.size:
            raise ScenarioError(f"need 2^N amplitudes with N >= 1, got {amps.size}", field="amplitudes")
        if n > _MAX_PARTICLES:
            raise ScenarioError(f"at most {_MAX_PARTICLES} spins are supported", field="amplitudes")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > _NORM_TOL:
            raise ScenarioError(f"state is not normalized (sum |A|^2 = {norm!r})", field="amplitudes")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def uniform(cls, n: int) -> "SpinState":
        return cls(np.full(2 ** n, 1.0 / math.sqrt(2 ** n), dtype=complex))

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> "SpinState":
        amps = np.asarray(amplitudes, dtype=complex)
        norm = math.sqrt(float(np.vdot(amps, amps).real))
        if norm == 0.0:
            raise ScenarioError("amplitudes are all zero", field="amplitudes")
        return cls(amps / norm)

    @property
    def n_particles(self) -> int:
        return int(round(math.log2(self.amplitudes.size)))

    def density_matrix(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())


@dataclass(frozen=True)
class AdditivityResult:
    is_additive: bool
    residual: float


@dataclass(frozen=True)
class EntanglementReport:
    negativity: float
    concurrence: Optional[float]
    is_separable_by_phase_additivity: bool
    phase_residual: float


def evolve(initial: SpinState, phases: PhaseTable) -> SpinState:
    """A_sigma -> A_sigma exp(i phi_sigma)."""
    if initial.n_particles != phases.n_particles:
        raise ScenarioError(
            f"state has {initial.n_particles} spins but the phase table has {phases.n_particles}",
            field="amplitudes",
        )
    return SpinState(initial.amplitudes * np.exp(1j * phases.phases()))


def _check_partition(partition: Sequence[int], n: int) -> tuple:
    part = tuple(sorted(set(int(a) for a in partition)))
    if len(part) != len(partition) or not part or len(part) >= n or part[0] < 0 or part[-1] >= n:
        raise ScenarioError(f"invalid bipartition {list(partition)!r} for {n} spins", field="partition")
    return part


def partial_transpose(rho: np.ndarray, partition: Sequence[int], n: int) -> np.ndarray:
    """Transpose the row/column indices of the spins listed in partition."""
    tensor = rho.reshape((2,) * (2 * n))
    axes = list(range(2 * n))
    for a in partition:
        axes[a], axes[n + a] = axes[n + a], axes[a]
    return tensor.transpose(axes).reshape(2 ** n, 2 ** n)


def negativity(state: SpinState, partition: Sequence[int] = (0,)) -> float:
    """
    Sum of |negative eigenvalues| of the partially transposed density matrix.

    Args:
        state: pure spin state, N >= 2
        partition: spins on one side of the cut

    Raises:
        ScenarioError: for N < 2 or an invalid partition
    """
    n = state.n_particles
    if n < 2:
        raise ScenarioError("negativity needs at least two spins", field="amplitudes")
    part = _check_partition(partition, n)
    eigenvalues = np.linalg.eigvalsh(partial_transpose(state.density_matrix(), part, n))
    return float(-np.sum(eigenvalues[eigenvalues < 0.0]))


def concurrence(state: SpinState) -> float:
    """Two-spin concurrence |<psi| sigma_y x sigma_y |psi*>| (spin-flip construction)."""
    if state.n_particles != 2:
        raise ScenarioError("concurrence is defined for two spins", field="amplitudes")
    flipped = np.kron(SIGMA_Y, SIGMA_Y) @ state.amplitudes.conj()
    return float(min(abs(np.vdot(state.amplitudes, flipped)), 1.0))


def phase_additivity_check(phases: PhaseTable, tol: float) -> AdditivityResult:
    """
    Least-squares fit of phi_sigma to c + sum_a f_a(s_a).

    The residual is the largest absolute deviation from the fit; the table
    is additive when the residual is within tol. Additive phases cannot
    entangle an initially separable state.
    """
    n = phases.n_particles
    if n < 2:
        raise ScenarioError("additivity check needs at least two spins", field="phases")
    phi = phases.phases()
    design = np.ones((2 ** n, n + 1))
    for sigma in phases.configurations():
        for a, spin in enumerate(sigma.spins):
            design[sigma.index, a + 1] = 1.0 if spin is Spin.DOWN else 0.0
    centred = phi - phi.mean()
    coef, *_ = np.linalg.lstsq(design, centred, rcond=None)
    residual = float(np.max(np.abs(centred - design @ coef)))
    return AdditivityResult(residual <= tol, residual)


def entanglement_report(
    initial: SpinState,
    phases: PhaseTable,
    tol: float,
    partition: Sequence[int] = (0,),
) -> EntanglementReport:
    """Evolve initial under phases and collect negativity, concurrence and the additivity verdict."""
    final = evolve(initial, phases)
    n = final.n_particles
    if n < 2:
        return EntanglementReport(0.0, None, True, 0.0)
    additivity = phase_additivity_check(phases, tol)
    report = EntanglementReport(
        negativity=negativity(final, partition),
        concurrence=concurrence(final) if n == 2 else None,
        is_separable_by_phase_additivity=additivity.is_additive,
        phase_residual=additivity.residual,
    )
    logger.info(
        f"negativity={report.negativity!r} additive={report.is_separable_by_phase_additivity} "
        f"residual={report.phase_residual!r}"
    )
    return report
