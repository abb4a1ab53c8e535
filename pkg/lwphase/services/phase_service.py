from typing import Optional, Sequence

from ..core.config import settings
from ..core.exceptions import ScenarioError
from ..core.logger import logger
from ..models.kinematics import BranchScenario
from .action import ActionModel, PhaseTable, phase_table
from .entanglement import EntanglementReport, SpinState, entanglement_report
from .validation import ValidationReport, run_validation


class PhaseService:
    """
    Phase tables, entanglement reports and the invariant suite for the
    command handlers.
    """

    def __init__(self, additivity_factor: float = 10.0):
        # additivity residual allowed per unit of quadrature tolerance
        self.additivity_factor = additivity_factor

    def resolve_tolerance(self, requested: Optional[float] = None) -> float:
        """Requested tolerance, or DEFAULT_TOLERANCE from the environment."""
        tol = requested if requested is not None else settings.DEFAULT_TOLERANCE
        if not tol > 0:
            raise ScenarioError(f"must be positive, got {tol!r}", field="tolerance")
        return float(tol)

    def tabulate(
        self,
        scenario: BranchScenario,
        model: ActionModel,
        tol: Optional[float] = None,
        workers: Optional[int] = None,
    ) -> PhaseTable:
        """
        Phase table for every spin configuration.

        Args:
            scenario: branch scenario
            model: action model
            tol: quadrature tolerance in radians (DEFAULT_TOLERANCE if omitted)
            workers: process pool size (MAX_WORKERS if omitted)

        Returns:
            PhaseTable in basis order
        """
        return phase_table(scenario, ActionModel(model), self.resolve_tolerance(tol), workers=workers)

    def entangle(
        self,
        initial: SpinState,
        table: PhaseTable,
        partition: Optional[Sequence[int]] = None,
    ) -> EntanglementReport:
        """Evolve initial under table and report negativity, concurrence and additivity."""
        cut = tuple(partition) if partition else (0,)
        return entanglement_report(initial, table, self.additivity_factor * table.tolerance, cut)

    def validate(self, tol_scale: float = 1.0, fault: Optional[str] = None, samples: int = 1000) -> ValidationReport:
        report = run_validation(tol_scale=tol_scale, fault=fault, samples=samples)
        if not report.passed:
            failed = [c.name for c in report.checks if not c.passed]
            logger.warning(f"validation failed checks: {', '.join(failed)}")
        return report


phase_service = PhaseService()
