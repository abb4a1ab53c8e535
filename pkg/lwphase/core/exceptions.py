from typing import Optional


class LWPhaseError(Exception):
    """Base class for all errors raised by lwphase."""


class ScenarioError(LWPhaseError, ValueError):
    """
    Invalid scenario input: parameter violations, broken worldline
    invariants, unit problems or out-of-domain evaluation.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}" if field else message)


class NumericalError(LWPhaseError):
    """A numerical routine could not deliver its contract."""


class RetardationError(NumericalError):
    """Retarded-time root outside the worldline domain or not converged."""


class QuadratureError(NumericalError):
    """Requested tolerance not reached within the subdivision cap."""
