from .config import settings, Settings
from .logger import logger, setup_logger
from .performance import time_it
from .exceptions import (
    LWPhaseError,
    ScenarioError,
    NumericalError,
    RetardationError,
    QuadratureError,
)

__all__ = [
    "settings",
    "Settings",
    "logger",
    "setup_logger",
    "time_it",
    "LWPhaseError",
    "ScenarioError",
    "NumericalError",
    "RetardationError",
    "QuadratureError",
]
