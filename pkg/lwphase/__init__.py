"""Retarded on-shell action phases and spin entanglement of superposed particle branches."""
from .core.config import settings

__version__ = settings.APP_VERSION
