from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # Application
    APP_NAME: str = "lwphase"
    APP_VERSION: str = "1.0.0"

    # Quadrature
    DEFAULT_TOLERANCE: float = 1e-9  # radians
    QUADRATURE_LIMIT: int = 200  # subdivisions per panel

    # Retarded-time solver
    RETARDATION_RELATIVE_TOL: float = 1e-12  # relative to scenario length scale
    RETARDATION_MAX_ITER: int = 200
    BRACKET_MAX_EXPANSIONS: int = 60

    # Worldlines
    SUBLUMINAL_SAMPLES: int = 64  # per segment
    RAMP_FRACTION: float = 0.1
    BOOST_NODES_PER_SEGMENT: int = 48

    # Execution
    MAX_WORKERS: int = 1

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None
    LOG_MAX_BYTES: int = 10 * 1024 * 1024  # 10MB
    LOG_BACKUP_COUNT: int = 5

    class Config:
        env_file = ".env"
        case_sensitive = True


# Create global settings instance
settings = Settings()
