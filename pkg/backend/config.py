"""
Configuration settings for the competition lab
"""

from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings"""

    # Application
    APP_NAME: str = "Competition Lab"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Sampling defaults
    DEFAULT_SEED: int = 20240601
    DEFAULT_SAMPLES: int = 200_000
    DEFAULT_CHUNKS: int = 8
    N_JOBS: int = 1
    BATCH_SIZE: int = 65_536
    MEDIAN_OF_MEANS_GROUPS: int = 32

    # Numerics
    QUAD_TOLERANCE: float = 1e-9

    # Verification
    STDERR_MARGIN: float = 4.0
    ESCALATION_FACTOR: int = 10

    # Output
    OUTPUT_DIR: str = "results"

    class Config:
        env_file = ".env"
        case_sensitive = True


settings = Settings()
