"""Configuration for nilplab."""

from pydantic_settings import BaseSettings
from typing import List


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Safety cap on constructed algebras
    max_dim: int = 512

    # Logging
    log_level: str = "WARNING"

    # Scenario defaults
    default_degree: int = 8
    default_prime: int = 5
    tower_degrees: List[int] = [4, 6, 8, 10]

    # Random equivalence suite
    property_cases: int = 200
    random_seed: int = 20240917

    # Parallel scenario execution (1 = sequential)
    max_workers: int = 1

    # Operator algebras larger than this skip the pairwise closure re-check
    closure_check_limit: int = 48

    # Full M(A) closures on truncated stages only up to this degree
    operator_degree_limit: int = 5

    class Config:
        env_prefix = "NILPLAB_"
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


settings = Settings()
