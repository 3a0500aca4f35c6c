"""Configuration management for randlattice services."""

from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import Optional
import os


class Settings(BaseSettings):
    """Application settings with environment variable support."""

    # Prime number theorem constants, valid for n >= 20
    c1: float = 0.4
    c2: float = 0.6
    # Bell number bound constant
    c3: float = 0.792

    # Randomness
    default_seed: int = 20231201

    # Construction
    max_search_tries: int = 64
    exhaustive_search_limit: int = 1_000_000
    truncation_box: int = 2000

    # Error analysis
    max_exact_dimension: int = 3
    adaptive_box_limit: int = 1 << 22
    max_search_candidates: int = 50_000_000
    stat_tolerance_stderr: float = 5.0

    # Experiments
    lower_bound_min_n: int = 37
    max_workers: Optional[int] = None

    # Logging Configuration
    log_level: str = "WARNING"
    log_format: str = "console"

    model_config = SettingsConfigDict(
        env_prefix="RANDLATTICE_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Global settings instance
settings = Settings()


def get_seed(seed: Optional[int] = None) -> int:
    """Get the explicit seed, the RANDLATTICE_SEED override, or the default."""
    if seed is not None:
        return seed
    env_seed = os.getenv("RANDLATTICE_SEED")
    if env_seed:
        return int(env_seed)
    return settings.default_seed
