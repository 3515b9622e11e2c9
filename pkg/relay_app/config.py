"""
Configuration management for the relay simulator.
Uses environment variables (prefix RELAY_) with pydantic-settings for validation.
"""

from functools import lru_cache

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Logging
    log_level: str = "INFO"

    # Simulation defaults
    default_dt: float = 1e-3
    default_t_final: float = 30.0
    fov_violation_threshold: float = -1e-3

    # Sweeps and verification
    sweep_workers: int = 1
    verify_seed: int = 20240601

    model_config = SettingsConfigDict(
        env_prefix="RELAY_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """Get cached settings instance."""
    return Settings()
