"""
Configuration module for the weak measurement simulator
"""
from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import field_validator, Field
import os


class Settings(BaseSettings):
    """Numerical thresholds and runtime options loaded from environment variables with validation"""

    # System algebra
    overlap_threshold: float = Field(default=1e-10, gt=0)
    hermitian_tolerance: float = Field(default=1e-12, gt=0)
    eigenvalue_group_tolerance: float = Field(default=1e-10, gt=0)
    real_weak_value_tolerance: float = Field(default=1e-12, ge=0)

    # Pointer grid
    node_threshold: float = Field(default=1e-14, gt=0, lt=1)
    tail_fraction: float = Field(default=0.05, gt=0, lt=0.5)
    tail_mass_limit: float = Field(default=1e-10, gt=0)
    norm_tolerance: float = Field(default=1e-10, gt=0)
    stability_limit: float = Field(default=0.1, gt=0)
    default_mass: float = Field(default=1.0, gt=0)

    # Measurement
    success_warn_threshold: float = Field(default=1e-6, ge=0)
    success_error_threshold: float = Field(default=1e-12, ge=0)
    amplification_limit: float = Field(default=1.0, gt=0)
    tensor_size_limit: int = Field(default=1_000_000, ge=1)

    # Harness
    exact_residual_floor: float = Field(default=1e-9, gt=0)
    battery_min_overlap: float = Field(default=0.3, ge=0, lt=1)
    csv_float_format: str = "%.17g"

    # Logging
    log_level: str = Field(default="INFO", pattern=r'^(DEBUG|INFO|WARNING|ERROR|CRITICAL)$')
    log_file_path: str = ""

    @field_validator('log_file_path')
    @classmethod
    def validate_log_path(cls, v: str) -> str:
        """Ensure log directory exists"""
        log_dir = os.path.dirname(v)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir, exist_ok=True)
        return v

    @field_validator('success_error_threshold')
    @classmethod
    def validate_success_floor(cls, v: float, info) -> float:
        """The hard floor must not exceed the warning threshold"""
        warn = info.data.get('success_warn_threshold')
        if warn is not None and v > warn:
            raise ValueError('success_error_threshold must not exceed success_warn_threshold')
        return v

    model_config = SettingsConfigDict(
        env_prefix="WEAKVAL_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


# Global settings instance
settings = Settings()
