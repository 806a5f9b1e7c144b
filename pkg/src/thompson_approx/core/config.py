"""
Configuration management using Pydantic settings.
"""

from functools import lru_cache
from pathlib import Path

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..paths import get_log_dir


class Settings(BaseSettings):
    """Numerical defaults and runtime switches, overridable via THOMPSON_* variables."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="THOMPSON_",
        case_sensitive=False,
    )

    # Input validation
    endpoint_tol: float = Field(default=1e-9, description="Tolerance for f(0) = 0 and f(1) = 1")
    positivity_tol: float = Field(default=1e-9, description="Required lower bound on f'")
    lift_tol: float = Field(default=1e-9, description="Tolerance for f(x + 1) = f(x) + 1")
    validation_grid: int = Field(default=1024, description="Sample intervals for validators")

    # Construction
    derivative_grid: int = Field(default=1024, description="Sample intervals for estimating S")
    derivative_safety: float = Field(
        default=1.25, description="Safety factor applied to the sampled derivative maximum"
    )
    eta_shrink_exponents: list[int] = Field(
        default=[40, 44, 48, 52],
        description="Each I_i is shrunk by 2^-e * width before choosing eta_i, tried in order",
    )

    # Certification
    cert_grid_min: int = Field(default=4096, description="Minimum certification grid size")
    cert_grid_factor: int = Field(
        default=4, description="Certification grid is at least this many times the piece count"
    )

    # Derivative analysis
    rotation_tol: float = Field(default=1e-6, description="|f' - 1| tolerance for rotations")
    gap_guard: float = Field(
        default=2.0**-40, description="Distances to a power of 2 below this count as zero"
    )
    gap_grid: int = Field(default=4096, description="Sample intervals for derivative scans")

    # Output
    sample_digits: int = Field(default=17, description="Significant digits in CSV samples")

    # Runtime settings
    debug: bool = Field(default=False, description="Enable debug logging")
    log_to_file: bool = Field(default=False, description="Also write logs under log_dir")
    log_dir: Path = Field(default_factory=get_log_dir, description="Log file directory")

    def certification_grid(self, pieces: int) -> int:
        """Default certification grid: max(cert_grid_min, cert_grid_factor * pieces)."""
        return max(self.cert_grid_min, self.cert_grid_factor * pieces)

    def ensure_directories(self) -> None:
        if self.log_to_file:
            self.log_dir.mkdir(parents=True, exist_ok=True)


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance."""
    settings = Settings()
    settings.ensure_directories()
    return settings
