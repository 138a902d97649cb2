from pathlib import Path

from pydantic import AliasChoices, Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="L4WB_",
        case_sensitive=False,
        extra="ignore",
        populate_by_name=True,
    )

    # Application settings
    app_name: str = Field(default="L4 Workbench")
    log_level: str = Field(default="INFO")

    # Numerics
    working_digits: int = Field(default=40, ge=30)
    quoted_digits: int = Field(default=15)
    default_tol: float = Field(default=1e-8)
    coefficient_floor: int = Field(default=5000)
    coefficient_ceiling: int = Field(default=250000)

    # Cache settings
    cache_dir: Path = Field(
        default=Path(".l4wb-cache"),
        validation_alias=AliasChoices("l4wb_cache", "l4wb_cache_dir"),
    )
    cache_enabled: bool = Field(default=True)

    # Worker pool
    threads: int = Field(default=1, ge=1)

    # Approximate functional equation quadrature
    afe_sigma: float = Field(default=1.5)
    afe_step: float = Field(default=0.5)
    afe_order: int = Field(default=16)
    tail_exponent: float = Field(default=3.0)

    # Fundamental domain quadrature
    grid_y_max: float = Field(default=8.0)
    grid_order: int = Field(default=24)
    grid_rel_tol: float = Field(default=1e-6)
    grid_max_refinements: int = Field(default=4)

    # Bessel experiments
    bessel_points_per_oscillation: int = Field(default=20)
    window_c1: float = Field(default=0.05)
    window_c2: float = Field(default=20.0)

    # Template settings
    template_dir: str = Field(default="templates")


# Global settings instance
settings = Settings()
