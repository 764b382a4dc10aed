"""Runtime configuration via environment variables.

Uses pydantic-settings to load values from environment and optional ``.env``.
Prefix: ``HOPFJORDAN_`` (e.g., ``HOPFJORDAN_RESIDUAL_EPS=1e-9``).
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Numerical tolerances, caps and output switches."""
    app_name: str = "hopfjordan"

    residual_eps: float = Field(1e-8, ge=0)
    eigen_cluster_eps: float = Field(1e-7, ge=0)
    max_projector_condition: float = Field(1e8, gt=0)
    max_dimension: int = Field(8, ge=1)

    quotient_cap: int = Field(512, ge=1)
    closure_cap: int = Field(4096, ge=1)
    subgroup_order_cap: int = Field(256, ge=1)
    associativity_exhaustive_limit: int = Field(64, ge=1)
    associativity_samples: int = Field(20000, ge=1)

    orbit_max_iter: int = Field(200, ge=1)
    orbit_sample_count: int = Field(8, ge=0)
    seed: int = 20240607
    ill_conditioned_det_log: float = Field(1e-6, gt=0)

    log_level: str = "WARNING"
    include_timings: bool = False

    # pydantic-settings v2 configuration
    model_config = SettingsConfigDict(
        env_prefix="HOPFJORDAN_",
        env_file=".env",
        env_file_encoding="utf-8",
    )


settings = Settings()
