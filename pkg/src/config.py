"""Configuration management for the application."""

from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Application Configuration
    app_name: str = "isogeny-hsp"
    debug: bool = False
    log_level: str = "INFO"

    # Persistence
    database_url: str = "sqlite:///./database/isogeny_hsp.db"

    # Randomness
    seed: Optional[int] = None

    # Class group computation
    euler_product_bound: int = 10_000
    class_window: float = 0.1
    bsgs_max_steps: int = 5_000_000
    structure_table_limit: int = 1_000_000
    sampler_form_bound: int = 256

    # Lattice reduction
    lll_delta: float = 0.99
    bkz_max_tours: int = 50
    enum_max_dim: int = 40

    # Generating sets
    genset_pool_factor: int = 3
    genset_max_promotions: int = 10_000

    # Isogenies
    kernel_retries: int = 64

    # Hidden shift solvers
    verify_points: int = 3
    solver_retries: int = 8
    kuperberg_max_pool: int = 1 << 22
    regev_memory_factor: int = 4
    regev_max_subset: int = 18
    mitm_table_limit: int = 1 << 32
    debug_phase_checks: bool = False
    query_budget: Optional[int] = None  # oracle queries per solver run, None for unlimited

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        case_sensitive = False


# Global settings instance
# Environment variables win over the .env file; CLI --config files are
# layered on top by src.cli.models.RunConfig.
settings = Settings()
