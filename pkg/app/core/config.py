from pydantic_settings import BaseSettings
from typing import Optional


class Settings(BaseSettings):
    # App
    app_name: str = "automgrp"
    debug: bool = False

    # Level computations
    sf_level: int = 8
    max_level_points: int = 4096  # d**n guard, 2**12

    # Growth and enumeration
    growth_radius: int = 5
    enumeration_cap: int = 10_000
    finite_check_cap: int = 1_000
    relator_radius: int = 5
    order_cap: int = 64
    portrait_depth: int = 6
    engine_memo_limit: int = 200_000  # entries per memo table of one engine

    # Group-level checks
    transitivity_depth: int = 8
    self_replicating_radius: int = 4
    self_replicating_depth: int = 6

    # Contraction
    nucleus_size_cap: int = 2048
    nucleus_depth_cap: int = 16
    witness_word_radius: int = 6
    witness_vertex_depth: int = 6

    # Spectra
    spectrum_level: int = 7
    spectrum_max_level: int = 9
    spectrum_tol: float = 1e-10
    histogram_bins: int = 64

    # Pipeline
    jobs: int = 1
    fixtures_path: str = "data/fixtures.json"
    output_dir: Optional[str] = None

    # Logging Configuration
    log_level: str = "INFO"
    log_dir: str = "logs"
    log_file_enabled: bool = True
    log_console_enabled: bool = False

    class Config:
        env_file = ".env"
        env_prefix = "AUTOMGRP_"


settings = Settings()
