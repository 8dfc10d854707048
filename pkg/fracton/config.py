from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    # Application
    log_level: str = "INFO"

    # Solver
    solver_tolerance: float = 1e-12
    solver_max_iterations: int = 200
    bracket_expansions: int = 200

    # Tolerances
    normalization_tolerance: float = 1e-9
    identity_tolerance: float = 1e-10

    # Series summation in log space
    series_block_size: int = 4096
    series_max_terms: int = 10_000_000
    series_cutoff: float = 60.0

    # Output
    csv_significant_digits: int = 17

    model_config = SettingsConfigDict(
        env_prefix="FRACTON_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )


settings = Settings()
