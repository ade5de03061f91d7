from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Engine settings loaded from environment variables."""

    # Cache
    ghl_cache_dir: str = ".ghl-cache"
    ghl_cache_enabled: bool = True

    # Engine
    ghl_budget: int = 100000  # generators per degree
    ghl_max_degree: int = 6
    ghl_modular: bool = True
    ghl_associativity_check_limit: int = 64
    ghl_associativity_samples: int = 4096

    # Execution
    ghl_jobs: int = 1

    # Application Settings
    app_name: str = "Group Homology Lab"
    engine_version: str = "0.1.0"
    debug: bool = False
    log_level: str = "INFO"

    class Config:
        env_file = ".env"
        case_sensitive = False


settings = Settings()
