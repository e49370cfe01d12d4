from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    database_url: str = 'sqlite:///./hnp_fields.db'
    log_level: str = 'WARNING'
    oracle_bound: int = 256
    verify_max_bound: int = 200
    enumeration_node_budget: int = 20_000_000
    default_jobs: int = 1
    interior_margin: float = 0.05
    band_sigmas: int = 5
    band_floor: int = 10
    tool_version: str = '0.1.0'

    model_config = SettingsConfigDict(env_prefix='HNP_')


settings = Settings()
