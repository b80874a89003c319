from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    APP_NAME: str = "rebsim"
    APP_VERSION: str = "1.0.0"
    DEBUG: bool = False
    LOG_LEVEL: str = "INFO"

    # Parallelism fallback when --parallelism is not given
    THREADS: int = 1

    # Fock truncation (dimension = N_max + 1)
    FOCK_DIM: int = 3
    WCS_FOCK_DIM: int = 4
    # exact for emission (one photon at most); scattering guards its Poisson tail
    INCOHERENT_FOCK_DIM: int = 2

    LEAKAGE_THRESHOLD: float = 1e-3
    HERMITIAN_TOL: float = 1e-10
    EIGEN_TOL: float = 1e-10
    TRACE_TOL: float = 1e-9
    COEFFICIENT_TOL: float = 1e-9
    HERALD_FLOOR: float = 1e-20

    model_config = SettingsConfigDict(env_file=".env", env_prefix="REBSIM_", extra="ignore")


settings = Settings()
