"""Configuration settings for the incidence laboratory."""

from fractions import Fraction

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Incidence laboratory settings."""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="INCLAB_",
        case_sensitive=False,
        extra="ignore",
    )

    # Reproducibility
    seed: int = Field(
        default=0,
        description="Default 64-bit seed for every random choice (shears, candidate orders)"
    )

    # Algebra limits
    degree_cap: int = Field(
        default=32,
        ge=1,
        description="Maximum total degree accepted at API boundaries"
    )
    rho: str = Field(
        default="1/4",
        description="Second-level degree factor, E >= rho * deg(Z), as an exact rational"
    )

    # Bisection search
    search_restarts: int = Field(default=64, ge=1, description="Random restarts per bisection")
    search_steps: int = Field(default=48, ge=1, description="Median-iteration steps per restart")
    exhaustive_limit: int = Field(
        default=4096,
        ge=1,
        description="Enumerate candidate point tuples exhaustively below this count"
    )
    bisector_attempts: int = Field(
        default=8, ge=1, description="Bisections tried per degree on a second-level surface"
    )
    shear_attempts: int = Field(default=8, ge=1, description="Generic shears tried by CAD")

    # Reporting
    ratio_digits: int = Field(default=60, ge=15, description="Working precision of ratio displays")
    record_timings: bool = Field(
        default=False,
        description="Store stage timings in reports (breaks byte-identical reruns)"
    )
    workers: int = Field(default=1, ge=1, description="Processes used by sweeps and campaigns")
    log_level: str = Field(default="INFO", description="Root logging level")
    output_dir: str = Field(default="results", description="Directory for campaign outputs")

    # Audit ceilings
    partition_ceiling: int = Field(default=4, description="Allowed c in cell <= c*m/D^2")
    st_ratio_ceiling: float = Field(default=2.0, description="Ceiling for I/(m^2/3 n^2/3+m+n)")
    kst_ratio_ceiling: float = Field(default=4.0, description="Ceiling for KST ratios")
    pach_sharir_ceiling: float = Field(default=16.0, description="Ceiling for dyadic audit ratio")
    crossing_constants: list[int] = Field(
        default=[1, 2, 4],
        description="Multiplicity prune constants C reported by the dyadic audit"
    )
    c0_lines: int = Field(default=2, ge=1, description="C0 for line and flat families")
    c0_circles: int = Field(default=2, ge=1, description="C0 for complex unit circles")

    @property
    def rho_fraction(self) -> Fraction:
        return Fraction(self.rho)


# Global settings instance
settings = Settings()
