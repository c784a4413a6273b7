"""Application settings loaded from environment variables."""

from pathlib import Path
from typing import Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Runtime defaults for akmeter.

    Every field can be overridden with an ``AKMETER_``-prefixed environment
    variable (``AKMETER_THREADS=4``) or a ``.env`` file.
    """

    model_config = SettingsConfigDict(
        env_prefix="AKMETER_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Project paths
    project_root: Path = Path(__file__).parent.parent
    output_dir: Path = Path("./results")

    # Physics
    hbar: float = Field(default=1.0, gt=0)
    coupling: float = 1.0

    # Symbolic algebra
    max_steps: int = Field(default=16, ge=1)

    # Lattice
    grid_points: int = 64
    grid_length: float = Field(default=20.0, gt=0)
    edge_margin: float = Field(default=6.0, gt=0)
    on_unresolved: Literal["raise", "warn"] = "raise"
    overlap_warning: float = 1e-3

    # Tolerances
    exact_tolerance: float = 1e-9
    grid_tolerance: float = 1e-5
    admissibility_tolerance: float = 1e-10

    # Superposition experiment
    region_fraction: float = Field(default=0.25, gt=0, le=0.5)

    # Parallelism
    threads: int = Field(default=1, ge=1)


def get_settings() -> Settings:
    """Get application settings."""
    return Settings()
