"""
config.py - Configuration models for Andermeans solvers and reports
"""

from enum import Enum
from pathlib import Path
from typing import Literal, Optional
from pydantic import BaseModel, Field, ValidationError, model_validator
from rich.console import Console
from rich.markup import escape
import sys

try:
    import tomllib
except ModuleNotFoundError:
    import tomli as tomllib

console = Console(stderr=True)

DEFAULT_CONFIG_NAME = "andermeans.toml"


class EmptyClusterPolicy(str, Enum):
    KEEP_PREVIOUS = "keep-previous"
    RESEED_FARTHEST = "reseed-farthest"


class SolverConfig(BaseModel):
    """Settings shared by the plain and accelerated solvers."""

    max_iters: int = Field(default=10_000, ge=1, description="Safety cap on iterations")
    empty_cluster_policy: EmptyClusterPolicy = Field(
        default=EmptyClusterPolicy.KEEP_PREVIOUS,
        description="What an update step does with a cluster that lost all members",
    )
    workers: int = Field(default=0, ge=0, description="Data-parallel workers for assignment passes (0 = auto)")
    engine: Literal["bounded", "naive"] = Field(
        default="bounded",
        description="Assignment engine: bound-pruned or brute force",
    )
    record_centroids: bool = Field(
        default=False,
        description="Keep every iterate in the report (memory heavy, for trace comparisons)",
    )


class AAConfig(BaseModel):
    """Anderson acceleration parameters."""

    m0: int = Field(default=2, ge=0, description="Initial history depth")
    m_max: int = Field(default=30, ge=0, description="Upper bound on the history depth")
    eps1: float = Field(default=0.02, ge=0.0, description="Shrink m when the energy-decrease ratio falls below this")
    eps2: float = Field(default=0.5, description="Grow m when the energy-decrease ratio exceeds this")
    dynamic: bool = Field(default=True, description="Adjust m from the energy-decrease ratio; False keeps m = m0")
    regularization: float = Field(default=1e-10, ge=0.0, description="Tikhonov weight, scaled by trace/m")
    clear_history_on_reject: bool = Field(
        default=False,
        description="Drop the iterate history whenever the energy guard reverts an iterate",
    )
    guard: Literal["surrogate", "energy"] = Field(
        default="surrogate",
        description=(
            "Acceptance reference: 'energy' compares a candidate with the last accepted energy, "
            "'surrogate' with the energy of the last Lloyd iterate on the previous partition"
        ),
    )
    guard_margin: float = Field(
        default=1.0,
        ge=0.0,
        description="Surrogate guard only: also demand this multiple of the last mean-update gain",
    )
    salvage: bool = Field(
        default=True,
        description="On rejection, fall back to the mean update of the rejected partition when it clears the guard",
    )

    @model_validator(mode="after")
    def _check_ranges(self) -> "AAConfig":
        if self.m0 > self.m_max:
            raise ValueError(f"m0 ({self.m0}) must not exceed m_max ({self.m_max})")
        if not self.eps1 < self.eps2:
            raise ValueError(f"eps1 ({self.eps1}) must be smaller than eps2 ({self.eps2})")
        return self


class OutputConfig(BaseModel):
    format: Literal["json", "csv"] = "json"
    trace: bool = Field(default=False, description="Include per-iteration energy traces in reports")
    strict: bool = Field(default=False, description="Exit with code 3 when any solve fails to converge")


class AndermeansConfig(BaseModel):
    solver: SolverConfig = Field(default_factory=SolverConfig)
    anderson: AAConfig = Field(default_factory=AAConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    config_path: Optional[Path] = None


def load_config(config_path: Path) -> AndermeansConfig:
    """Load configuration from TOML file"""

    if not config_path.exists():
        console.print(f"[red][ERROR][/red] Configuration file not found: {escape(str(config_path))}")
        sys.exit(1)

    try:
        with open(config_path, "rb") as f:
            config_data = tomllib.load(f)

        return AndermeansConfig(
            solver=SolverConfig(**config_data.get("solver", {})),
            anderson=AAConfig(**config_data.get("anderson", {})),
            output=OutputConfig(**config_data.get("output", {})),
            config_path=config_path,
        )

    except (tomllib.TOMLDecodeError, ValidationError, TypeError) as e:
        console.print(f"[red][ERROR][/red] Error loading configuration: {escape(str(e))}")
        sys.exit(1)


def resolve_config(config_arg: Optional[str]) -> AndermeansConfig:
    """Explicit path (file or directory), else ./andermeans.toml when present, else defaults."""
    if config_arg:
        p = Path(config_arg).expanduser()
        if p.is_dir():
            p = p / DEFAULT_CONFIG_NAME
        return load_config(p)

    cwd_candidate = Path.cwd() / DEFAULT_CONFIG_NAME
    if cwd_candidate.exists():
        return load_config(cwd_candidate)
    return AndermeansConfig()
