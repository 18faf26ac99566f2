"""Pydantic models for solver, noise, sweep and benchmark configuration."""

from __future__ import annotations

from enum import Enum
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.errors import InvalidConfig

DEFAULT_LAMBDAS: list[float] = [3.0, 5.0, 8.0, 10.0, 12.0, 15.0, 20.0]
DEFAULT_ALPHAS: list[float] = [0.1, 0.2, 0.3, 0.4, 0.5]
DEFAULT_PEAKS: list[float] = [80.0, 55.0, 30.0]


class Regularizer(str, Enum):
    AITV = "aitv"
    TV_ISOTROPIC = "tv_isotropic"
    TV_ANISOTROPIC = "tv_anisotropic"


class Selection(str, Enum):
    BEST_PSNR = "best_psnr"
    BEST_SSIM = "best_ssim"


# CLI method names -> regularizer
METHODS: dict[str, Regularizer] = {
    "aitv": Regularizer.AITV,
    "tv": Regularizer.TV_ISOTROPIC,
    "tv-aniso": Regularizer.TV_ANISOTROPIC,
}


class SolverConfig(BaseModel):
    """Tunables of the ADMM solver."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0)
    alpha: float = Field(default=0.5, ge=0.0, le=1.0)
    beta0: float = Field(default=1e-3, gt=0)
    sigma: float = Field(default=1.75, gt=1.0)
    epsilon: float = Field(default=1e-5, gt=0)
    max_iters: int = Field(default=300, gt=0)
    regularizer: Regularizer = Regularizer.AITV
    beta_cap: float = Field(default=1e12, gt=0)
    verify_u_step: bool = False

    @model_validator(mode="after")
    def cap_above_start(self) -> SolverConfig:
        if self.beta_cap < self.beta0:
            raise ValueError(f"beta_cap ({self.beta_cap}) must be >= beta0 ({self.beta0})")
        return self

    def effective_alpha(self) -> float:
        """Alpha actually used by the regularizer (0 for anisotropic TV, unused for isotropic)."""
        if self.regularizer == Regularizer.TV_ANISOTROPIC:
            return 0.0
        return self.alpha


class NoiseSpec(BaseModel):
    """Target peak and seed for reproducible Poisson corruption."""

    model_config = ConfigDict(frozen=True)

    peak: float = Field(gt=0)
    seed: int = Field(default=0, ge=0, lt=2**64)


class SweepGrid(BaseModel):
    """Parameter grid searched by the sweep and bench commands."""

    lambdas: list[float] = Field(default_factory=lambda: list(DEFAULT_LAMBDAS), min_length=1)
    alphas: list[float] = Field(default_factory=lambda: list(DEFAULT_ALPHAS), min_length=1)
    selection: Selection = Selection.BEST_PSNR

    @field_validator("lambdas")
    @classmethod
    def positive_lambdas(cls, v: list[float]) -> list[float]:
        if any(x <= 0 for x in v):
            raise ValueError("lambdas must be positive")
        return v

    @field_validator("alphas")
    @classmethod
    def alphas_in_unit_interval(cls, v: list[float]) -> list[float]:
        if any(x < 0 or x > 1 for x in v):
            raise ValueError("alphas must lie in [0, 1]")
        return v


class BenchConfig(BaseModel):
    """Benchmark protocol, usually loaded from bench.yaml."""

    peaks: list[float] = Field(default_factory=lambda: list(DEFAULT_PEAKS), min_length=1)
    methods: list[str] = Field(default_factory=lambda: ["aitv", "tv"], min_length=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    grid: SweepGrid = Field(default_factory=SweepGrid)
    solver: dict[str, Any] = Field(default_factory=dict)
    images: list[str] = Field(default_factory=list)

    @field_validator("methods")
    @classmethod
    def known_methods(cls, v: list[str]) -> list[str]:
        unknown = [m for m in v if m not in METHODS]
        if unknown:
            raise ValueError(f"unknown methods: {unknown}; expected one of {sorted(METHODS)}")
        return v


def build_solver_config(**kwargs: Any) -> SolverConfig:
    """Build a SolverConfig, converting pydantic validation errors into InvalidConfig."""
    try:
        return SolverConfig(**kwargs)
    except ValidationError as e:
        raise InvalidConfig(str(e)) from e
