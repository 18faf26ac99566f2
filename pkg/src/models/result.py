"""Result models: solver output, quality reports, sweep and bench cells."""

from __future__ import annotations

import json
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_serializer, field_validator

from src.models.config import Regularizer


class SolverResult(BaseModel):
    """Denoised image plus convergence history and timing."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    u_star: np.ndarray
    iterations: int
    rel_change_history: list[float] = Field(default_factory=list)
    objective_history: list[float] = Field(default_factory=list)
    beta_history: list[float] = Field(default_factory=list)
    wall_time: float = 0.0
    converged: bool = False
    regularizer: Regularizer = Regularizer.AITV

    # Diagnostics
    final_beta: float = 0.0
    clamp_magnitude: float = 0.0
    primal_residual_uv: float = 0.0
    primal_residual_grad: float = 0.0


class QualityReport(BaseModel):
    """PSNR/SSIM of an estimate against its ground truth."""

    psnr_db: float
    ssim: float = Field(ge=-1.0, le=1.0)
    dynamic_range: float = Field(gt=0)

    @field_validator("psnr_db", mode="before")
    @classmethod
    def decode_inf(cls, v: object) -> object:
        if isinstance(v, str) and v.lower() in ("inf", "+inf"):
            return math.inf
        return v

    @field_serializer("psnr_db")
    def encode_inf(self, v: float) -> float | str:
        return "inf" if math.isinf(v) and v > 0 else v

    def to_json(self) -> str:
        return json.dumps(self.model_dump(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> QualityReport:
        return cls(**json.loads(text))


class SweepCell(BaseModel):
    """One (lambda, alpha) cell of a parameter sweep."""

    method: str
    lam: float
    alpha: float | None = None
    psnr_db: float = math.nan
    ssim: float = math.nan
    iterations: int = 0
    wall_time: float = 0.0
    status: str = "ok"

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class BenchCell(BaseModel):
    """Best-over-grid outcome for one (image, peak, method)."""

    image: str
    peak: float
    method: str
    seed: int
    psnr_db: float = math.nan
    ssim: float = math.nan
    best_lam: float | None = None
    best_alpha: float | None = None
    wall_time: float = 0.0
    sweep_time: float = 0.0
    cells_failed: int = 0
