"""Run manifest: everything needed to re-execute a denoise run."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from pydantic import BaseModel, Field

from src.models.config import NoiseSpec, SolverConfig

MANIFEST_VERSION = 1


class RunManifest(BaseModel):
    """Parameters, inputs, outputs and timings of one denoise run."""

    version: int = MANIFEST_VERSION
    command: str = "denoise"
    method: str = "aitv"
    created_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    inputs: dict[str, str] = Field(default_factory=dict)
    outputs: dict[str, str] = Field(default_factory=dict)
    noise: NoiseSpec | None = None
    solver: SolverConfig
    dynamic_range: float | None = None

    iterations: int = 0
    converged: bool = False
    wall_time: float = 0.0
    quality: dict[str, float | str] = Field(default_factory=dict)

    def save(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = self.model_dump(mode="json", by_alias=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: str | Path) -> RunManifest:
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))
