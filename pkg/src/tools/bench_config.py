"""Reads bench.yaml into a BenchConfig."""

from __future__ import annotations

import logging
from pathlib import Path

import yaml
from pydantic import ValidationError

from src.errors import InvalidConfig
from src.models.config import BenchConfig

logger = logging.getLogger(__name__)


def load_bench_config(filepath: str | Path = "bench.yaml") -> BenchConfig:
    """Parse bench.yaml. A missing file yields the default protocol."""
    path = Path(filepath)
    if not path.exists():
        logger.warning("Bench config not found at %s, using defaults", filepath)
        return BenchConfig()

    data = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise InvalidConfig(f"{filepath}: expected a mapping at top level")

    grid = {
        key: data.pop(key)
        for key in ("lambdas", "alphas", "selection")
        if key in data
    }
    if grid:
        data["grid"] = {**data.get("grid", {}), **grid}

    try:
        config = BenchConfig(**data)
    except ValidationError as e:
        raise InvalidConfig(f"{filepath}: {e}") from e

    logger.info(
        "Loaded bench config from %s: peaks=%s, methods=%s, %d lambdas x %d alphas",
        filepath,
        config.peaks,
        config.methods,
        len(config.grid.lambdas),
        len(config.grid.alphas),
    )
    return config
