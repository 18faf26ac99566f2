"""Parameter-grid sweep: run every (lambda, alpha) cell and pick the best one."""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from src.denoise.image import Image, check_same_shape
from src.denoise.metrics import psnr, ssim
from src.denoise.solver import denoise
from src.errors import AitvError
from src.models.config import METHODS, Regularizer, Selection, SolverConfig, SweepGrid, build_solver_config
from src.models.result import SolverResult, SweepCell

logger = logging.getLogger(__name__)


@dataclass
class SweepOutcome:
    """All cells of a sweep plus the selected one."""

    cells: list[SweepCell]
    configs: list[SolverConfig]
    best_index: int | None = None
    best_result: SolverResult | None = None
    wall_time: float = 0.0
    results: list[SolverResult | None] = field(default_factory=list, repr=False)

    @property
    def best_cell(self) -> SweepCell | None:
        return None if self.best_index is None else self.cells[self.best_index]

    @property
    def best_config(self) -> SolverConfig | None:
        return None if self.best_index is None else self.configs[self.best_index]

    @property
    def failed(self) -> int:
        return sum(1 for c in self.cells if not c.ok)


def resolve_jobs(jobs: int | None) -> int:
    """Worker count: AITV_THREADS overrides the flag."""
    env = os.getenv("AITV_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            logger.warning("Ignoring non-integer AITV_THREADS=%r", env)
    return max(1, jobs or 1)


def grid_configs(
    grid: SweepGrid, method: str, solver_overrides: dict[str, Any] | None = None
) -> list[SolverConfig]:
    """Configs in grid order (lambdas outer, alphas inner). Alpha is not swept for TV methods."""
    regularizer = METHODS[method]
    overrides = dict(solver_overrides or {})
    for key in ("lambda", "lam", "regularizer"):
        overrides.pop(key, None)
    configs = []
    for lam in grid.lambdas:
        alphas = grid.alphas if regularizer == Regularizer.AITV else [overrides.get("alpha", 0.5)]
        for alpha in alphas:
            params = {**overrides, "lam": lam, "alpha": alpha, "regularizer": regularizer}
            configs.append(build_solver_config(**params))
    return configs


def run_cell(
    noisy: Image, clean: Image, config: SolverConfig, method: str, dynamic_range: float
) -> tuple[SweepCell, SolverResult | None]:
    """Solve and score one cell. Failures are recorded, never raised."""
    alpha = config.alpha if config.regularizer == Regularizer.AITV else None
    cell = SweepCell(method=method, lam=config.lam, alpha=alpha)
    try:
        result = denoise(noisy, config)
        cell.psnr_db = psnr(result.u_star, clean, dynamic_range)
        cell.ssim = ssim(result.u_star, clean, dynamic_range)
        cell.iterations = result.iterations
        cell.wall_time = result.wall_time
        return cell, result
    except AitvError as e:
        logger.warning("Cell failed (%s, lambda=%g, alpha=%s): %s", method, config.lam, alpha, e)
        cell.status = f"failed:{type(e).__name__}"
        return cell, None


def select_best(cells: list[SweepCell], selection: Selection) -> int | None:
    """Index of the best successful cell; ties go to the earliest in grid order."""
    key = "psnr_db" if selection == Selection.BEST_PSNR else "ssim"
    best_index = None
    best_value = -math.inf
    for idx, cell in enumerate(cells):
        value = getattr(cell, key)
        if not cell.ok or math.isnan(value):
            continue
        if best_index is None or value > best_value:
            best_index, best_value = idx, value
    return best_index


def run_sweep(
    noisy: Image,
    clean: Image,
    grid: SweepGrid,
    method: str = "aitv",
    solver_overrides: dict[str, Any] | None = None,
    dynamic_range: float | None = None,
    jobs: int | None = 1,
) -> SweepOutcome:
    """Run every grid cell (optionally in parallel) and select the best by grid.selection."""
    check_same_shape(noisy, clean)
    if dynamic_range is None:
        dynamic_range = float(clean.max())
    configs = grid_configs(grid, method, solver_overrides)
    workers = resolve_jobs(jobs)

    logger.info(
        "Sweep: method=%s, %d cells, L=%g, %d worker(s)", method, len(configs), dynamic_range, workers
    )
    start = time.perf_counter()
    if workers == 1:
        pairs = [run_cell(noisy, clean, c, method, dynamic_range) for c in configs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pairs = list(pool.map(lambda c: run_cell(noisy, clean, c, method, dynamic_range), configs))
    wall_time = time.perf_counter() - start

    cells = [cell for cell, _ in pairs]
    results = [result for _, result in pairs]
    best = select_best(cells, grid.selection)

    outcome = SweepOutcome(
        cells=cells,
        configs=configs,
        best_index=best,
        best_result=None if best is None else results[best],
        wall_time=wall_time,
        results=results,
    )
    if outcome.best_cell is not None:
        logger.info(
            "Sweep best: lambda=%g alpha=%s PSNR=%.3f SSIM=%.4f (%d failed)",
            outcome.best_cell.lam,
            outcome.best_cell.alpha,
            outcome.best_cell.psnr_db,
            outcome.best_cell.ssim,
            outcome.failed,
        )
    else:
        logger.warning("Sweep produced no successful cell (%d failed)", outcome.failed)
    return outcome
