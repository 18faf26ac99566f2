"""CSV writers for sweep grids and the benchmark quality/timing tables."""

from __future__ import annotations

import csv
import logging
import math
from pathlib import Path

import numpy as np

from src.models.result import BenchCell, SweepCell

logger = logging.getLogger(__name__)

NOISY_ROW = "noisy"

SWEEP_HEADER = ["method", "lambda", "alpha", "psnr_db", "ssim", "iterations", "wall_time", "status"]


def fmt(value: float | None) -> str:
    """Shortest round-trip text for a float; '' for None, 'inf'/'nan' spelled out."""
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return repr(value)


def _writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    fh = path.open("w", newline="", encoding="utf-8")
    return fh, csv.writer(fh, lineterminator="\n")


# =============================================================================
# Sweep grid
# =============================================================================


def write_sweep_csv(path: str | Path, cells: list[SweepCell]) -> Path:
    path = Path(path)
    fh, writer = _writer(path)
    with fh:
        writer.writerow(SWEEP_HEADER)
        for c in cells:
            writer.writerow(
                [c.method, fmt(c.lam), fmt(c.alpha), fmt(c.psnr_db), fmt(c.ssim),
                 c.iterations, fmt(c.wall_time), c.status]
            )
    logger.info("Sweep table written: %s (%d cells)", path, len(cells))
    return path


# =============================================================================
# Benchmark tables
# =============================================================================


def quality_rows(
    cells: list[BenchCell], images: list[str], peaks: list[float], methods: list[str]
) -> list[list[str]]:
    """Rows of the PSNR/SSIM table: one per (peak, method, metric), images as columns plus avg."""
    index = {(c.image, c.peak, c.method): c for c in cells}
    rows: list[list[str]] = []
    for peak in peaks:
        for method in [NOISY_ROW, *methods]:
            for metric in ("psnr", "ssim"):
                values = []
                for image in images:
                    cell = index.get((image, peak, method))
                    if cell is None:
                        values.append(math.nan)
                    else:
                        values.append(cell.psnr_db if metric == "psnr" else cell.ssim)
                avg = float(np.mean(values)) if values else math.nan
                rows.append([fmt(peak), method, metric, *(fmt(v) for v in values), fmt(avg)])
    return rows


def write_quality_table(
    path: str | Path, cells: list[BenchCell], images: list[str], peaks: list[float], methods: list[str]
) -> Path:
    path = Path(path)
    fh, writer = _writer(path)
    with fh:
        writer.writerow(["peak", "method", "metric", *images, "avg"])
        writer.writerows(quality_rows(cells, images, peaks, methods))
    logger.info("Quality table written: %s", path)
    return path


def timing_rows(cells: list[BenchCell], methods: list[str]) -> list[list[str]]:
    """Average wall time of the selected solve per method over all (image, peak) scenarios."""
    rows = []
    for method in methods:
        times = [c.wall_time for c in cells if c.method == method and not math.isnan(c.psnr_db)]
        avg = float(np.mean(times)) if times else math.nan
        rows.append([method, fmt(avg), str(len(times))])
    return rows


def write_timing_table(path: str | Path, cells: list[BenchCell], methods: list[str]) -> Path:
    path = Path(path)
    fh, writer = _writer(path)
    with fh:
        writer.writerow(["method", "avg_time_s", "cells"])
        writer.writerows(timing_rows(cells, methods))
    logger.info("Timing table written: %s", path)
    return path
