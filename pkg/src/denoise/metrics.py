"""Image quality metrics (PSNR, SSIM) and line profiles."""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np
from scipy.ndimage import gaussian_filter

from src.denoise.image import Image, as_image, check_same_shape
from src.errors import RowOutOfRange, TooSmall, ValidationFailure
from src.models.result import QualityReport

logger = logging.getLogger(__name__)

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
# radius = int(truncate * sigma + 0.5) = 5, i.e. an 11-tap window
SSIM_TRUNCATE = 3.5


def _check_range(dynamic_range: float) -> None:
    if not dynamic_range > 0:
        raise ValidationFailure(f"dynamic range must be positive, got {dynamic_range}")


def psnr(u: Image, g: Image, dynamic_range: float) -> float:
    """10·log10(L² / MSE); +inf when the images are identical."""
    u = as_image(u, "estimate")
    g = as_image(g, "reference")
    check_same_shape(u, g)
    _check_range(dynamic_range)

    mse = float(np.mean((u - g) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(dynamic_range**2 / mse)


def _local_mean(x: Image) -> Image:
    return gaussian_filter(x, sigma=SSIM_SIGMA, truncate=SSIM_TRUNCATE, mode="reflect")


def ssim(u: Image, g: Image, dynamic_range: float) -> float:
    """Mean SSIM with an 11×11 Gaussian window (σ = 1.5) and symmetric boundaries."""
    u = as_image(u, "estimate")
    g = as_image(g, "reference")
    check_same_shape(u, g)
    _check_range(dynamic_range)
    if min(u.shape) < SSIM_WINDOW:
        raise TooSmall(f"SSIM needs both dimensions >= {SSIM_WINDOW}, got {u.shape}")

    c1 = (SSIM_K1 * dynamic_range) ** 2
    c2 = (SSIM_K2 * dynamic_range) ** 2

    mu_u = _local_mean(u)
    mu_g = _local_mean(g)
    var_u = _local_mean(u * u) - mu_u * mu_u
    var_g = _local_mean(g * g) - mu_g * mu_g
    cov = _local_mean(u * g) - mu_u * mu_g

    numerator = (2.0 * mu_u * mu_g + c1) * (2.0 * cov + c2)
    denominator = (mu_u * mu_u + mu_g * mu_g + c1) * (var_u + var_g + c2)
    return float(np.mean(numerator / denominator))


def quality_report(u: Image, g: Image, dynamic_range: float) -> QualityReport:
    return QualityReport(
        psnr_db=psnr(u, g, dynamic_range),
        ssim=ssim(u, g, dynamic_range),
        dynamic_range=dynamic_range,
    )


# =============================================================================
# Line profiles
# =============================================================================


def line_profile(u: Image, row: int) -> np.ndarray:
    """Intensities of one row (0-based) in column order."""
    u = as_image(u)
    if not 0 <= row < u.shape[0]:
        raise RowOutOfRange(f"row {row} outside [0, {u.shape[0]})")
    return u[row].copy()


def write_profile_csv(path: str | Path, columns: Mapping[str, Sequence[float]]) -> Path:
    """Write named profiles side by side: header row, then one value per line per column."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    lengths = {len(columns[n]) for n in names}
    if len(lengths) > 1:
        raise ValidationFailure(f"profiles have different lengths: {sorted(lengths)}")

    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for values in zip(*(columns[n] for n in names)):
            writer.writerow([repr(float(v)) for v in values])

    logger.info("Profile written: %s (%d columns)", path, len(names))
    return path


def read_profile_csv(path: str | Path) -> dict[str, list[float]]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        names = next(reader)
        data: dict[str, list[float]] = {n: [] for n in names}
        for row in reader:
            for name, value in zip(names, row):
                data[name].append(float(value))
    return data
