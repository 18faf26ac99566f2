"""Synthetic piecewise-constant test images and a small benchmark corpus."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from src.denoise.image import Image
from src.tools.imageio import write_image

logger = logging.getLogger(__name__)


def oblique_edge(rows: int = 64, cols: int = 64, low: float = 60.0, high: float = 220.0) -> Image:
    """Two plateaus separated by a 30° edge, plus a mid-level block."""
    i, j = np.mgrid[0:rows, 0:cols]
    img = np.full((rows, cols), low)
    img[i > np.tan(np.pi / 6) * j + 0.2 * rows] = high
    block = (i >= rows // 8) & (i < rows // 3) & (j >= cols // 2) & (j < 7 * cols // 8)
    img[block] = 0.5 * (low + high)
    return img


def disks(rows: int = 64, cols: int = 64, low: float = 40.0, high: float = 200.0) -> Image:
    """Dark background with two bright disks of different intensity."""
    i, j = np.mgrid[0:rows, 0:cols]
    img = np.full((rows, cols), low)
    r = min(rows, cols)
    img[(i - 0.35 * rows) ** 2 + (j - 0.35 * cols) ** 2 < (0.2 * r) ** 2] = high
    img[(i - 0.7 * rows) ** 2 + (j - 0.65 * cols) ** 2 < (0.15 * r) ** 2] = 0.6 * high
    return img


def steps(rows: int = 64, cols: int = 64, levels: int = 4, low: float = 30.0, high: float = 230.0) -> Image:
    """Vertical staircase of equally spaced intensity levels."""
    band = np.minimum(np.arange(cols) * levels // cols, levels - 1)
    values = np.linspace(low, high, levels)[band]
    return np.tile(values, (rows, 1))


def ramp(rows: int, cols: int) -> Image:
    """u(i, j) = j."""
    return np.tile(np.arange(cols, dtype=np.float64), (rows, 1))


SYNTHETIC_IMAGES = {
    "oblique": oblique_edge,
    "disks": disks,
    "steps": steps,
}


def write_corpus(
    out_dir: str | Path, rows: int = 64, cols: int = 64, peak_base: float | None = None
) -> list[Path]:
    """Write the synthetic corpus as integer PNGs, optionally rescaled so each max is peak_base."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for name, make in SYNTHETIC_IMAGES.items():
        image = make(rows, cols)
        if peak_base is not None:
            image = image * (peak_base / image.max())
        paths.append(write_image(out_dir / f"{name}.png", np.rint(image)))
    logger.info("Wrote %d synthetic images to %s", len(paths), out_dir)
    return paths
