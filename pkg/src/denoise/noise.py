"""Reproducible Poisson corruption at a controlled peak value.

RNG identity: numpy ``Generator(Philox)``. Row i of an image draws from the i-th
child of ``SeedSequence(seed).spawn(M)``, so the output depends only on
(g, seed) however rows are scheduled. numpy's Poisson sampler uses the product
method for means below 10 and PTRS transformed rejection above.
"""

from __future__ import annotations

import logging

import numpy as np

from src.denoise.image import Image, as_image
from src.errors import AllZeroImage, NegativeMean, ValidationFailure
from src.models.config import NoiseSpec

logger = logging.getLogger(__name__)

FNV_OFFSET_BASIS = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK_64 = 0xFFFFFFFFFFFFFFFF


def rescale_to_peak(g: Image, peak: float) -> Image:
    """Scale g linearly so that its maximum equals peak."""
    g = as_image(g, "clean image")
    if peak <= 0:
        raise ValidationFailure(f"peak must be positive, got {peak}")
    if np.any(g < 0):
        raise NegativeMean("clean image must be nonnegative")
    g_max = float(np.max(g))
    if g_max == 0.0:
        raise AllZeroImage("cannot rescale an all-zero image")
    return g * (peak / g_max)


def row_generators(seed: int, rows: int) -> list[np.random.Generator]:
    """One independent Philox stream per image row."""
    children = np.random.SeedSequence(seed).spawn(rows)
    return [np.random.Generator(np.random.Philox(child)) for child in children]


def poisson_corrupt(g: Image, noise: NoiseSpec) -> Image:
    """Independent Poisson draw with mean g(i, j) at every pixel."""
    g = as_image(g, "mean image")
    if np.any(g < 0):
        raise NegativeMean(f"{int(np.count_nonzero(g < 0))} pixel(s) have negative mean")

    out = np.empty_like(g)
    for i, rng in enumerate(row_generators(noise.seed, g.shape[0])):
        out[i] = rng.poisson(g[i])

    logger.debug("Poisson corruption: %dx%d, seed=%d", g.shape[0], g.shape[1], noise.seed)
    return out


def corrupt(g: Image, noise: NoiseSpec) -> tuple[Image, Image]:
    """Rescale to noise.peak then corrupt. Returns (clean_rescaled, noisy)."""
    clean = rescale_to_peak(g, noise.peak)
    noisy = poisson_corrupt(clean, noise)
    logger.info(
        "Corrupted %dx%d image at peak %g (seed %d): noisy max=%d",
        clean.shape[0], clean.shape[1], noise.peak, noise.seed, int(noisy.max()),
    )
    return clean, noisy


# =============================================================================
# Per-cell seed derivation
# =============================================================================


def fnv1a_64(data: bytes) -> int:
    """64-bit FNV-1a hash."""
    h = FNV_OFFSET_BASIS
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & MASK_64
    return h


def derive_cell_seed(seed: int, image_name: str, peak: float) -> int:
    """seed XOR FNV-1a(utf8("<image_name>|<peak:g>")), kept to 64 bits."""
    key = f"{image_name}|{peak:g}".encode("utf-8")
    return (seed ^ fnv1a_64(key)) & MASK_64
