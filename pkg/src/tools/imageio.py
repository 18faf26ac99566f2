"""Grayscale image I/O: PNG / PGM / TIFF through Pillow, plus the flat `.aitv` format.

`.aitv` layout (little-endian):
    bytes 0-3    magic b"AITV"
    bytes 4-7    u32 rows (M)
    bytes 8-11   u32 cols (N)
    bytes 12-15  u32 reserved, 0
    bytes 16-    M*N float32, row-major
"""

from __future__ import annotations

import logging
import struct
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from PIL import UnidentifiedImageError

from src.denoise.image import Image
from src.errors import ColorImageRejected, ImageIOError, ValidationFailure

logger = logging.getLogger(__name__)

AITV_MAGIC = b"AITV"
AITV_HEADER = struct.Struct("<4sIII")

FLOAT_SUFFIXES = {".aitv", ".tif", ".tiff"}
INTEGER_SUFFIXES = {".png", ".pgm"}

# Pillow modes holding a single intensity channel
GRAYSCALE_MODES = {"1", "L", "I", "I;16", "I;16L", "I;16B", "F"}


# =============================================================================
# Flat binary format
# =============================================================================


def write_aitv(path: str | Path, image: Image) -> Path:
    path = Path(path)
    rows, cols = image.shape
    payload = np.ascontiguousarray(image, dtype="<f4").tobytes()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(AITV_HEADER.pack(AITV_MAGIC, rows, cols, 0) + payload)
    return path


def read_aitv(path: str | Path) -> Image:
    raw = Path(path).read_bytes()
    if len(raw) < AITV_HEADER.size:
        raise ImageIOError(f"{path}: truncated header")
    magic, rows, cols, _ = AITV_HEADER.unpack_from(raw)
    if magic != AITV_MAGIC:
        raise ImageIOError(f"{path}: bad magic {magic!r}")
    expected = AITV_HEADER.size + 4 * rows * cols
    if len(raw) != expected:
        raise ImageIOError(f"{path}: expected {expected} bytes, found {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=AITV_HEADER.size)
    return data.reshape(rows, cols).astype(np.float64)


# =============================================================================
# Generic read / write
# =============================================================================


def read_image(path: str | Path) -> Image:
    """Read a grayscale image as float64. Color images are rejected."""
    path = Path(path)
    if not path.exists():
        raise ImageIOError(f"image not found: {path}")
    if path.suffix.lower() == ".aitv":
        return read_aitv(path)

    try:
        with PILImage.open(path) as img:
            if img.mode not in GRAYSCALE_MODES:
                raise ColorImageRejected(f"{path}: mode {img.mode!r} is not grayscale")
            arr = np.asarray(img)
    except (UnidentifiedImageError, OSError) as e:
        raise ImageIOError(f"cannot read {path}: {e}") from e

    if arr.ndim != 2:
        raise ColorImageRejected(f"{path}: expected one channel, got shape {arr.shape}")
    logger.debug("Read %s (%dx%d)", path, arr.shape[0], arr.shape[1])
    return arr.astype(np.float64)


def write_image(path: str | Path, image: Image) -> Path:
    """Write by suffix: `.aitv`/`.tif` keep float values; `.png`/`.pgm` need integer counts."""
    path = Path(path)
    suffix = path.suffix.lower()
    path.parent.mkdir(parents=True, exist_ok=True)

    try:
        if suffix == ".aitv":
            return write_aitv(path, image)
        if suffix in (".tif", ".tiff"):
            PILImage.fromarray(image.astype(np.float32)).save(path)
            return path
        if suffix in INTEGER_SUFFIXES:
            PILImage.fromarray(_to_integer_counts(image)).save(path)
            return path
    except OSError as e:
        raise ImageIOError(f"cannot write {path}: {e}") from e

    raise ImageIOError(f"unsupported image format: {suffix or '(none)'}")


def _to_integer_counts(image: Image) -> np.ndarray:
    rounded = np.rint(image)
    if not np.array_equal(rounded, image):
        raise ValidationFailure("PNG/PGM output needs integer values; use .aitv or .tif for floats")
    if rounded.min() < 0 or rounded.max() > 65535:
        raise ValidationFailure("PNG/PGM output needs values in [0, 65535]")
    if rounded.max() <= 255:
        return rounded.astype(np.uint8)
    return rounded.astype(np.uint16)


def to_preview(image: Image, dynamic_range: float) -> np.ndarray:
    """8-bit preview: scale by 255/L, round half to even, clip to [0, 255]."""
    if not dynamic_range > 0:
        raise ValidationFailure(f"dynamic range must be positive, got {dynamic_range}")
    scaled = np.rint(image * (255.0 / dynamic_range))
    return np.clip(scaled, 0, 255).astype(np.uint8)


def write_preview(path: str | Path, image: Image, dynamic_range: float) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        PILImage.fromarray(to_preview(image, dynamic_range)).save(path)
    except OSError as e:
        raise ImageIOError(f"cannot write {path}: {e}") from e
    return path


def list_images(directory: str | Path) -> list[Path]:
    """Readable image files in a directory, sorted by name."""
    directory = Path(directory)
    if not directory.is_dir():
        raise ImageIOError(f"corpus directory not found: {directory}")
    suffixes = INTEGER_SUFFIXES | FLOAT_SUFFIXES
    return sorted(p for p in directory.iterdir() if p.suffix.lower() in suffixes)
