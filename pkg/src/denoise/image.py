"""Image container helpers, periodic discrete gradient and its adjoint, norms on Y.

Images are 2-D float64 numpy arrays indexed (row i, column j). The gradient uses
forward differences with periodic wrap so that it is exactly the operator the
FFT u-step diagonalizes.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from src.errors import NonPositiveIntensity, ShapeMismatch, ValidationFailure

logger = logging.getLogger(__name__)

Image = npt.NDArray[np.float64]


def as_image(data: npt.ArrayLike, name: str = "image") -> Image:
    """Validate and convert array-like data to a finite 2-D float64 image."""
    arr = np.ascontiguousarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationFailure(f"{name} must be a non-empty 2-D grid, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationFailure(f"{name} contains non-finite values")
    return arr


def check_same_shape(*arrays: np.ndarray) -> tuple[int, int]:
    """Raise ShapeMismatch unless all arrays share one shape."""
    shape = arrays[0].shape
    for a in arrays[1:]:
        if a.shape != shape:
            raise ShapeMismatch(f"shape mismatch: {shape} vs {a.shape}")
    return shape  # type: ignore[return-value]


# =============================================================================
# Gradient fields (the space Y)
# =============================================================================


@dataclass(frozen=True)
class GradField:
    """Pair of M×N grids: horizontal (x) and vertical (y) components."""

    x: Image
    y: Image

    def __post_init__(self) -> None:
        if self.x.shape != self.y.shape:
            raise ShapeMismatch(f"GradField components differ: {self.x.shape} vs {self.y.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.x.shape  # type: ignore[return-value]

    @classmethod
    def zeros_like(cls, like: np.ndarray) -> GradField:
        return cls(np.zeros_like(like, dtype=np.float64), np.zeros_like(like, dtype=np.float64))

    def __add__(self, other: GradField) -> GradField:
        return GradField(self.x + other.x, self.y + other.y)

    def __sub__(self, other: GradField) -> GradField:
        return GradField(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> GradField:
        return GradField(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.x)) and np.all(np.isfinite(self.y)))


# =============================================================================
# Operators
# =============================================================================


def grad(u: Image) -> GradField:
    """Forward differences with periodic wrap.

    x: u(i, j+1 mod N) - u(i, j);  y: u(i+1 mod M, j) - u(i, j).
    """
    return GradField(np.roll(u, -1, axis=1) - u, np.roll(u, -1, axis=0) - u)


def grad_adjoint(p: GradField) -> Image:
    """Exact adjoint of grad (negative periodic divergence)."""
    return (np.roll(p.x, 1, axis=1) - p.x) + (np.roll(p.y, 1, axis=0) - p.y)


def identity_minus_laplacian(u: Image) -> Image:
    """(I - Δ)u = u + ∇ᵀ∇u, applied spatially."""
    return u + grad_adjoint(grad(u))


def inner(a: Image, b: Image) -> float:
    return float(np.sum(a * b))


def inner_field(p: GradField, q: GradField) -> float:
    return float(np.sum(p.x * q.x) + np.sum(p.y * q.y))


# =============================================================================
# Norms on Y
# =============================================================================


def norm_l1(p: GradField) -> float:
    return float(np.sum(np.abs(p.x) + np.abs(p.y)))


def norm_l2(p: GradField) -> float:
    return float(np.sqrt(np.sum(p.x**2 + p.y**2)))


def norm_l21(p: GradField) -> float:
    return float(np.sum(np.sqrt(p.x**2 + p.y**2)))


# =============================================================================
# Objectives
# =============================================================================


def poisson_fidelity(u: Image, f: Image) -> float:
    """⟨u - f log u, 1⟩ with the convention 0·log(·) = 0 where f = 0."""
    check_same_shape(u, f)
    observed = f > 0
    if np.any(u[observed] <= 0):
        bad = int(np.count_nonzero(u[observed] <= 0))
        raise NonPositiveIntensity(f"{bad} pixel(s) have u <= 0 where f > 0")
    log_term = np.zeros_like(u)
    log_term[observed] = f[observed] * np.log(u[observed])
    return float(np.sum(u - log_term))


def objective_aitv(u: Image, f: Image, lam: float, alpha: float) -> float:
    """λ⟨u - f log u, 1⟩ + ‖∇u‖₁ - α‖∇u‖₂,₁."""
    g = grad(u)
    return lam * poisson_fidelity(u, f) + norm_l1(g) - alpha * norm_l21(g)


def objective_tv(u: Image, f: Image, lam: float) -> float:
    """λ⟨u - f log u, 1⟩ + ‖∇u‖₂,₁ (isotropic TV baseline)."""
    return lam * poisson_fidelity(u, f) + norm_l21(grad(u))
