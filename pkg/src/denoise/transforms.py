"""2-D DFT plumbing for the u-subproblem under periodic boundaries.

Convention: forward transform unnormalized, inverse divides by M·N (scipy.fft
defaults). The DFT symbols below are those of the forward differences in
src.denoise.image.grad, so the spectral solve and the spatial operators agree.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy import fft

from src.denoise.image import GradField, Image, check_same_shape, grad_adjoint, identity_minus_laplacian
from src.errors import NonNegligibleImaginary, ShapeMismatch

logger = logging.getLogger(__name__)

ComplexGrid = npt.NDArray[np.complex128]

IMAG_TOLERANCE = 1e-8


@dataclass(frozen=True)
class SpectralKernel:
    """DFT symbols of ∇x, ∇y and the spectrum of I - Δ for an M×N grid."""

    sym_x: ComplexGrid
    sym_y: ComplexGrid
    denom: npt.NDArray[np.float64]

    @property
    def shape(self) -> tuple[int, int]:
        return self.denom.shape  # type: ignore[return-value]


def dft2(u: Image) -> ComplexGrid:
    return fft.fft2(u)


def idft2(spectrum: ComplexGrid) -> Image:
    """Inverse transform of a spectrum that must belong to a real grid."""
    out = fft.ifft2(spectrum)
    residue = float(np.max(np.abs(out.imag))) if out.size else 0.0
    scale = float(np.max(np.abs(out.real))) if out.size else 0.0
    if residue > IMAG_TOLERANCE * (1.0 + scale):
        raise NonNegligibleImaginary(
            f"inverse DFT imaginary residue {residue:.3e} exceeds tolerance (max |real| {scale:.3e})"
        )
    return np.ascontiguousarray(out.real)


@lru_cache(maxsize=32)
def build_kernel(rows: int, cols: int) -> SpectralKernel:
    """Spectral symbols for an rows×cols periodic grid. Cached; the arrays are read-only."""
    if rows < 1 or cols < 1:
        raise ShapeMismatch(f"kernel dimensions must be positive, got {rows}x{cols}")

    col_freq = np.exp(2j * np.pi * np.arange(cols) / cols) - 1.0
    row_freq = np.exp(2j * np.pi * np.arange(rows) / rows) - 1.0
    sym_x = np.broadcast_to(col_freq[np.newaxis, :], (rows, cols)).copy()
    sym_y = np.broadcast_to(row_freq[:, np.newaxis], (rows, cols)).copy()
    denom = 1.0 + np.abs(sym_x) ** 2 + np.abs(sym_y) ** 2

    for arr in (sym_x, sym_y, denom):
        arr.setflags(write=False)

    logger.debug("Built spectral kernel for %dx%d grid", rows, cols)
    return SpectralKernel(sym_x=sym_x, sym_y=sym_y, denom=denom)


def u_step_rhs(v: Image, y: Image, z: GradField, w: GradField, beta: float) -> Image:
    """Right-hand side βv - y - ∇ᵀ(z - βw) of the u-step normal equation."""
    return beta * v - y - grad_adjoint(z - w * beta)


def solve_u_step(
    v: Image,
    y: Image,
    z: GradField,
    w: GradField,
    beta: float,
    kernel: SpectralKernel,
) -> Image:
    """Solve β(I - Δ)u = βv - y - ∇ᵀ(z - βw) by componentwise spectral division."""
    check_same_shape(v, y, z.x, w.x)
    if v.shape != kernel.shape:
        raise ShapeMismatch(f"kernel is {kernel.shape}, image is {v.shape}")

    dx = z.x - beta * w.x
    dy = z.y - beta * w.y
    numerator = (
        dft2(beta * v - y)
        - np.conj(kernel.sym_x) * dft2(dx)
        - np.conj(kernel.sym_y) * dft2(dy)
    )
    return idft2(numerator / (beta * kernel.denom))


def u_step_residual(
    u: Image, v: Image, y: Image, z: GradField, w: GradField, beta: float
) -> float:
    """Relative residual ‖β(I - Δ)u - rhs‖₂ / ‖rhs‖₂, with (I - Δ) applied spatially."""
    rhs = u_step_rhs(v, y, z, w, beta)
    lhs = beta * identity_minus_laplacian(u)
    rhs_norm = float(np.linalg.norm(rhs))
    diff = float(np.linalg.norm(lhs - rhs))
    if rhs_norm == 0.0:
        return diff
    return diff / rhs_norm
