"""Closed-form proximal operators for the w-subproblem.

prox_l1_minus_l2 is the general-n reference for

    argmin_y ‖y‖₁ - α‖y‖₂ + ‖x - y‖₂² / (2β).

prox_field applies a per-pixel prox to a gradient field with a vectorized n=2
path that agrees with the reference.
"""

from __future__ import annotations

import logging
from enum import Enum

import numpy as np
import numpy.typing as npt

from src.denoise.image import GradField
from src.errors import InvalidAlpha, InvalidBeta

logger = logging.getLogger(__name__)

Vector = npt.NDArray[np.float64]


class ProxFlavor(str, Enum):
    AITV = "aitv"
    ISOTROPIC = "isotropic"
    ANISOTROPIC = "anisotropic"


def _check_params(alpha: float, beta: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise InvalidAlpha(f"alpha must lie in [0, 1], got {alpha}")
    if not beta > 0.0:
        raise InvalidBeta(f"beta must be positive, got {beta}")


def l1_minus_l2_objective(y: Vector, x: Vector, alpha: float, beta: float) -> float:
    """Objective minimized by prox_l1_minus_l2, evaluated at y."""
    y = np.asarray(y, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return float(
        np.sum(np.abs(y)) - alpha * np.linalg.norm(y) + np.sum((x - y) ** 2) / (2.0 * beta)
    )


def soft_threshold(x: npt.ArrayLike, t: float) -> Vector:
    """sign(x)∘max(|x| - t, 0)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def prox_l1_minus_l2(x: npt.ArrayLike, alpha: float, beta: float) -> Vector:
    """Prox of ℓ1 - αℓ2 with step β, any vector length.

    Case 2 picks the smallest index among the maximizers of |x_j|.
    """
    _check_params(alpha, beta)
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    if x.size == 0:
        return out

    x_inf = float(np.max(np.abs(x)))
    if x_inf > beta:
        xi = soft_threshold(x, beta)
        xi_norm = float(np.linalg.norm(xi))
        assert xi_norm > 0.0, "soft-threshold must be nonzero when max|x| > beta"
        return (xi_norm + alpha * beta) * xi / xi_norm
    if x_inf > (1.0 - alpha) * beta:
        i = int(np.argmax(np.abs(x)))
        out.flat[i] = (abs(x.flat[i]) + (alpha - 1.0) * beta) * np.sign(x.flat[i])
    return out


def shrink_isotropic(s: npt.ArrayLike, t: float) -> Vector:
    """Group shrinkage: argmin_y t‖y‖₂ + ½‖y - s‖₂²."""
    s = np.asarray(s, dtype=np.float64)
    norm = float(np.linalg.norm(s))
    if norm <= t:
        return np.zeros_like(s)
    return (norm - t) * s / norm


# =============================================================================
# Per-pixel application to gradient fields
# =============================================================================


def _prox_aitv_pixels(sx: np.ndarray, sy: np.ndarray, alpha: float, step: float) -> GradField:
    """Vectorized n=2 form of prox_l1_minus_l2 applied at every pixel."""
    ax = np.abs(sx)
    ay = np.abs(sy)
    x_inf = np.maximum(ax, ay)

    out_x = np.zeros_like(sx)
    out_y = np.zeros_like(sy)

    # Case 1: max|x| > step
    large = x_inf > step
    if np.any(large):
        xi_x = np.sign(sx[large]) * np.maximum(ax[large] - step, 0.0)
        xi_y = np.sign(sy[large]) * np.maximum(ay[large] - step, 0.0)
        xi_norm = np.sqrt(xi_x**2 + xi_y**2)
        scale = (xi_norm + alpha * step) / xi_norm
        out_x[large] = scale * xi_x
        out_y[large] = scale * xi_y

    # Case 2: (1 - alpha)*step < max|x| <= step, 1-sparse output
    middle = ~large & (x_inf > (1.0 - alpha) * step)
    if np.any(middle):
        pick_x = middle & (ax >= ay)
        pick_y = middle & (ax < ay)
        out_x[pick_x] = (ax[pick_x] + (alpha - 1.0) * step) * np.sign(sx[pick_x])
        out_y[pick_y] = (ay[pick_y] + (alpha - 1.0) * step) * np.sign(sy[pick_y])

    return GradField(out_x, out_y)


def _shrink_isotropic_pixels(sx: np.ndarray, sy: np.ndarray, t: float) -> GradField:
    norm = np.sqrt(sx**2 + sy**2)
    scale = np.zeros_like(norm)
    keep = norm > t
    scale[keep] = (norm[keep] - t) / norm[keep]
    return GradField(scale * sx, scale * sy)


def prox_field(
    s: GradField,
    alpha: float,
    beta: float,
    flavor: ProxFlavor | str = ProxFlavor.AITV,
) -> GradField:
    """Apply the per-pixel prox with step (or threshold) 1/β to every pixel of s."""
    flavor = ProxFlavor(flavor)
    if not beta > 0.0:
        raise InvalidBeta(f"beta must be positive, got {beta}")
    step = 1.0 / beta

    if flavor == ProxFlavor.AITV:
        _check_params(alpha, step)
        return _prox_aitv_pixels(s.x, s.y, alpha, step)
    if flavor == ProxFlavor.ANISOTROPIC:
        return GradField(soft_threshold(s.x, step), soft_threshold(s.y, step))
    return _shrink_isotropic_pixels(s.x, s.y, step)
