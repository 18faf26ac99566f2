"""ADMM driver for the AITV Poisson model and its TV baselines.

Splitting: u = v, ∇u = w, with multipliers y (for u = v) and z (for ∇u = w).
Each iteration performs the u-step (FFT solve), v-step (closed form), w-step
(per-pixel prox), dual ascent, and the geometric penalty update β ← σβ capped at
beta_cap.
"""

from __future__ import annotations

import logging
import time

import numpy as np

from src.denoise.image import (
    GradField,
    Image,
    as_image,
    grad,
    objective_aitv,
    objective_tv,
)
from src.denoise.prox import ProxFlavor, prox_field
from src.denoise.transforms import build_kernel, solve_u_step, u_step_residual
from src.errors import InvalidConfig, NonFiniteIterate, SolverFailure, ValidationFailure
from src.models.config import Regularizer, SolverConfig
from src.models.result import SolverResult

logger = logging.getLogger(__name__)

U_STEP_TOLERANCE = 1e-8

_FLAVORS: dict[Regularizer, ProxFlavor] = {
    Regularizer.AITV: ProxFlavor.AITV,
    Regularizer.TV_ISOTROPIC: ProxFlavor.ISOTROPIC,
    Regularizer.TV_ANISOTROPIC: ProxFlavor.ANISOTROPIC,
}


# =============================================================================
# Subproblems
# =============================================================================


def update_v(u: Image, y: Image, f: Image, lam: float, beta: float) -> Image:
    """Closed-form v-step: v = (r + sqrt(r² + 4λβf)) / (2β), r = βu + y - λ.

    For r < 0 the algebraically equal form 2λf / (sqrt(r² + 4λβf) - r) is used
    to avoid cancellation.
    """
    r = beta * u + y - lam
    s = np.sqrt(r * r + 4.0 * lam * beta * f)
    v = np.empty_like(r)
    pos = r >= 0
    v[pos] = (r[pos] + s[pos]) / (2.0 * beta)
    neg = ~pos
    v[neg] = 2.0 * lam * f[neg] / (s[neg] - r[neg])
    return v


def objective_for(config: SolverConfig, v: Image, f: Image) -> float:
    """Model objective used for the per-iteration history."""
    if config.regularizer == Regularizer.TV_ISOTROPIC:
        return objective_tv(v, f, config.lam)
    return objective_aitv(v, f, config.lam, config.effective_alpha())


def _check_finite(name: str, k: int, *arrays: np.ndarray) -> None:
    for arr in arrays:
        if not np.all(np.isfinite(arr)):
            raise NonFiniteIterate(f"non-finite values in {name} at iteration {k}")


# =============================================================================
# Driver
# =============================================================================


def admm_solve(f: Image, config: SolverConfig) -> SolverResult:
    """Run ADMM on the model selected by config.regularizer."""
    try:
        f = as_image(f, "f")
    except ValidationFailure as e:
        raise InvalidConfig(str(e)) from e
    if np.any(f < 0):
        raise InvalidConfig("noisy image must be nonnegative")

    lam = config.lam
    alpha = config.effective_alpha()
    flavor = _FLAVORS[config.regularizer]
    kernel = build_kernel(*f.shape)

    u = f.copy()
    v = f.copy()
    y = np.zeros_like(f)
    w = grad(f)
    z = GradField.zeros_like(f)
    beta = config.beta0

    rel_history: list[float] = []
    obj_history: list[float] = []
    beta_history: list[float] = []
    converged = False
    iterations = 0

    start = time.perf_counter()
    for k in range(config.max_iters):
        beta_history.append(beta)

        u_next = solve_u_step(v, y, z, w, beta, kernel)
        if config.verify_u_step:
            residual = u_step_residual(u_next, v, y, z, w, beta)
            if residual > U_STEP_TOLERANCE:
                raise SolverFailure(f"u-step residual {residual:.3e} at iteration {k}")

        v = update_v(u_next, y, f, lam, beta)
        grad_u = grad(u_next)
        w = prox_field(grad_u + z * (1.0 / beta), alpha, beta, flavor)

        y = y + beta * (u_next - v)
        z = z + (grad_u - w) * beta
        _check_finite("iterates", k, u_next, v, w.x, w.y, y, z.x, z.y)

        u_norm = float(np.linalg.norm(u_next))
        change = float(np.linalg.norm(u_next - u))
        rel = change / u_norm if u_norm > 0 else change
        u = u_next
        iterations = k + 1

        rel_history.append(rel)
        obj_history.append(objective_for(config, v, f))
        logger.debug(
            "iter %d: beta=%.3e rel_change=%.3e objective=%.6e", iterations, beta, rel, obj_history[-1]
        )

        beta = min(config.sigma * beta, config.beta_cap)
        # first iteration always proceeds
        if k > 0 and rel < config.epsilon:
            converged = True
            break

    wall_time = time.perf_counter() - start

    clamp_magnitude = float(max(0.0, -float(np.min(u))))
    u_star = np.maximum(u, 0.0)
    final_grad = grad(u)

    result = SolverResult(
        u_star=u_star,
        iterations=iterations,
        rel_change_history=rel_history,
        objective_history=obj_history,
        beta_history=beta_history,
        wall_time=wall_time,
        converged=converged,
        regularizer=config.regularizer,
        final_beta=beta_history[-1],
        clamp_magnitude=clamp_magnitude,
        primal_residual_uv=float(np.linalg.norm(u - v)),
        primal_residual_grad=float(
            np.sqrt(np.sum((final_grad.x - w.x) ** 2 + (final_grad.y - w.y) ** 2))
        ),
    )
    logger.info(
        "%s solve: %d iterations, rel_change=%.2e, %s in %.3fs",
        config.regularizer.value,
        iterations,
        rel_history[-1],
        "converged" if converged else "hit iteration cap",
        wall_time,
    )
    return result


def admm_solve_tv(f: Image, config: SolverConfig) -> SolverResult:
    """Isotropic-TV Poisson baseline solved with the same splitting."""
    return admm_solve(f, config.model_copy(update={"regularizer": Regularizer.TV_ISOTROPIC}))


def denoise(f: Image, config: SolverConfig) -> SolverResult:
    """Dispatch on config.regularizer."""
    if config.regularizer == Regularizer.TV_ISOTROPIC:
        return admm_solve_tv(f, config)
    return admm_solve(f, config)
