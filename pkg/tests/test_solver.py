"""Tests for the ADMM solver and its TV baselines."""

from __future__ import annotations

import numpy as np
import pytest

from src.denoise import solver
from src.denoise.image import objective_aitv
from src.denoise.metrics import psnr
from src.denoise.noise import corrupt
from src.denoise.solver import admm_solve, admm_solve_tv, denoise, objective_for, update_v
from src.errors import InvalidConfig, NonFiniteIterate
from src.models.config import (
    DEFAULT_ALPHAS,
    DEFAULT_LAMBDAS,
    NoiseSpec,
    Regularizer,
    SolverConfig,
    SweepGrid,
)
from src.sweep import run_sweep
from src.tools.synthetic import oblique_edge

# Sampled neighbours may undercut an early-stopped ADMM iterate by this relative margin.
LOCAL_OPTIMALITY_RTOL = 1e-3


def _make_config(**kwargs) -> SolverConfig:
    params = {"lam": 10.0, "alpha": 0.5}
    params.update(kwargs)
    return SolverConfig(**params)


@pytest.fixture(scope="module")
def oblique_peak30():
    """Rescaled clean and noisy oblique-edge fixture at peak 30, seed 7."""
    return corrupt(oblique_edge(64, 64), NoiseSpec(peak=30, seed=7))


class TestUpdateV:
    """Test suite for the closed-form v-step."""

    def test_solves_quadratic(self) -> None:
        """β v² − r v − λ f = 0 with v ≥ 0."""
        rng = np.random.default_rng(0)
        u = rng.uniform(0.0, 50.0, (8, 8))
        y = rng.standard_normal((8, 8))
        f = rng.poisson(20.0, (8, 8)).astype(float)
        lam, beta = 8.0, 0.3
        v = update_v(u, y, f, lam, beta)
        r = beta * u + y - lam
        np.testing.assert_allclose(beta * v**2 - r * v - lam * f, 0.0, atol=1e-9)
        assert np.all(v >= 0)

    def test_stable_branch_for_negative_r(self) -> None:
        """Strongly negative r still yields a positive root when f > 0."""
        u = np.zeros((1, 1))
        y = np.zeros((1, 1))
        f = np.ones((1, 1))
        v = update_v(u, y, f, lam=1e8, beta=1e-8)
        assert v[0, 0] > 0
        assert v[0, 0] == pytest.approx(1.0, rel=1e-6)

    def test_zero_observation_with_negative_r(self) -> None:
        """f = 0 and r < 0 gives v = 0."""
        v = update_v(np.zeros((1, 1)), np.zeros((1, 1)), np.zeros((1, 1)), lam=5.0, beta=1.0)
        assert v[0, 0] == 0.0


class TestAdmmSolve:
    """Test suite for admm_solve."""

    @pytest.mark.parametrize("lam", DEFAULT_LAMBDAS)
    @pytest.mark.parametrize("alpha", DEFAULT_ALPHAS)
    def test_constant_image_is_fixed_point(self, lam: float, alpha: float) -> None:
        """f ≡ 4 is returned unchanged."""
        f = np.full((32, 32), 4.0)
        result = admm_solve(f, _make_config(lam=lam, alpha=alpha))
        assert np.max(np.abs(result.u_star - 4.0)) <= 1e-3
        assert result.iterations <= 300
        assert result.converged

    def test_beta_schedule(self) -> None:
        """β_k = β₀σᵏ while under the cap."""
        f = np.random.default_rng(1).poisson(10.0, (16, 16)).astype(float)
        result = admm_solve(f, _make_config(epsilon=1e-300, max_iters=6))
        expected = [1e-3 * 1.75**k for k in range(6)]
        assert result.beta_history == pytest.approx(expected, rel=1e-12)
        assert result.iterations == 6
        assert not result.converged

    def test_beta_cap(self) -> None:
        """β stops growing at beta_cap."""
        f = np.random.default_rng(2).poisson(10.0, (16, 16)).astype(float)
        result = admm_solve(f, _make_config(beta0=1.0, sigma=10.0, beta_cap=100.0, epsilon=1e-300, max_iters=5))
        assert result.beta_history == pytest.approx([1.0, 10.0, 100.0, 100.0, 100.0])
        assert result.final_beta == 100.0

    def test_convergence_fixture(self, oblique_peak30) -> None:
        """Relative change drops below 1e-5 before 300 iterations and settles down."""
        _, noisy = oblique_peak30
        result = admm_solve(noisy, _make_config())
        history = result.rel_change_history

        assert result.converged
        assert 1 < result.iterations < 300
        assert history[-1] < 1e-5
        tail = history[-10:]
        for prev, nxt in zip(tail, tail[1:]):
            assert nxt <= 1.1 * prev

    def test_first_iteration_always_proceeds(self) -> None:
        """The warm start reproduces f at k = 0, yet the loop keeps going."""
        f = np.random.default_rng(3).poisson(10.0, (16, 16)).astype(float)
        result = admm_solve(f, _make_config())
        assert result.rel_change_history[0] < 1e-5
        assert result.iterations > 1

    def test_denoising_raises_psnr(self, oblique_peak30) -> None:
        """u* is closer to the clean image than the noisy input."""
        clean, noisy = oblique_peak30
        peak = float(clean.max())
        result = admm_solve(noisy, _make_config())
        assert psnr(result.u_star, clean, peak) > psnr(noisy, clean, peak) + 3.0
        assert not np.array_equal(result.u_star, noisy)

    def test_primal_feasibility(self, oblique_peak30) -> None:
        """‖u − v‖₂ and ‖∇u − w‖₂ end below 1e-4·‖f‖₂."""
        _, noisy = oblique_peak30
        result = admm_solve(noisy, _make_config())
        bound = 1e-4 * float(np.linalg.norm(noisy))
        assert result.converged
        assert result.primal_residual_uv < bound
        assert result.primal_residual_grad < bound

    def test_deterministic(self, oblique_peak30) -> None:
        """Same input and config give bitwise-identical results."""
        _, noisy = oblique_peak30
        a = admm_solve(noisy, _make_config())
        b = admm_solve(noisy, _make_config())
        np.testing.assert_array_equal(a.u_star, b.u_star)
        assert a.rel_change_history == b.rel_change_history
        assert a.objective_history == b.objective_history

    def test_local_optimality_sampling(self) -> None:
        """No random positive point within radius 0.1 of u* beats the final objective."""
        rng = np.random.default_rng(11)
        f = rng.uniform(1.0, 20.0, (4, 4))
        result = admm_solve(f, _make_config(lam=8.0, alpha=0.5))
        final = result.objective_history[-1]

        directions = rng.standard_normal((10_000, 16))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = 0.1 * rng.uniform(0.0, 1.0, (10_000, 1)) ** (1.0 / 16)
        candidates = np.maximum(result.u_star.ravel() + radii * directions, 1e-12)
        best = min(objective_aitv(c.reshape(4, 4), f, 8.0, 0.5) for c in candidates)

        assert result.converged
        assert final <= best + LOCAL_OPTIMALITY_RTOL * abs(best)

    def test_objective_improves_on_input(self, oblique_peak30) -> None:
        """The final objective is below the objective of the noisy input."""
        _, noisy = oblique_peak30
        config = _make_config()
        result = admm_solve(noisy, config)
        assert result.objective_history[-1] < objective_aitv(noisy, noisy, 10.0, 0.5)
        assert len(result.objective_history) == result.iterations

    def test_output_is_nonnegative(self, oblique_peak30) -> None:
        """u* is clamped at zero and diagnostics are populated."""
        _, noisy = oblique_peak30
        result = admm_solve(noisy, _make_config(max_iters=50))
        assert np.all(result.u_star >= 0)
        assert result.clamp_magnitude >= 0
        assert result.final_beta == result.beta_history[-1]
        assert result.primal_residual_uv >= 0
        assert result.wall_time > 0

    def test_verify_u_step(self, oblique_peak30) -> None:
        """Per-iteration residual checks pass on the fixture."""
        _, noisy = oblique_peak30
        result = admm_solve(noisy, _make_config(verify_u_step=True, max_iters=20))
        assert result.iterations == 20 or result.converged

    def test_rejects_negative_input(self) -> None:
        """Negative observations are refused."""
        f = np.ones((8, 8))
        f[0, 0] = -1.0
        with pytest.raises(InvalidConfig):
            admm_solve(f, _make_config())

    def test_non_finite_iterate(self, monkeypatch: pytest.MonkeyPatch) -> None:
        """A NaN in the iterates raises NonFiniteIterate."""
        monkeypatch.setattr(solver, "solve_u_step", lambda v, *args: np.full_like(v, np.nan))
        with pytest.raises(NonFiniteIterate):
            admm_solve(np.ones((8, 8)), _make_config())


class TestBaselines:
    """Test suite for the TV variants sharing the ADMM driver."""

    def test_tv_ignores_alpha(self, oblique_peak30) -> None:
        """Isotropic TV output does not depend on alpha."""
        _, noisy = oblique_peak30
        a = admm_solve_tv(noisy, _make_config(alpha=0.1, max_iters=40))
        b = admm_solve_tv(noisy, _make_config(alpha=0.9, max_iters=40))
        np.testing.assert_array_equal(a.u_star, b.u_star)
        assert a.regularizer == Regularizer.TV_ISOTROPIC

    def test_anisotropic_equals_aitv_alpha_zero(self, oblique_peak30) -> None:
        """Anisotropic TV is AITV with α = 0."""
        _, noisy = oblique_peak30
        aniso = denoise(noisy, _make_config(regularizer=Regularizer.TV_ANISOTROPIC, max_iters=40))
        aitv0 = denoise(noisy, _make_config(alpha=0.0, max_iters=40))
        np.testing.assert_allclose(aniso.u_star, aitv0.u_star, atol=1e-8)

    def test_denoise_dispatch(self) -> None:
        """denoise routes on config.regularizer."""
        f = np.full((12, 12), 3.0)
        result = denoise(f, _make_config(regularizer=Regularizer.TV_ISOTROPIC))
        assert result.regularizer == Regularizer.TV_ISOTROPIC

    def test_objective_for_tv(self) -> None:
        """TV history uses the isotropic objective."""
        f = np.full((4, 4), 2.0)
        config = _make_config(regularizer=Regularizer.TV_ISOTROPIC)
        assert objective_for(config, f, f) == pytest.approx(10.0 * float(np.sum(f - f * np.log(f))))

    def test_aitv_not_worse_than_tv(self) -> None:
        """Best-over-grid AITV PSNR beats TV in at least 2 of 3 peaks, and is never 0.1 dB behind."""
        grid = SweepGrid()
        wins = 0
        for peak in (30.0, 55.0, 80.0):
            clean, noisy = corrupt(oblique_edge(64, 64), NoiseSpec(peak=peak, seed=7))
            aitv = run_sweep(noisy, clean, grid, method="aitv").best_cell
            tv = run_sweep(noisy, clean, grid, method="tv").best_cell
            assert aitv.psnr_db >= tv.psnr_db - 0.1
            wins += aitv.psnr_db >= tv.psnr_db
        assert wins >= 2
