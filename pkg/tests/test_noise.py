"""Tests for peak rescaling, seeded Poisson corruption and per-cell seeds."""

from __future__ import annotations

import numpy as np
import pytest

from src.denoise.noise import (
    corrupt,
    derive_cell_seed,
    fnv1a_64,
    poisson_corrupt,
    rescale_to_peak,
)
from src.errors import AllZeroImage, NegativeMean
from src.models.config import NoiseSpec
from src.tools.synthetic import oblique_edge


class TestRescale:
    """Test suite for rescale_to_peak."""

    def test_max_equals_peak(self) -> None:
        """The rescaled maximum is exactly the peak."""
        g = oblique_edge(32, 32)
        assert rescale_to_peak(g, 30.0).max() == pytest.approx(30.0, rel=1e-15)

    def test_identity_when_peak_is_max(self) -> None:
        """Rescaling to the current max changes nothing."""
        g = oblique_edge(16, 16)
        np.testing.assert_allclose(rescale_to_peak(g, g.max()), g)

    def test_all_zero(self) -> None:
        """An all-zero image cannot be rescaled."""
        with pytest.raises(AllZeroImage):
            rescale_to_peak(np.zeros((4, 4)), 30.0)

    def test_negative_input(self) -> None:
        """Negative intensities are refused."""
        with pytest.raises(NegativeMean):
            rescale_to_peak(np.array([[1.0, -1.0]]), 30.0)


class TestPoissonCorrupt:
    """Test suite for poisson_corrupt."""

    @pytest.mark.parametrize("mu", [1.0, 5.0, 30.0, 80.0])
    def test_moments(self, mu: float) -> None:
        """Sample mean and variance match μ over 10⁵ draws."""
        draws = poisson_corrupt(np.full((100, 1000), mu), NoiseSpec(peak=mu, seed=11))
        n = draws.size
        assert abs(draws.mean() - mu) <= 3.0 * np.sqrt(mu / n)
        assert abs(draws.var() - mu) / mu <= 0.05

    def test_deterministic(self) -> None:
        """Same seed, same counts."""
        g = rescale_to_peak(oblique_edge(32, 32), 30.0)
        a = poisson_corrupt(g, NoiseSpec(peak=30, seed=7))
        b = poisson_corrupt(g, NoiseSpec(peak=30, seed=7))
        np.testing.assert_array_equal(a, b)

    def test_seed_changes_output(self) -> None:
        """Different seeds give different realizations."""
        g = np.full((16, 16), 20.0)
        a = poisson_corrupt(g, NoiseSpec(peak=20, seed=1))
        b = poisson_corrupt(g, NoiseSpec(peak=20, seed=2))
        assert not np.array_equal(a, b)

    def test_rows_are_independent_of_height(self) -> None:
        """Row i depends only on (seed, i), not on how many rows follow."""
        g = np.full((20, 8), 15.0)
        tall = poisson_corrupt(g, NoiseSpec(peak=15, seed=3))
        short = poisson_corrupt(g[:10], NoiseSpec(peak=15, seed=3))
        np.testing.assert_array_equal(tall[:10], short)

    def test_counts_are_nonnegative_integers(self) -> None:
        """Output holds integer counts; zero mean gives zero."""
        g = np.array([[0.0, 3.0], [10.0, 0.0]])
        out = poisson_corrupt(g, NoiseSpec(peak=10, seed=0))
        np.testing.assert_array_equal(out, np.rint(out))
        assert out[0, 0] == 0 and out[1, 1] == 0
        assert np.all(out >= 0)

    def test_negative_mean(self) -> None:
        """Negative means are refused."""
        with pytest.raises(NegativeMean):
            poisson_corrupt(np.array([[-0.5]]), NoiseSpec(peak=1, seed=0))

    def test_corrupt_returns_clean_and_noisy(self) -> None:
        """corrupt rescales first and draws around the rescaled image."""
        clean, noisy = corrupt(oblique_edge(32, 32), NoiseSpec(peak=55, seed=5))
        assert clean.max() == pytest.approx(55.0)
        assert noisy.shape == clean.shape
        assert abs(noisy.mean() - clean.mean()) < 1.0


class TestCellSeeds:
    """Test suite for FNV-1a seed derivation."""

    def test_fnv_reference_values(self) -> None:
        """Published FNV-1a 64 test vectors."""
        assert fnv1a_64(b"") == 0xCBF29CE484222325
        assert fnv1a_64(b"a") == 0xAF63DC4C8601EC8C
        assert fnv1a_64(b"foobar") == 0x85944171F73967E8

    def test_derived_seed_is_xor(self) -> None:
        """seed ⊕ hash round-trips through XOR."""
        base = derive_cell_seed(0, "river", 30)
        assert base == fnv1a_64(b"river|30")
        assert derive_cell_seed(12345, "river", 30) ^ base == 12345

    def test_peak_formatting(self) -> None:
        """Integral float peaks hash like integers."""
        assert derive_cell_seed(7, "boat", 30.0) == derive_cell_seed(7, "boat", 30)

    def test_cells_get_distinct_seeds(self) -> None:
        """Different (image, peak) pairs get different seeds."""
        seeds = {derive_cell_seed(0, name, peak) for name in ("a", "b") for peak in (30, 55, 80)}
        assert len(seeds) == 6
        assert all(0 <= s < 2**64 for s in seeds)
