"""Tests for bench.yaml parsing into BenchConfig."""

from __future__ import annotations

from pathlib import Path

import pytest

from src.errors import InvalidConfig
from src.models.config import DEFAULT_PEAKS, Selection
from src.tools.bench_config import load_bench_config


SAMPLE_BENCH = """# Bench protocol
peaks: [30]
methods: [aitv, tv-aniso]
seed: 99
lambdas: [5, 10]
alphas: [0.3]
selection: best_ssim
solver:
  max_iters: 50
images: [oblique.png]
"""


class TestBenchConfigParsing:
    """Test suite for bench config parsing."""

    def test_parse_full_config(self, tmp_path: Path) -> None:
        """Test parsing a complete bench file."""
        filepath = tmp_path / "bench.yaml"
        filepath.write_text(SAMPLE_BENCH)

        config = load_bench_config(filepath)

        assert config.peaks == [30.0]
        assert config.methods == ["aitv", "tv-aniso"]
        assert config.seed == 99
        assert config.grid.lambdas == [5.0, 10.0]
        assert config.grid.alphas == [0.3]
        assert config.grid.selection == Selection.BEST_SSIM
        assert config.solver == {"max_iters": 50}
        assert config.images == ["oblique.png"]

    def test_missing_file_returns_defaults(self) -> None:
        """A missing file yields the default protocol."""
        config = load_bench_config("/nonexistent/path/bench.yaml")

        assert config.peaks == DEFAULT_PEAKS
        assert config.methods == ["aitv", "tv"]
        assert len(config.grid.lambdas) == 7
        assert len(config.grid.alphas) == 5

    def test_empty_file_returns_defaults(self, tmp_path: Path) -> None:
        """An empty file behaves like an empty mapping."""
        filepath = tmp_path / "bench.yaml"
        filepath.write_text("")

        assert load_bench_config(filepath).seed == 0

    def test_nested_grid_section(self, tmp_path: Path) -> None:
        """The grid may also be given as a nested mapping."""
        filepath = tmp_path / "bench.yaml"
        filepath.write_text("grid:\n  lambdas: [8]\n  alphas: [0.1, 0.2]\n")

        config = load_bench_config(filepath)

        assert config.grid.lambdas == [8.0]
        assert config.grid.alphas == [0.1, 0.2]

    def test_unknown_method_is_invalid(self, tmp_path: Path) -> None:
        """Unknown methods raise InvalidConfig."""
        filepath = tmp_path / "bench.yaml"
        filepath.write_text("methods: [aitv, nlmeans]\n")

        with pytest.raises(InvalidConfig):
            load_bench_config(filepath)

    def test_non_mapping_is_invalid(self, tmp_path: Path) -> None:
        """A top-level list is not a config."""
        filepath = tmp_path / "bench.yaml"
        filepath.write_text("- 30\n- 55\n")

        with pytest.raises(InvalidConfig):
            load_bench_config(filepath)

    def test_repo_bench_yaml_loads(self) -> None:
        """The shipped bench.yaml is valid."""
        config = load_bench_config(Path(__file__).resolve().parent.parent / "bench.yaml")

        assert config.peaks == [80.0, 55.0, 30.0]
        assert config.solver["sigma"] == 1.75
