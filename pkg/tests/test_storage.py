"""Tests for the SQLite run history."""

from __future__ import annotations

import json
import math
from pathlib import Path

from src.models.result import BenchCell
from src.storage.database import RunRepository


def _make_cell(
    image: str = "oblique",
    peak: float = 30.0,
    method: str = "aitv",
    psnr_db: float = 28.5,
    **kwargs,
) -> BenchCell:
    """Helper to create a test cell."""
    return BenchCell(
        image=image,
        peak=peak,
        method=method,
        seed=2**64 - 1,
        psnr_db=psnr_db,
        ssim=0.81,
        **kwargs,
    )


class TestRunRepository:
    """Test suite for SQLite-backed run history."""

    def _get_repo(self, tmp_path: Path) -> RunRepository:
        return RunRepository(tmp_path / "nested" / "bench.db")

    def test_log_run(self, tmp_path: Path) -> None:
        """A logged run is readable with its params and errors."""
        repo = self._get_repo(tmp_path)

        run_id = repo.log_run(
            run_date="2026-01-01",
            command="bench",
            params={"peaks": [30.0]},
            total_cells=12,
            failed_cells=1,
            errors=["oblique@30: boom"],
            duration_secs=1.5,
        )

        runs = repo.get_runs()
        assert len(runs) == 1
        assert runs[0]["run_id"] == run_id
        assert json.loads(runs[0]["params"]) == {"peaks": [30.0]}
        assert json.loads(runs[0]["errors"]) == ["oblique@30: boom"]
        assert runs[0]["failed_cells"] == 1
        repo.close()

    def test_insert_and_read_cells(self, tmp_path: Path) -> None:
        """Cells are stored per run, 64-bit seeds intact."""
        with self._get_repo(tmp_path) as repo:
            run_id = repo.log_run(run_date="2026-01-01", command="bench")
            count = repo.insert_cells(
                run_id,
                [_make_cell(best_lam=10.0, best_alpha=0.5), _make_cell(method="tv", best_lam=8.0)],
            )

            cells = repo.get_cells(run_id)
            assert count == 2
            assert [c["method"] for c in cells] == ["aitv", "tv"]
            assert int(cells[0]["seed"]) == 2**64 - 1
            assert cells[0]["best_lambda"] == 10.0
            assert cells[1]["best_alpha"] is None

    def test_runs_are_separated(self, tmp_path: Path) -> None:
        """get_cells only returns the requested run."""
        with self._get_repo(tmp_path) as repo:
            first = repo.log_run(run_date="2026-01-01", command="bench")
            repo.insert_cells(first, [_make_cell()])
            second = repo.log_run(run_date="2026-01-02", command="bench")
            repo.insert_cells(second, [_make_cell(psnr_db=29.0), _make_cell(image="disks")])

            assert len(repo.get_cells(first)) == 1
            assert len(repo.get_cells(second)) == 2

    def test_best_history(self, tmp_path: Path) -> None:
        """PSNR history for one scenario across runs, oldest first."""
        with self._get_repo(tmp_path) as repo:
            for psnr_db in (27.0, 28.0):
                run_id = repo.log_run(run_date="2026-01-01", command="bench")
                repo.insert_cells(run_id, [_make_cell(psnr_db=psnr_db), _make_cell(method="tv")])

            assert repo.best_history("oblique", 30.0, "aitv") == [27.0, 28.0]

    def test_nan_metrics_round_trip_as_null(self, tmp_path: Path) -> None:
        """Failed cells (NaN metrics) are stored without error."""
        with self._get_repo(tmp_path) as repo:
            run_id = repo.log_run(run_date="2026-01-01", command="bench")
            repo.insert_cells(run_id, [_make_cell(psnr_db=math.nan)])

            value = repo.get_cells(run_id)[0]["psnr_db"]
            assert value is None or math.isnan(value)

    def test_schema_is_reopenable(self, tmp_path: Path) -> None:
        """Opening an existing database keeps its runs."""
        with self._get_repo(tmp_path) as repo:
            repo.log_run(run_date="2026-01-01", command="bench")
        with self._get_repo(tmp_path) as repo:
            assert len(repo.get_runs()) == 1
