"""SQLite storage for benchmark run history and per-cell results."""

from __future__ import annotations

import json
import logging
import sqlite3
from pathlib import Path

from src.models.result import BenchCell

logger = logging.getLogger(__name__)

SCHEMA_SQL = """
CREATE TABLE IF NOT EXISTS runs (
    run_id        INTEGER PRIMARY KEY AUTOINCREMENT,
    run_date      TEXT NOT NULL,
    command       TEXT NOT NULL,
    params        TEXT,  -- JSON object
    total_cells   INTEGER DEFAULT 0,
    failed_cells  INTEGER DEFAULT 0,
    errors        TEXT,  -- JSON list
    duration_secs REAL,
    created_at    TEXT NOT NULL DEFAULT (datetime('now'))
);

CREATE TABLE IF NOT EXISTS cells (
    cell_id       INTEGER PRIMARY KEY AUTOINCREMENT,
    run_id        INTEGER NOT NULL REFERENCES runs(run_id),
    image         TEXT NOT NULL,
    peak          REAL NOT NULL,
    method        TEXT NOT NULL,
    seed          TEXT NOT NULL,  -- 64-bit unsigned, stored as text
    psnr_db       REAL,
    ssim          REAL,
    best_lambda   REAL,
    best_alpha    REAL,
    wall_time     REAL,
    sweep_time    REAL,
    cells_failed  INTEGER DEFAULT 0
);

CREATE INDEX IF NOT EXISTS idx_cells_run ON cells(run_id);
CREATE INDEX IF NOT EXISTS idx_cells_key ON cells(image, peak, method);
"""


class RunRepository:
    """SQLite-backed history of benchmark runs."""

    def __init__(self, db_path: str | Path = "bench.db") -> None:
        self.db_path = str(db_path)
        Path(self.db_path).parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(self.db_path)
        self._conn.row_factory = sqlite3.Row
        self._init_schema()

    def _init_schema(self) -> None:
        self._conn.executescript(SCHEMA_SQL)
        self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    def __enter__(self) -> RunRepository:
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    # -- Insert -----------------------------------------------------------------

    def log_run(
        self,
        run_date: str,
        command: str,
        params: dict | None = None,
        total_cells: int = 0,
        failed_cells: int = 0,
        errors: list[str] | None = None,
        duration_secs: float | None = None,
    ) -> int:
        """Log a run. Returns its run_id."""
        cursor = self._conn.execute(
            """
            INSERT INTO runs (run_date, command, params, total_cells,
                              failed_cells, errors, duration_secs)
            VALUES (?, ?, ?, ?, ?, ?, ?)
            """,
            (
                run_date,
                command,
                json.dumps(params or {}, sort_keys=True),
                total_cells,
                failed_cells,
                json.dumps(errors or []),
                duration_secs,
            ),
        )
        self._conn.commit()
        return int(cursor.lastrowid)

    def insert_cells(self, run_id: int, cells: list[BenchCell]) -> int:
        """Insert bench cells for a run. Returns the count inserted."""
        self._conn.executemany(
            """
            INSERT INTO cells (run_id, image, peak, method, seed, psnr_db, ssim,
                               best_lambda, best_alpha, wall_time, sweep_time, cells_failed)
            VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            """,
            [
                (
                    run_id,
                    c.image,
                    c.peak,
                    c.method,
                    str(c.seed),
                    c.psnr_db,
                    c.ssim,
                    c.best_lam,
                    c.best_alpha,
                    c.wall_time,
                    c.sweep_time,
                    c.cells_failed,
                )
                for c in cells
            ],
        )
        self._conn.commit()
        logger.debug("Stored %d cells for run %d", len(cells), run_id)
        return len(cells)

    # -- Queries ----------------------------------------------------------------

    def get_runs(self) -> list[dict]:
        rows = self._conn.execute("SELECT * FROM runs ORDER BY run_id").fetchall()
        return [dict(row) for row in rows]

    def get_cells(self, run_id: int) -> list[dict]:
        rows = self._conn.execute(
            "SELECT * FROM cells WHERE run_id = ? ORDER BY cell_id", (run_id,)
        ).fetchall()
        return [dict(row) for row in rows]

    def best_history(self, image: str, peak: float, method: str) -> list[float]:
        """PSNR of every stored run for one (image, peak, method), oldest first."""
        rows = self._conn.execute(
            "SELECT psnr_db FROM cells WHERE image = ? AND peak = ? AND method = ? ORDER BY cell_id",
            (image, peak, method),
        ).fetchall()
        return [row["psnr_db"] for row in rows]
