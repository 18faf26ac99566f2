"""LangGraph workflow for the 7-node benchmark pipeline."""

from __future__ import annotations

import logging
import math
import os
import time
from datetime import datetime
from pathlib import Path
from typing import Any, TypedDict

from langgraph.graph import END, StateGraph

from src.denoise.image import Image
from src.denoise.metrics import quality_report
from src.denoise.noise import corrupt, derive_cell_seed
from src.errors import AitvError, ImageIOError
from src.models.config import BenchConfig, NoiseSpec
from src.models.result import BenchCell
from src.report.renderer import build_context, render_html, render_markdown, save_report
from src.report.tables import NOISY_ROW, write_quality_table, write_sweep_csv, write_timing_table
from src.storage.database import RunRepository
from src.sweep import run_sweep
from src.tools.bench_config import load_bench_config
from src.tools.imageio import list_images, read_image

logger = logging.getLogger(__name__)


# =============================================================================
# Pipeline State
# =============================================================================


class Scenario(TypedDict):
    """One corrupted (image, peak) pair shared by every method."""

    image: str
    peak: float
    seed: int
    clean: Image
    noisy: Image


class BenchState(TypedDict, total=False):
    """State passed between nodes in the LangGraph pipeline."""

    # Config
    corpus_dir: str
    out_dir: str
    config_path: str
    overrides: dict[str, Any]  # CLI flags that win over bench.yaml
    jobs: int
    run_date: str
    started_at: float

    # Data
    config: BenchConfig
    corpus: dict[str, Image]
    scenarios: list[Scenario]
    cells: list[BenchCell]

    # Stats
    total_cells: int
    failed_cells: int
    errors: list[str]

    # Outputs
    quality_csv: str
    timing_csv: str
    report_md: str
    report_html: str
    run_id: int
    history_runs: int


# =============================================================================
# Node 1: Load Config
# =============================================================================


def load_config_node(state: BenchState) -> dict:
    """Read bench.yaml and apply CLI overrides."""
    logger.info("=== Node 1: Loading Bench Config ===")

    config = load_bench_config(state.get("config_path", "bench.yaml"))
    overrides = {k: v for k, v in (state.get("overrides") or {}).items() if v is not None}
    if overrides:
        config = BenchConfig(**{**config.model_dump(), **overrides})
        logger.info("CLI overrides applied: %s", sorted(overrides))

    return {"config": config}


# =============================================================================
# Node 2: Load Corpus
# =============================================================================


def load_corpus_node(state: BenchState) -> dict:
    """Read the clean images, keyed by file stem."""
    logger.info("=== Node 2: Loading Corpus ===")

    corpus_dir = Path(state["corpus_dir"])
    config = state["config"]

    if config.images:
        paths = [corpus_dir / name for name in config.images]
    else:
        paths = list_images(corpus_dir)
    if not paths:
        raise ImageIOError(f"no images found in {corpus_dir}")

    corpus = {path.stem: read_image(path) for path in paths}
    logger.info("Loaded %d images: %s", len(corpus), ", ".join(corpus))
    return {"corpus": corpus}


# =============================================================================
# Node 3: Corrupt
# =============================================================================


def corrupt_node(state: BenchState) -> dict:
    """Rescale each image to every peak and draw Poisson noise with a per-cell seed."""
    logger.info("=== Node 3: Corrupting ===")

    config = state["config"]
    errors = list(state.get("errors", []))
    scenarios: list[Scenario] = []

    for name, image in state["corpus"].items():
        for peak in config.peaks:
            seed = derive_cell_seed(config.seed, name, peak)
            try:
                clean, noisy = corrupt(image, NoiseSpec(peak=peak, seed=seed))
            except AitvError as e:
                logger.warning("Skipping %s at peak %g: %s", name, peak, e)
                errors.append(f"{name}@{peak:g}: {e}")
                continue
            scenarios.append(Scenario(image=name, peak=peak, seed=seed, clean=clean, noisy=noisy))

    logger.info("Prepared %d (image, peak) scenarios", len(scenarios))
    return {"scenarios": scenarios, "errors": errors}


# =============================================================================
# Node 4: Run Cells
# =============================================================================


def run_cells_node(state: BenchState) -> dict:
    """Sweep every method on every scenario, keeping the best cell of each sweep."""
    logger.info("=== Node 4: Running Sweeps ===")

    config = state["config"]
    cells_dir = Path(state["out_dir"]) / "cells"
    jobs = state.get("jobs", 1)
    errors = list(state.get("errors", []))
    cells: list[BenchCell] = []
    total = failed = 0

    for sc in state["scenarios"]:
        dynamic_range = float(sc["clean"].max())
        noisy_cell = BenchCell(image=sc["image"], peak=sc["peak"], method=NOISY_ROW, seed=sc["seed"])
        try:
            noisy_q = quality_report(sc["noisy"], sc["clean"], dynamic_range)
            noisy_cell.psnr_db = noisy_q.psnr_db
            noisy_cell.ssim = noisy_q.ssim
        except AitvError as e:
            logger.warning("Noisy metrics failed for %s at peak %g: %s", sc["image"], sc["peak"], e)
            errors.append(f"{sc['image']}@{sc['peak']:g}/{NOISY_ROW}: {e}")
        cells.append(noisy_cell)

        for method in config.methods:
            outcome = run_sweep(
                sc["noisy"],
                sc["clean"],
                config.grid,
                method=method,
                solver_overrides=config.solver,
                dynamic_range=dynamic_range,
                jobs=jobs,
            )
            write_sweep_csv(cells_dir / f"{sc['image']}_p{sc['peak']:g}_{method}.csv", outcome.cells)
            total += len(outcome.cells)
            failed += outcome.failed

            best = outcome.best_cell
            cell = BenchCell(
                image=sc["image"],
                peak=sc["peak"],
                method=method,
                seed=sc["seed"],
                sweep_time=outcome.wall_time,
                cells_failed=outcome.failed,
            )
            if best is not None:
                cell.psnr_db = best.psnr_db
                cell.ssim = best.ssim
                cell.best_lam = best.lam
                cell.best_alpha = best.alpha
                cell.wall_time = best.wall_time
            cells.append(cell)
            logger.info(
                "%s @ peak %g, %s: PSNR=%.3f SSIM=%.4f (lambda=%s, alpha=%s)",
                sc["image"], sc["peak"], method, cell.psnr_db, cell.ssim, cell.best_lam, cell.best_alpha,
            )

    return {"cells": cells, "total_cells": total, "failed_cells": failed, "errors": errors}


# =============================================================================
# Node 5: Aggregate
# =============================================================================


def aggregate_node(state: BenchState) -> dict:
    """Merge cell results into the quality and timing tables."""
    logger.info("=== Node 5: Aggregating Tables ===")

    config = state["config"]
    out_dir = Path(state["out_dir"])
    images = list(state["corpus"])
    cells = state.get("cells", [])

    quality = write_quality_table(out_dir / "quality.csv", cells, images, config.peaks, config.methods)
    timing = write_timing_table(out_dir / "timing.csv", cells, config.methods)
    return {"quality_csv": str(quality), "timing_csv": str(timing)}


# =============================================================================
# Node 6: Render Report
# =============================================================================


def render_report_node(state: BenchState) -> dict:
    """Generate Markdown and HTML summaries."""
    logger.info("=== Node 6: Rendering Report ===")

    config = state["config"]
    context = build_context(
        state.get("cells", []),
        list(state["corpus"]),
        config.peaks,
        config.methods,
        config.seed,
        failed=state.get("failed_cells", 0),
        run_date=state.get("run_date"),
    )
    md_path, html_path = save_report(render_markdown(context), render_html(context), state["out_dir"])
    return {"report_md": str(md_path), "report_html": str(html_path)}


# =============================================================================
# Node 7: Persist
# =============================================================================


def persist_node(state: BenchState) -> dict:
    """Log the run and its cells to SQLite."""
    logger.info("=== Node 7: Persisting Run ===")

    db_path = os.getenv("AITV_DB_PATH") or str(Path(state["out_dir"]) / "bench.db")
    config = state["config"]
    started_at = state.get("started_at")
    duration = time.perf_counter() - started_at if started_at is not None else None
    cells = state.get("cells", [])

    with RunRepository(db_path) as repo:
        run_id = repo.log_run(
            run_date=state.get("run_date") or datetime.now().strftime("%Y-%m-%d"),
            command="bench",
            params=config.model_dump(mode="json"),
            total_cells=state.get("total_cells", 0),
            failed_cells=state.get("failed_cells", 0),
            errors=state.get("errors"),
            duration_secs=duration,
        )
        repo.insert_cells(run_id, cells)
        history_runs = len(repo.get_runs())

        for cell in cells:
            if cell.method == NOISY_ROW:
                continue
            history = [
                p for p in repo.best_history(cell.image, cell.peak, cell.method) if p is not None and not math.isnan(p)
            ]
            if len(history) >= 2:
                logger.info(
                    "%s @ peak %g, %s: PSNR %.3f -> %.3f (%+.3f dB vs previous run)",
                    cell.image, cell.peak, cell.method, history[-2], history[-1], history[-1] - history[-2],
                )

    logger.info("Run %d stored in %s (%d cells, %d runs in history)", run_id, db_path, len(cells), history_runs)
    return {"run_id": run_id, "history_runs": history_runs}


# =============================================================================
# Graph Builder
# =============================================================================


def build_pipeline() -> StateGraph:
    """Build and compile the LangGraph pipeline."""
    graph = StateGraph(BenchState)

    graph.add_node("load_config", load_config_node)
    graph.add_node("load_corpus", load_corpus_node)
    graph.add_node("corrupt", corrupt_node)
    graph.add_node("run_cells", run_cells_node)
    graph.add_node("aggregate", aggregate_node)
    graph.add_node("render_report", render_report_node)
    graph.add_node("persist", persist_node)

    graph.set_entry_point("load_config")
    graph.add_edge("load_config", "load_corpus")
    graph.add_edge("load_corpus", "corrupt")
    graph.add_edge("corrupt", "run_cells")
    graph.add_edge("run_cells", "aggregate")
    graph.add_edge("aggregate", "render_report")
    graph.add_edge("render_report", "persist")
    graph.add_edge("persist", END)

    return graph.compile()
