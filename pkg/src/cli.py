"""Command implementations behind the `aitv-denoise` subcommands.

Each `cmd_*` function does its own I/O and returns what it produced; errors
surface as `AitvError` subclasses and are mapped to exit codes in `main.py`.
"""

from __future__ import annotations

import logging
import time
from datetime import datetime
from pathlib import Path
from typing import Any

from src.denoise.metrics import line_profile, quality_report, write_profile_csv
from src.denoise.noise import corrupt
from src.denoise.solver import denoise
from src.errors import InvalidConfig, SolverFailure, ValidationFailure
from src.models.config import (
    METHODS,
    DEFAULT_ALPHAS,
    DEFAULT_LAMBDAS,
    NoiseSpec,
    Regularizer,
    Selection,
    SweepGrid,
    build_solver_config,
)
from src.models.manifest import RunManifest
from src.models.result import QualityReport
from src.report.tables import write_sweep_csv
from src.sweep import SweepOutcome, run_sweep
from src.tools.imageio import read_image, write_image, write_preview
from src.tools.synthetic import write_corpus

logger = logging.getLogger(__name__)

DEFAULT_LAMBDA = 10.0


def _sibling(path: Path, tag: str, suffix: str) -> Path:
    return path.with_name(f"{path.stem}_{tag}{suffix}")


def _solver_overrides(**params: Any) -> dict[str, Any]:
    return {k: v for k, v in params.items() if v is not None}


# =============================================================================
# noise
# =============================================================================


def cmd_noise(input_path: str | Path, output: str | Path, peak: float, seed: int = 0) -> tuple[Path, Path]:
    """Rescale to `peak`, draw Poisson counts, write the noisy image and `<stem>_clean.aitv`."""
    output = Path(output)
    noise = NoiseSpec(peak=peak, seed=seed)
    clean, noisy = corrupt(read_image(input_path), noise)

    noisy_path = write_image(output, noisy)
    clean_path = write_image(_sibling(output, "clean", ".aitv"), clean)
    logger.info("Noisy image written: %s (peak=%g, seed=%d), reference: %s", noisy_path, peak, seed, clean_path)
    return noisy_path, clean_path


# =============================================================================
# denoise
# =============================================================================


def cmd_denoise(
    input_path: str | Path | None,
    output: str | Path,
    method: str = "aitv",
    lam: float | None = None,
    alpha: float | None = None,
    beta0: float | None = None,
    sigma: float | None = None,
    tol: float | None = None,
    max_iters: int | None = None,
    manifest: str | Path | None = None,
    dynamic_range: float | None = None,
    clean: str | Path | None = None,
) -> RunManifest:
    """Denoise one image; writes the float output, an 8-bit preview and a manifest.

    With `manifest`, every solver parameter (and the input, unless given) comes
    from that file so the run is reproduced exactly.
    """
    if manifest is not None:
        previous = RunManifest.load(manifest)
        config = previous.solver
        method = previous.method
        input_path = input_path or previous.inputs.get("noisy")
        if dynamic_range is None:
            dynamic_range = previous.dynamic_range
        logger.info("Re-running from manifest %s", manifest)
    else:
        if method not in METHODS:
            raise InvalidConfig(f"unknown method {method!r}; choose from {sorted(METHODS)}")
        if alpha is not None and METHODS[method] != Regularizer.AITV:
            logger.warning("--alpha is ignored by --method %s", method)
            alpha = None
        config = build_solver_config(
            lam=DEFAULT_LAMBDA if lam is None else lam,
            regularizer=METHODS[method],
            **_solver_overrides(alpha=alpha, beta0=beta0, sigma=sigma, epsilon=tol, max_iters=max_iters),
        )
    if input_path is None:
        raise InvalidConfig("no input image given")

    f = read_image(input_path)
    if dynamic_range is None:
        dynamic_range = float(f.max()) if f.max() > 0 else 1.0

    result = denoise(f, config)

    output = Path(output)
    write_image(output, result.u_star)
    preview = write_preview(_sibling(output, "preview", ".png"), result.u_star, dynamic_range)

    run = RunManifest(
        command="denoise",
        method=method,
        inputs={"noisy": str(input_path)},
        outputs={"image": str(output), "preview": str(preview)},
        solver=config,
        dynamic_range=dynamic_range,
        iterations=result.iterations,
        converged=result.converged,
        wall_time=result.wall_time,
    )
    if clean is not None:
        reference = read_image(clean)
        report = quality_report(result.u_star, reference, dynamic_range)
        run.inputs["clean"] = str(clean)
        run.quality = report.model_dump(include={"psnr_db", "ssim"})
        logger.info("Quality vs %s: PSNR=%s SSIM=%.4f", clean, report.psnr_db, report.ssim)

    manifest_path = run.save(output.with_suffix(".manifest.json"))
    logger.info("Denoised image written: %s (manifest: %s)", output, manifest_path)
    return run


# =============================================================================
# metrics
# =============================================================================


def cmd_metrics(
    denoised: str | Path,
    clean: str | Path,
    output: str | Path | None = None,
    dynamic_range: float | None = None,
) -> QualityReport:
    """PSNR/SSIM of `denoised` against `clean`. L defaults to max(clean)."""
    u = read_image(denoised)
    g = read_image(clean)
    if dynamic_range is None:
        dynamic_range = float(g.max())
        if not dynamic_range > 0:
            raise ValidationFailure("clean image is all zero; pass --dynamic-range")

    report = quality_report(u, g, dynamic_range)
    if output is not None:
        output = Path(output)
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(report.to_json() + "\n", encoding="utf-8")
        logger.info("Quality report written: %s", output)
    else:
        print(report.to_json())
    return report


# =============================================================================
# sweep
# =============================================================================


def cmd_sweep(
    noisy: str | Path,
    clean: str | Path,
    out_dir: str | Path,
    method: str = "aitv",
    lambdas: list[float] | None = None,
    alphas: list[float] | None = None,
    selection: str = "best_psnr",
    dynamic_range: float | None = None,
    jobs: int | None = 1,
    **solver: Any,
) -> SweepOutcome:
    """Run the (lambda, alpha) grid; writes sweep.csv, best.aitv and best.manifest.json."""
    if method not in METHODS:
        raise InvalidConfig(f"unknown method {method!r}; choose from {sorted(METHODS)}")
    try:
        grid = SweepGrid(
            lambdas=lambdas or list(DEFAULT_LAMBDAS),
            alphas=alphas or list(DEFAULT_ALPHAS),
            selection=Selection(selection),
        )
    except ValueError as e:
        raise InvalidConfig(str(e)) from e

    f = read_image(noisy)
    g = read_image(clean)
    if dynamic_range is None:
        dynamic_range = float(g.max())

    outcome = run_sweep(
        f, g, grid, method=method, solver_overrides=_solver_overrides(**solver),
        dynamic_range=dynamic_range, jobs=jobs,
    )

    out_dir = Path(out_dir)
    write_sweep_csv(out_dir / "sweep.csv", outcome.cells)
    if outcome.best_result is None:
        raise SolverFailure(f"all {len(outcome.cells)} sweep cells failed")

    best_image = write_image(out_dir / "best.aitv", outcome.best_result.u_star)
    best = outcome.best_cell
    RunManifest(
        command="sweep",
        method=method,
        inputs={"noisy": str(noisy), "clean": str(clean)},
        outputs={"image": str(best_image), "table": str(out_dir / "sweep.csv")},
        solver=outcome.best_config,
        dynamic_range=dynamic_range,
        iterations=outcome.best_result.iterations,
        converged=outcome.best_result.converged,
        wall_time=outcome.best_result.wall_time,
        quality=QualityReport(psnr_db=best.psnr_db, ssim=best.ssim, dynamic_range=dynamic_range).model_dump(
            include={"psnr_db", "ssim"}
        ),
    ).save(out_dir / "best.manifest.json")
    return outcome


# =============================================================================
# bench
# =============================================================================


def cmd_bench(
    corpus_dir: str | Path,
    out_dir: str | Path,
    config_path: str | Path = "bench.yaml",
    peaks: list[float] | None = None,
    methods: list[str] | None = None,
    seed: int | None = None,
    jobs: int | None = 1,
) -> dict:
    """Run the benchmark pipeline. Flags given here override bench.yaml."""
    from src.graph import build_pipeline

    pipeline = build_pipeline()
    initial_state = {
        "corpus_dir": str(corpus_dir),
        "out_dir": str(out_dir),
        "config_path": str(config_path),
        "overrides": {"peaks": peaks, "methods": methods, "seed": seed},
        "jobs": jobs or 1,
        "run_date": datetime.now().strftime("%Y-%m-%d"),
        "started_at": time.perf_counter(),
        "errors": [],
    }
    result = pipeline.invoke(initial_state)

    logger.info(
        "Bench complete: %d sweep cells (%d failed), tables: %s, %s",
        result.get("total_cells", 0),
        result.get("failed_cells", 0),
        result.get("quality_csv"),
        result.get("timing_csv"),
    )
    if result.get("errors"):
        logger.warning("Errors: %s", result["errors"])
    return result


# =============================================================================
# profile
# =============================================================================


def cmd_profile(
    image: str | Path,
    row: int,
    output: str | Path,
    compare: list[str | Path] | None = None,
) -> Path:
    """Export row `row` (1-based) of `image` and of each `compare` image as CSV columns."""
    paths = [Path(image), *(Path(p) for p in compare or [])]
    columns: dict[str, Any] = {}
    for path in paths:
        name = path.stem
        while name in columns:
            name = f"{name}_{len(columns)}"
        columns[name] = line_profile(read_image(path), row - 1)
    return write_profile_csv(output, columns)


# =============================================================================
# synth
# =============================================================================


def parse_size(size: str) -> tuple[int, int]:
    """'MxN' -> (M, N)."""
    try:
        rows, cols = (int(part) for part in size.lower().split("x"))
    except ValueError as e:
        raise InvalidConfig(f"size must look like 64x64, got {size!r}") from e
    if rows < 1 or cols < 1:
        raise InvalidConfig(f"size must be positive, got {size!r}")
    return rows, cols


def cmd_synth(out_dir: str | Path, size: str = "64x64", peak_base: float | None = None) -> list[Path]:
    """Write the synthetic piecewise-constant corpus."""
    rows, cols = parse_size(size)
    return write_corpus(out_dir, rows, cols, peak_base=peak_base)
