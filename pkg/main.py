"""AITV Poisson Denoising CLI entrypoint."""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from datetime import datetime
from pathlib import Path

from dotenv import load_dotenv


def setup_logging(log_level: str = "INFO") -> None:
    """Configure logging to both console and log file."""
    log_dir = Path(os.getenv("AITV_LOG_DIR", "logs"))
    log_dir.mkdir(parents=True, exist_ok=True)

    run_date = datetime.now().strftime("%Y-%m-%d")
    log_file = log_dir / f"run_{run_date}.log"

    logging.basicConfig(
        level=getattr(logging, log_level.upper(), logging.INFO),
        format="%(asctime)s | %(levelname)-8s | %(name)s | %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        handlers=[
            logging.StreamHandler(sys.stdout),
            logging.FileHandler(log_file, encoding="utf-8"),
        ],
        force=True,
    )


def _float_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _str_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--beta0", type=float, default=None, help="Initial penalty. Default: 1e-3")
    parser.add_argument("--sigma", type=float, default=None, help="Penalty growth factor (> 1). Default: 1.75")
    parser.add_argument("--tol", type=float, default=None, help="Relative-change tolerance. Default: 1e-5")
    parser.add_argument("--max-iters", type=int, default=None, help="Iteration cap. Default: 300")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aitv-denoise",
        description="AITV-regularized Poisson image denoising (ADMM), TV baselines and benchmarks",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  aitv-denoise synth corpus/ --size 64x64
  aitv-denoise noise corpus/oblique.png noisy.png --peak 30 --seed 7
  aitv-denoise denoise noisy.png out.aitv --lambda 10 --alpha 0.5
  aitv-denoise metrics out.aitv noisy_clean.aitv --output quality.json
  aitv-denoise sweep noisy.png noisy_clean.aitv sweep/ --method aitv
  aitv-denoise bench corpus/ bench_out/ --peaks 80,55,30 --methods aitv,tv
  aitv-denoise profile noisy_clean.aitv --row 32 --compare noisy.png --compare out.aitv -o row32.csv
        """,
    )
    parser.add_argument("--log-level", default=None, help="Log level override (DEBUG, INFO, WARNING, ERROR)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("noise", help="Rescale to a peak and add Poisson noise")
    p.add_argument("input", help="Clean grayscale image")
    p.add_argument("output", help="Noisy output (.png/.pgm/.tif/.aitv)")
    p.add_argument("--peak", type=float, required=True, help="Target peak intensity (e.g. 80, 55, 30)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed. Default: 0")

    p = sub.add_parser("denoise", help="Denoise one image")
    p.add_argument("input", nargs="?", default=None, help="Noisy image (optional with --manifest)")
    p.add_argument("output", help="Denoised output (.aitv or .tif)")
    p.add_argument("--method", default="aitv", choices=["aitv", "tv", "tv-aniso"], help="Regularizer. Default: aitv")
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="Fidelity weight. Default: 10")
    p.add_argument("--alpha", type=float, default=None, help="Isotropic weight in [0, 1] (aitv only). Default: 0.5")
    _add_solver_flags(p)
    p.add_argument("--manifest", default=None, help="Re-run with the parameters of a saved manifest")
    p.add_argument("--dynamic-range", type=float, default=None, help="Preview scale L. Default: max of input")
    p.add_argument("--clean", default=None, help="Clean reference; records PSNR/SSIM in the manifest")

    p = sub.add_parser("metrics", help="PSNR/SSIM of an image against a reference")
    p.add_argument("denoised")
    p.add_argument("clean")
    p.add_argument("--dynamic-range", type=float, default=None, help="Peak value L. Default: max of clean")
    p.add_argument("--output", "-o", default=None, help="JSON report path. Default: stdout")

    p = sub.add_parser("sweep", help="Grid-search lambda (and alpha) against a reference")
    p.add_argument("noisy")
    p.add_argument("clean")
    p.add_argument("out_dir")
    p.add_argument("--method", default="aitv", choices=["aitv", "tv", "tv-aniso"])
    p.add_argument("--lambdas", type=_float_list, default=None, help="Comma-separated. Default: 3,5,8,10,12,15,20")
    p.add_argument("--alphas", type=_float_list, default=None, help="Comma-separated. Default: 0.1,...,0.5")
    p.add_argument("--selection", default="best_psnr", choices=["best_psnr", "best_ssim"])
    p.add_argument("--dynamic-range", type=float, default=None, help="Peak value L. Default: max of clean")
    p.add_argument("--jobs", type=int, default=1, help="Parallel workers (AITV_THREADS overrides)")
    _add_solver_flags(p)

    p = sub.add_parser("bench", help="Full benchmark over a corpus directory")
    p.add_argument("corpus_dir")
    p.add_argument("out_dir")
    p.add_argument("--config", default="bench.yaml", help="Bench config file. Default: bench.yaml")
    p.add_argument("--peaks", type=_float_list, default=None, help="Comma-separated peaks")
    p.add_argument("--methods", type=_str_list, default=None, help="Comma-separated methods")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1, help="Parallel workers (AITV_THREADS overrides)")

    p = sub.add_parser("profile", help="Export an image row as CSV")
    p.add_argument("image")
    p.add_argument("--row", type=int, required=True, help="1-based row number (row r is index r-1)")
    p.add_argument("--compare", action="append", default=[], help="Extra image to add as a column")
    p.add_argument("--output", "-o", required=True, help="CSV path")

    p = sub.add_parser("synth", help="Write the synthetic piecewise-constant corpus")
    p.add_argument("out_dir")
    p.add_argument("--size", default="64x64", help="MxN. Default: 64x64")
    p.add_argument("--peak-base", type=float, default=None, help="Rescale each image so its max is this value")

    return parser


def dispatch(args: argparse.Namespace) -> None:
    from src import cli

    solver = {"beta0": getattr(args, "beta0", None), "sigma": getattr(args, "sigma", None),
              "epsilon": getattr(args, "tol", None), "max_iters": getattr(args, "max_iters", None)}

    if args.command == "noise":
        cli.cmd_noise(args.input, args.output, peak=args.peak, seed=args.seed)
    elif args.command == "denoise":
        cli.cmd_denoise(
            args.input,
            args.output,
            method=args.method,
            lam=args.lam,
            alpha=args.alpha,
            beta0=args.beta0,
            sigma=args.sigma,
            tol=args.tol,
            max_iters=args.max_iters,
            manifest=args.manifest,
            dynamic_range=args.dynamic_range,
            clean=args.clean,
        )
    elif args.command == "metrics":
        cli.cmd_metrics(args.denoised, args.clean, output=args.output, dynamic_range=args.dynamic_range)
    elif args.command == "sweep":
        cli.cmd_sweep(
            args.noisy,
            args.clean,
            args.out_dir,
            method=args.method,
            lambdas=args.lambdas,
            alphas=args.alphas,
            selection=args.selection,
            dynamic_range=args.dynamic_range,
            jobs=args.jobs,
            **solver,
        )
    elif args.command == "bench":
        cli.cmd_bench(
            args.corpus_dir,
            args.out_dir,
            config_path=args.config,
            peaks=args.peaks,
            methods=args.methods,
            seed=args.seed,
            jobs=args.jobs,
        )
    elif args.command == "profile":
        cli.cmd_profile(args.image, args.row, args.output, compare=args.compare)
    elif args.command == "synth":
        cli.cmd_synth(args.out_dir, size=args.size, peak_base=args.peak_base)


def main(argv: list[str] | None = None) -> None:
    """Main CLI entrypoint. Exits 0 ok, 1 solver failure, 2 usage/validation, 3 I/O."""
    args = build_parser().parse_args(argv)

    # Load environment variables
    load_dotenv()

    # Setup logging
    log_level = args.log_level or os.getenv("LOG_LEVEL", "INFO")
    setup_logging(log_level)

    logger = logging.getLogger("aitv_denoise")
    logger.info("aitv-denoise %s starting", args.command)

    from pydantic import ValidationError

    from src.errors import AitvError

    start_time = time.time()
    try:
        dispatch(args)
    except AitvError as e:
        logger.error("%s: %s", type(e).__name__, e)
        sys.exit(e.exit_code)
    except ValidationError as e:
        logger.error("Invalid parameters: %s", e)
        sys.exit(2)
    except OSError as e:
        logger.error("I/O error: %s", e)
        sys.exit(3)

    logger.info("%s complete in %.1f seconds", args.command, time.time() - start_time)


if __name__ == "__main__":
    main()
