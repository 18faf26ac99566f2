"""Markdown and HTML summaries of a benchmark run (Jinja2)."""

from __future__ import annotations

import logging
import math
from datetime import datetime
from pathlib import Path

from jinja2 import Environment

from src.models.result import BenchCell
from src.report.tables import NOISY_ROW

logger = logging.getLogger(__name__)

_md_env = Environment(autoescape=False)
_html_env = Environment(autoescape=True)


def _num(value: float, digits: int) -> str:
    if value is None or math.isnan(value):
        return "n/a"
    if math.isinf(value):
        return "inf"
    return f"{value:.{digits}f}"


_md_env.filters["num"] = _num
_html_env.filters["num"] = _num


MARKDOWN_TEMPLATE = """# Poisson Denoising Benchmark, {{ run_date }}

## Summary
- **Images**: {{ images | length }} ({{ images | join(", ") }})
- **Peaks**: {{ peaks | join(", ") }}
- **Methods**: {{ methods | join(", ") }}
- **Seed**: {{ seed }}
- **Failed sweep cells**: {{ failed }}

{% for block in blocks %}
## Peak {{ block.peak }}

| Method | {% for image in images %}{{ image }} | {% endfor %}Avg. |
|---|{% for image in images %}---|{% endfor %}---|
{% for row in block.rows %}| {{ row.method }} | {% for v in row["values"] %}{{ v.psnr | num(2) }}/{{ v.ssim | num(2) }} | {% endfor %}{{ row.avg_psnr | num(2) }}/{{ row.avg_ssim | num(2) }} |
{% endfor %}
{% endfor %}
## Average computational time

| Method | Avg. Time (s) |
|---|---|
{% for method, t in timings %}| {{ method }} | {{ t | num(3) }} |
{% endfor %}
---
*Generated by aitv-denoise on {{ run_date }}*
"""


HTML_TEMPLATE = """<!DOCTYPE html>
<html>
<head>
<meta charset="utf-8">
<title>Poisson Denoising Benchmark, {{ run_date }}</title>
<style>
  body { font-family: -apple-system, BlinkMacSystemFont, 'Segoe UI', Roboto, sans-serif; max-width: 960px; margin: 0 auto; padding: 20px; color: #1a1a1a; }
  table { border-collapse: collapse; margin-bottom: 24px; }
  th, td { border: 1px solid #ddd; padding: 6px 10px; text-align: right; }
  th:first-child, td:first-child { text-align: left; }
  tr.noisy td { color: #888; }
  td.best { font-weight: 700; }
  .footer { font-size: 12px; color: #999; margin-top: 30px; }
</style>
</head>
<body>
<h1>Poisson Denoising Benchmark</h1>
<p>{{ run_date }} &mdash; peaks {{ peaks | join(", ") }} &mdash; seed {{ seed }} &mdash; {{ failed }} failed cell(s)</p>
{% for block in blocks %}
<h2>Peak {{ block.peak }}</h2>
<table>
  <tr><th>Method</th>{% for image in images %}<th>{{ image }}</th>{% endfor %}<th>Avg.</th></tr>
  {% for row in block.rows %}
  <tr class="{{ 'noisy' if row.method == noisy_row else '' }}">
    <td>{{ row.method }}</td>
    {% for v in row["values"] %}<td class="{{ 'best' if v.best else '' }}">{{ v.psnr | num(2) }}/{{ v.ssim | num(2) }}</td>{% endfor %}
    <td>{{ row.avg_psnr | num(2) }}/{{ row.avg_ssim | num(2) }}</td>
  </tr>
  {% endfor %}
</table>
{% endfor %}
<h2>Average computational time</h2>
<table>
  <tr><th>Method</th><th>Avg. Time (s)</th></tr>
  {% for method, t in timings %}<tr><td>{{ method }}</td><td>{{ t | num(3) }}</td></tr>{% endfor %}
</table>
<div class="footer">Generated by aitv-denoise on {{ run_date }}</div>
</body>
</html>
"""


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else math.nan


def build_context(
    cells: list[BenchCell],
    images: list[str],
    peaks: list[float],
    methods: list[str],
    seed: int,
    failed: int = 0,
    run_date: str | None = None,
) -> dict:
    """Arrange bench cells into per-peak blocks, marking the best PSNR per image."""
    index = {(c.image, c.peak, c.method): c for c in cells}
    blocks = []
    for peak in peaks:
        best_per_image = {}
        for image in images:
            scores = [index[(image, peak, m)].psnr_db for m in methods if (image, peak, m) in index]
            scores = [s for s in scores if not math.isnan(s)]
            best_per_image[image] = max(scores) if scores else None

        rows = []
        for method in [NOISY_ROW, *methods]:
            values = []
            for image in images:
                cell = index.get((image, peak, method))
                p = cell.psnr_db if cell else math.nan
                s = cell.ssim if cell else math.nan
                best = method != NOISY_ROW and best_per_image[image] is not None and p == best_per_image[image]
                values.append({"psnr": p, "ssim": s, "best": best})
            rows.append(
                {
                    "method": method,
                    "values": values,
                    "avg_psnr": _mean([v["psnr"] for v in values]),
                    "avg_ssim": _mean([v["ssim"] for v in values]),
                }
            )
        blocks.append({"peak": f"{peak:g}", "rows": rows})

    timings = []
    for method in methods:
        times = [c.wall_time for c in cells if c.method == method and not math.isnan(c.psnr_db)]
        timings.append((method, _mean(times)))

    return {
        "run_date": run_date or datetime.now().strftime("%Y-%m-%d"),
        "images": images,
        "peaks": [f"{p:g}" for p in peaks],
        "methods": methods,
        "seed": seed,
        "failed": failed,
        "blocks": blocks,
        "timings": timings,
        "noisy_row": NOISY_ROW,
    }


def render_markdown(context: dict) -> str:
    return _md_env.from_string(MARKDOWN_TEMPLATE).render(**context)


def render_html(context: dict) -> str:
    return _html_env.from_string(HTML_TEMPLATE).render(**context)


def save_report(md_content: str, html_content: str, out_dir: str | Path) -> tuple[Path, Path]:
    """Save report.md and report.html into out_dir."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    md_path = out_dir / "report.md"
    html_path = out_dir / "report.html"
    md_path.write_text(md_content, encoding="utf-8")
    html_path.write_text(html_content, encoding="utf-8")

    logger.info("Reports saved: %s, %s", md_path, html_path)
    return md_path, html_path
