"""Metrics CSV and dependency-free SVG trend charts."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence, Union

from .experiment import EpisodeMetrics, running_average

CSV_HEADER = ["episode", "coverage", "collisions", "steps", "total_reward", "epsilon", "terminal_reason"]

COVERAGE_COLOR = "#2ca02c"
COLLISION_COLOR = "#d62728"


def metrics_csv(episodes: Iterable[EpisodeMetrics]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for m in episodes:
        writer.writerow([
            m.episode_index,
            f"{m.coverage:.6f}",
            m.collisions,
            m.steps,
            m.total_reward,
            f"{m.epsilon_used:.6f}",
            m.terminal_reason,
        ])
    return buf.getvalue()


def write_metrics_csv(episodes: Iterable[EpisodeMetrics], path: Union[str, Path]) -> None:
    path = Path(path)
    data = metrics_csv(episodes).encode("ascii")
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OSError(f"cannot write metrics CSV {path}: {exc}") from exc


def read_metrics_csv(path: Union[str, Path]) -> list[dict[str, str]]:
    with open(path, newline="", encoding="ascii") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != CSV_HEADER:
            raise ValueError(f"{path}: unexpected CSV header {reader.fieldnames}")
        return list(reader)


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")


def _nice_max(v: float) -> float:
    """Smallest 1, 2 or 5 times a power of ten that is >= ``v``."""
    if v <= 0:
        return 1.0
    k = 10.0 ** math.floor(math.log10(v))
    for m in (1.0, 2.0, 5.0, 10.0):
        if m * k >= v:
            return m * k
    return 10.0 * k


def render_svg(
    series: Sequence[float],
    window: int = 50,
    color: str = COVERAGE_COLOR,
    title: str = "",
    y_label: str = "",
    y_range: tuple[float, float] | None = None,
    width: int = 640,
    height: int = 400,
) -> str:
    """SVG line chart of the trailing running average of ``series``."""
    if len(series) == 0:
        raise ValueError("cannot plot an empty series")
    smooth = running_average(series, window)
    if y_range is None:
        lo = min(0.0, min(smooth))
        hi = max(smooth)
        hi = _nice_max(hi) if hi > lo else lo + 1.0
        y_range = (lo, hi)
    y_lo, y_hi = y_range
    left, right, top, bottom = 70, 20, 40, 50
    pw, ph = width - left - right, height - top - bottom
    n = len(smooth)

    def px(i: int) -> float:
        return left + (pw * i / (n - 1) if n > 1 else pw / 2)

    def py(v: float) -> float:
        return top + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    points = " ".join(f"{px(i):.2f},{py(v):.2f}" for i, v in enumerate(smooth))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-family="sans-serif" '
        f'font-size="15">{_escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        v = y_lo + frac * (y_hi - y_lo)
        y = py(v)
        parts.append(f'<line x1="{left - 4}" y1="{y:.2f}" x2="{left}" y2="{y:.2f}" stroke="black"/>')
        parts.append(f'<text x="{left - 7}" y="{y + 4:.2f}" text-anchor="end" font-family="sans-serif" '
                     f'font-size="11">{v:g}</text>')
    for frac in (0.0, 0.5, 1.0):
        i = round(frac * (n - 1))
        parts.append(f'<text x="{px(i):.2f}" y="{top + ph + 16}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="11">{i}</text>')
    parts.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">episode</text>')
    parts.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
                 f'font-size="12" transform="rotate(-90 16 {top + ph / 2:.1f})">{_escape(y_label)}</text>')
    parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_plot_svg(series: Sequence[float], window: int, path: Union[str, Path], **kwargs) -> None:
    Path(path).write_text(render_svg(series, window, **kwargs), encoding="utf-8")


def coverage_plot(series: Sequence[float], window: int, path: Union[str, Path]) -> None:
    render_plot_svg(series, window, path, color=COVERAGE_COLOR, y_range=(0.0, 1.0),
                    title=f"Coverage (running average, window {window})", y_label="coverage")


def collisions_plot(series: Sequence[float], window: int, path: Union[str, Path]) -> None:
    render_plot_svg(series, window, path, color=COLLISION_COLOR,
                    title=f"Collisions (running average, window {window})", y_label="collisions")
