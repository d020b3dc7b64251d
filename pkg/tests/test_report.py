import re
import xml.etree.ElementTree as ET

import pytest

from coverbot.experiment import EpisodeMetrics, evaluate, running_average
from coverbot.report import (
    CSV_HEADER, COLLISION_COLOR, COVERAGE_COLOR, collisions_plot, coverage_plot, metrics_csv,
    read_metrics_csv, render_svg, write_metrics_csv,
)

SVG_NS = "{http://www.w3.org/2000/svg}"


def _points(svg_text):
    root = ET.fromstring(svg_text)
    poly = root.find(f"{SVG_NS}polyline")
    return poly, [tuple(map(float, p.split(","))) for p in poly.get("points").split()]


def test_empty_log_is_header_only(tmp_path):
    path = tmp_path / "m.csv"
    write_metrics_csv([], path)
    assert path.read_bytes() == (",".join(CSV_HEADER) + "\n").encode()


def test_csv_rows_and_formatting(tmp_path):
    ms = [EpisodeMetrics(0, 1 / 3, 4, 1800, "budget_exhausted", -2, 0.5),
          EpisodeMetrics(1, 1.0, 0, 77, "full_coverage", 120, 0.25)]
    text = metrics_csv(ms)
    assert text.splitlines()[1] == "0,0.333333,4,1800,-2,0.500000,budget_exhausted"
    assert text.splitlines()[2] == "1,1.000000,0,77,120,0.250000,full_coverage"
    assert "\r" not in text
    path = tmp_path / "m.csv"
    write_metrics_csv(ms, path)
    first = path.read_bytes()
    write_metrics_csv(ms, path)
    assert path.read_bytes() == first
    rows = read_metrics_csv(path)
    assert [r["episode"] for r in rows] == ["0", "1"]


def test_csv_write_error_names_path(tmp_path):
    with pytest.raises(OSError, match="nope"):
        write_metrics_csv([], tmp_path / "nope" / "m.csv")


def test_constant_series_is_horizontal():
    text = render_svg([3.0] * 20, window=5)
    assert text.startswith("<svg")
    _, pts = _points(text)
    assert len(pts) == 20
    assert len({y for _, y in pts}) == 1


def test_svg_colors_and_labels(tmp_path):
    coverage_plot([0.2, 0.4, 0.6], 2, tmp_path / "c.svg")
    collisions_plot([10, 20, 15], 2, tmp_path / "k.svg")
    c, k = (tmp_path / "c.svg").read_text(), (tmp_path / "k.svg").read_text()
    assert COVERAGE_COLOR in c and COLLISION_COLOR in k
    assert "episode" in c and "coverage" in c and "collisions" in k
    ET.fromstring(c)
    ET.fromstring(k)


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        render_svg([], 5)


def test_baseline_coverage_plot_within_axis(tmp_path):
    s = evaluate("baseline", 12, master_seed=1, budget=400)
    series = [m.coverage for m in s.metrics]
    coverage_plot(series, 5, tmp_path / "c.svg")
    text = (tmp_path / "c.svg").read_text()
    _, pts = _points(text)
    smooth = running_average(series, 5)
    # y axis spans [0, 1]: top = 40 px, bottom = 40 + 310 px
    for (_, y), v in zip(pts, smooth):
        assert 40.0 <= y <= 350.0
        assert y == pytest.approx(40 + 310 * (1 - v), abs=0.01)
    xs = [x for x, _ in pts]
    assert xs == sorted(xs)
    assert re.search(r'<text[^>]*>1</text>', text)
