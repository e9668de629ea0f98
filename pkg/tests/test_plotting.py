"""Deterministic SVG rendering."""

import pytest

from mirrorbench.plotting import Series, render_chart, write_chart
from mirrorbench.plotting import _nice_ticks


def _sample_series():
    return [
        Series(xs=[1, 2, 3, 4], ys=[0.9, 0.7, 0.55, 0.45],
               yerr=[0.02, 0.02, 0.03, 0.03], label="measured", style="points"),
        Series(xs=[1, 2, 3, 4], ys=[0.88, 0.71, 0.56, 0.44], label="fit",
               style="line"),
    ]


def test_render_is_deterministic():
    a = render_chart(_sample_series(), title="decay", xlabel="L", ylabel="p")
    b = render_chart(_sample_series(), title="decay", xlabel="L", ylabel="p")
    assert a == b
    assert a.startswith("<svg ")
    assert a.rstrip().endswith("</svg>")


def test_render_contains_expected_elements():
    svg = render_chart(_sample_series(), title="decay curve", xlabel="length",
                       ylabel="survival")
    assert "decay curve" in svg
    assert "length" in svg and "survival" in svg
    assert svg.count("<circle") == 4
    assert "<polyline" in svg
    # error bars: one stem and two caps per point with nonzero error
    assert svg.count("stroke-width=\"1\"") >= 12
    assert "measured" in svg and "fit" in svg


def test_render_escapes_markup_in_labels():
    svg = render_chart([Series(xs=[0, 1], ys=[0, 1], label="a<b>&c")])
    assert "a&lt;b&gt;&amp;c" in svg
    assert "a<b>" not in svg


def test_render_has_no_timestamps():
    svg = render_chart(_sample_series())
    for token in ("date", "time", "Date", "Time", "20"):
        # no datetime-looking strings; years would start with 20
        assert "2025" not in svg and "2026" not in svg
    assert "<!--" not in svg


def test_points_plus_line_style():
    svg = render_chart([Series(xs=[0, 1, 2], ys=[1, 2, 3], style="points+line")])
    assert svg.count("<circle") == 3
    assert "<polyline" in svg


def test_write_chart(tmp_path):
    path = tmp_path / "chart.svg"
    write_chart(path, _sample_series(), title="t")
    text = path.read_text()
    assert text == render_chart(_sample_series(), title="t")


def test_series_validation():
    with pytest.raises(ValueError):
        Series(xs=[1, 2], ys=[1])
    with pytest.raises(ValueError):
        Series(xs=[1], ys=[1], yerr=[0.1, 0.2])
    with pytest.raises(ValueError):
        Series(xs=[1], ys=[1], style="dots")
    with pytest.raises(ValueError):
        render_chart([])


def test_nice_ticks():
    assert _nice_ticks(0.0, 10.0) == [0.0, 2.0, 4.0, 6.0, 8.0, 10.0]
    ticks = _nice_ticks(0.0, 1.0)
    assert ticks[0] == 0.0 and abs(ticks[1] - 0.2) < 1e-12
    ticks = _nice_ticks(-0.05, 0.05)
    assert any(t == 0.0 for t in ticks)


def test_single_point_series_renders():
    svg = render_chart([Series(xs=[5], ys=[2.0], yerr=[0.5])])
    assert "<circle" in svg
