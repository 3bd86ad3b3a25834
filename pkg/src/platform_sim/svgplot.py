"""Dependency-free SVG line charts.

Output is a pure function of the input: fixed geometry, fixed number
formatting, series drawn in the order given.
"""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Optional, Sequence, Tuple, Union

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]

WIDTH, HEIGHT = 800, 480
LEFT, RIGHT, TOP, BOTTOM = 80, 160, 50, 60

Points = Sequence[Tuple[float, float]]
SeriesLike = Union[Points, Sequence[float]]


def _escape(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _points(data: SeriesLike) -> list:
    pts = []
    for i, v in enumerate(data):
        if isinstance(v, (tuple, list)):
            pts.append((float(v[0]), float(v[1])))
        else:
            pts.append((float(i), float(v)))
    return pts


def padded_range(values: Sequence[float], pad: float = 0.05) -> Tuple[float, float]:
    """[min, max] of ``values`` widened by ``pad`` of the span on each side."""
    lo, hi = min(values), max(values)
    span = hi - lo
    if span == 0:
        span = abs(hi) or 1.0
    return lo - pad * span, hi + pad * span


def _fmt(v: float) -> str:
    if v == 0:
        return "0"
    mag = abs(v)
    if mag >= 1e5 or mag < 1e-3:
        return f"{v:.2e}"
    if mag >= 100:
        return f"{v:.0f}"
    return f"{v:.3g}"


def _ticks(lo: float, hi: float, n: int = 5) -> list:
    return [lo + (hi - lo) * i / n for i in range(n + 1)]


def render_svg(series: Mapping[str, SeriesLike], title: str = "", x_label: str = "tick",
               y_label: str = "", marker_x: Optional[float] = None,
               marker_label: str = "AI introduced",
               secondary: Optional[Mapping[str, SeriesLike]] = None,
               secondary_label: str = "") -> str:
    """Render one or more named series as a standalone SVG document.

    ``secondary`` series are scaled against their own right-hand axis.
    """
    if not series or not any(len(v) for v in series.values()):
        raise ValueError("nothing to plot: series is empty")
    primary = {k: _points(v) for k, v in series.items()}
    second = {k: _points(v) for k, v in (secondary or {}).items()}

    xs = [x for pts in list(primary.values()) + list(second.values()) for x, _ in pts]
    x_lo, x_hi = padded_range(xs)
    y_lo, y_hi = padded_range([y for pts in primary.values() for _, y in pts])
    if second:
        y2_lo, y2_hi = padded_range([y for pts in second.values() for _, y in pts])

    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x_lo) / (x_hi - x_lo) * pw

    def py(y, lo=y_lo, hi=y_hi):
        return TOP + ph - (y - lo) / (hi - lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.1f}" y="28" text-anchor="middle" font-size="16">{_escape(title)}</text>',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="#333333"/>',
    ]
    for v in _ticks(x_lo, x_hi):
        x = px(v)
        out.append(f'<line x1="{x:.2f}" y1="{TOP + ph}" x2="{x:.2f}" y2="{TOP + ph + 5}" stroke="#333333"/>')
        out.append(f'<text x="{x:.2f}" y="{TOP + ph + 20}" text-anchor="middle" font-size="11">{_fmt(v)}</text>')
    for v in _ticks(y_lo, y_hi):
        y = py(v)
        out.append(f'<line x1="{LEFT}" y1="{y:.2f}" x2="{LEFT + pw}" y2="{y:.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{_fmt(v)}</text>')
    if second:
        for v in _ticks(y2_lo, y2_hi):
            y = py(v, y2_lo, y2_hi)
            out.append(f'<text x="{LEFT + pw + 8}" y="{y + 4:.2f}" text-anchor="start" font-size="11">{_fmt(v)}</text>')
        out.append(f'<text x="{LEFT + pw + 55}" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-size="12" '
                   f'transform="rotate(90 {LEFT + pw + 55} {TOP + ph / 2:.1f})">{_escape(secondary_label)}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="12">{_escape(x_label)}</text>')
    out.append(f'<text x="20" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 20 {TOP + ph / 2:.1f})">{_escape(y_label)}</text>')

    if marker_x is not None and x_lo <= marker_x <= x_hi:
        x = px(marker_x)
        out.append(f'<line x1="{x:.2f}" y1="{TOP}" x2="{x:.2f}" y2="{TOP + ph}" stroke="#777777" stroke-dasharray="6,4"/>')
        out.append(f'<text x="{x + 4:.2f}" y="{TOP + 14}" font-size="11" fill="#555555">{_escape(marker_label)}</text>')

    legend_y = TOP + 10
    entries = [(k, pts, False) for k, pts in primary.items()] + [(k, pts, True) for k, pts in second.items()]
    for i, (name, pts, right_axis) in enumerate(entries):
        color = COLORS[i % len(COLORS)]
        if right_axis:
            coords = " ".join(f"{px(x):.2f},{py(y, y2_lo, y2_hi):.2f}" for x, y in pts)
        else:
            coords = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = legend_y + 18 * i
        lx = LEFT + pw + (75 if second else 15)
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 25}" y="{ly + 4}" font-size="11">{_escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_plot(series: Mapping[str, SeriesLike], path, **kwargs) -> Path:
    path = Path(path)
    text = render_svg(series, **kwargs)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write plot to {path}: {exc}") from exc
    return path

