"""Seeded generator of synthetic SVG charts with known type.

Used to build labeled corpora for training and evaluation. The charts aim to
be structurally idiomatic (how a charting library lays out marks), not
visually polished. ``generate_nonchart`` produces icon-like drawings for
visualization/non-visualization tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from svgviz.io import atomic_write

__all__ = [
    "CHART_TYPES",
    "BadSpec",
    "ChartSpec",
    "generate_chart",
    "generate_nonchart",
    "generate_corpus",
    "write_corpus",
]

CHART_TYPES = ("bar", "line", "scatter", "pie", "donut", "bubble", "heatmap", "area")

# n_points drawn for corpus samples, per type
_POINT_RANGES = {
    "bar": (3, 20),
    "line": (5, 60),
    "scatter": (5, 80),
    "pie": (2, 8),
    "donut": (2, 8),
    "bubble": (3, 30),
    "heatmap": (9, 100),
    "area": (5, 60),
}

_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)  # fmt: skip


class BadSpec(ValueError):
    pass


@dataclass(frozen=True)
class ChartSpec:
    chart_type: str
    seed: int = 0
    n_points: int = 10
    width: int = 400
    height: int = 300
    palette_size: int = 1
    margin_range: tuple[int, int] = (20, 50)

    def validate(self) -> None:
        if self.chart_type not in CHART_TYPES:
            raise BadSpec(f"unknown chart type {self.chart_type!r}")
        if self.n_points < 1:
            raise BadSpec("n_points must be at least 1")
        lo, hi = self.margin_range
        if self.width <= 0 or self.height <= 0 or lo < 0 or hi < lo:
            raise BadSpec("bad dimensions or margin range")
        if 2 * hi >= min(self.width, self.height):
            raise BadSpec("margins leave no plot area")
        if self.palette_size < 1:
            raise BadSpec("palette_size must be at least 1")


def _f(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


class _Canvas:
    def __init__(self, spec: ChartSpec, rng: np.random.Generator):
        self.spec = spec
        self.rng = rng
        lo, hi = spec.margin_range
        left, right, top, bottom = (int(m) for m in rng.integers(lo, hi + 1, size=4))
        self.x0, self.x1 = float(left), float(spec.width - right)
        self.y0, self.y1 = float(top), float(spec.height - bottom)
        self.parts: list[str] = []

    @property
    def plot_width(self) -> float:
        return self.x1 - self.x0

    @property
    def plot_height(self) -> float:
        return self.y1 - self.y0

    def palette(self, n: int) -> list[str]:
        start = int(self.rng.integers(len(_PALETTE)))
        return [_PALETTE[(start + i) % len(_PALETTE)] for i in range(n)]

    def axes(self) -> None:
        # structure depends on the ChartSpec alone; the seed only moves things
        tick_count = min(6, self.spec.height // 60)
        self.parts.append('<g class="axis">')
        self.parts.append(
            f'<line x1="{_f(self.x0)}" y1="{_f(self.y1)}" x2="{_f(self.x1)}" y2="{_f(self.y1)}" stroke="#333"/>'
        )
        self.parts.append(
            f'<line x1="{_f(self.x0)}" y1="{_f(self.y0)}" x2="{_f(self.x0)}" y2="{_f(self.y1)}" stroke="#333"/>'
        )
        for i in range(tick_count):
            y = self.y1 - self.plot_height * (i + 1) / (tick_count + 1)
            self.parts.append(
                f'<line x1="{_f(self.x0 - 5)}" y1="{_f(y)}" x2="{_f(self.x0)}" y2="{_f(y)}" stroke="#333"/>'
            )
        self.parts.append("</g>")

    def svg(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.spec.width}" height="{self.spec.height}">\n'
            f"{body}\n</svg>\n"
        )


def _bar(c: _Canvas, n: int) -> None:
    c.axes()
    band = c.plot_width / n
    width = band * float(c.rng.uniform(0.6, 0.9))
    heights = c.rng.uniform(0.05, 1.0, size=n) * c.plot_height
    colors = c.palette(c.spec.palette_size)
    c.parts.append('<g class="bars">')
    for i, h in enumerate(heights):
        x = c.x0 + i * band + (band - width) / 2
        c.parts.append(
            f'<rect class="bar" x="{_f(x)}" y="{_f(c.y1 - h)}" width="{_f(width)}" '
            f'height="{_f(h)}" fill="{colors[i % len(colors)]}"/>'
        )
    c.parts.append("</g>")


def _series(c: _Canvas, n: int) -> list[tuple[float, float]]:
    xs = np.linspace(c.x0, c.x1, max(n, 2))
    walk = np.cumsum(c.rng.normal(0, 1, size=len(xs)))
    span = walk.max() - walk.min() or 1.0
    ys = c.y1 - (walk - walk.min()) / span * c.plot_height * 0.9
    return list(zip(xs.tolist(), ys.tolist()))


def _line(c: _Canvas, n: int) -> None:
    c.axes()
    pts = _series(c, n)
    d = "M" + "L".join(f"{_f(x)},{_f(y)}" for x, y in pts)
    stroke = c.palette(1)[0]
    width = _f(float(c.rng.uniform(1.0, 3.0)))
    c.parts.append(f'<path class="line" d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')


def _area(c: _Canvas, n: int) -> None:
    c.axes()
    pts = _series(c, n)
    d = f"M{_f(pts[0][0])},{_f(c.y1)}" + "".join(f"L{_f(x)},{_f(y)}" for x, y in pts)
    d += f"L{_f(pts[-1][0])},{_f(c.y1)}Z"
    fill = c.palette(1)[0]
    c.parts.append(f'<path class="area" d="{d}" fill="{fill}" fill-opacity="0.6"/>')


def _scatter(c: _Canvas, n: int) -> None:
    c.axes()
    r = float(c.rng.uniform(2.5, 6.0))
    colors = c.palette(c.spec.palette_size)
    xs = c.rng.uniform(c.x0 + r, c.x1 - r, size=n)
    ys = c.rng.uniform(c.y0 + r, c.y1 - r, size=n)
    for i, (x, y) in enumerate(zip(xs, ys)):
        c.parts.append(f'<circle class="dot" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{colors[i % len(colors)]}"/>')


def _bubble(c: _Canvas, n: int) -> None:
    colors = c.palette(max(c.spec.palette_size, 3))
    limit = min(c.spec.width, c.spec.height) / 8
    radii = np.sort(c.rng.uniform(3.0, limit, size=n))[::-1]
    if n > 1 and radii[0] == radii[-1]:
        radii[-1] = radii[0] / 2
    for i, r in enumerate(radii):
        x = float(c.rng.uniform(r, c.spec.width - r))
        y = float(c.rng.uniform(r, c.spec.height - r))
        c.parts.append(
            f'<circle class="bubble" cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" '
            f'fill="{colors[i % len(colors)]}" fill-opacity="0.7" stroke="#fff"/>'
        )


def _angles(c: _Canvas, n: int) -> list[float]:
    shares = c.rng.uniform(0.3, 1.0, size=n)
    edges = np.concatenate([[0.0], np.cumsum(shares) / shares.sum()]) * 2 * math.pi
    return edges.tolist()


def _polar(cx: float, cy: float, r: float, angle: float) -> tuple[float, float]:
    return cx + r * math.sin(angle), cy - r * math.cos(angle)


def _wedges(c: _Canvas, n: int, inner_fraction: float) -> None:
    cx, cy = c.spec.width / 2, c.spec.height / 2
    outer = min(c.plot_width, c.plot_height) / 2
    inner = outer * inner_fraction
    edges = _angles(c, n)
    colors = c.palette(n)
    c.parts.append(f'<g class="slices" transform="translate({_f(cx)},{_f(cy)})">')
    for i in range(n):
        a0, a1 = edges[i], edges[i + 1]
        if n == 1:
            # a full turn is drawn as two half arcs
            a1 = a0 + math.pi
        large = 1 if a1 - a0 > math.pi else 0
        ox0, oy0 = _polar(0, 0, outer, a0)
        ox1, oy1 = _polar(0, 0, outer, a1)
        outer_arc = f"A{_f(outer)},{_f(outer)} 0 {large} 1 {_f(ox1)},{_f(oy1)}"
        if n == 1:
            outer_arc += f"A{_f(outer)},{_f(outer)} 0 {large} 1 {_f(ox0)},{_f(oy0)}"
        if inner > 0:
            ix0, iy0 = _polar(0, 0, inner, a0)
            ix1, iy1 = _polar(0, 0, inner, a1)
            if n == 1:
                d = (
                    f"M{_f(ox0)},{_f(oy0)}{outer_arc}Z"
                    f"M{_f(ix0)},{_f(iy0)}A{_f(inner)},{_f(inner)} 0 0 0 {_f(ix1)},{_f(iy1)}"
                    f"A{_f(inner)},{_f(inner)} 0 0 0 {_f(ix0)},{_f(iy0)}Z"
                )
            else:
                d = (
                    f"M{_f(ox0)},{_f(oy0)}{outer_arc}L{_f(ix1)},{_f(iy1)}"
                    f"A{_f(inner)},{_f(inner)} 0 {large} 0 {_f(ix0)},{_f(iy0)}Z"
                )
        else:
            d = f"M0,0L{_f(ox0)},{_f(oy0)}{outer_arc}Z"
        c.parts.append(f'<path class="slice" d="{d}" fill="{colors[i]}" stroke="#fff"/>')
    c.parts.append("</g>")


def _heatmap(c: _Canvas, n: int) -> None:
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    cw, ch = c.plot_width / cols, c.plot_height / rows
    values = c.rng.uniform(0, 1, size=n)
    for i, v in enumerate(values):
        r, k = divmod(i, cols)
        shade = int(round(255 * (1 - v)))
        fill = f"rgb(255,{shade},{shade // 2})"
        c.parts.append(
            f'<rect class="cell" x="{_f(c.x0 + k * cw)}" y="{_f(c.y0 + r * ch)}" '
            f'width="{_f(cw)}" height="{_f(ch)}" fill="{fill}"/>'
        )


_DRAW = {
    "bar": _bar,
    "line": _line,
    "scatter": _scatter,
    "pie": lambda c, n: _wedges(c, n, 0.0),
    "donut": lambda c, n: _wedges(c, n, float(c.rng.uniform(0.4, 0.7))),
    "bubble": _bubble,
    "heatmap": _heatmap,
    "area": _area,
}


def generate_chart(spec: ChartSpec) -> str:
    """SVG text for ``spec``; identical specs give identical bytes."""
    spec.validate()
    rng = np.random.default_rng([spec.seed, CHART_TYPES.index(spec.chart_type)])
    canvas = _Canvas(spec, rng)
    _DRAW[spec.chart_type](canvas, spec.n_points)
    return canvas.svg()


def generate_nonchart(seed: int) -> str:
    """Icon-like SVG: a few irregular shapes on a small square canvas, no axes.

    Draws 1-4 closed blobs made of cubic curves with jittered radii; about
    half the icons also get a small circle or rounded rect, and some get an
    open stroke-only squiggle.
    """
    rng = np.random.default_rng([seed, 9001])
    size = int(rng.choice([16, 24, 32, 48, 64, 128]))
    colors = list(rng.choice(_PALETTE + ("#000", "#444"), size=4))
    parts = []
    for i in range(int(rng.integers(1, 5))):
        cx, cy = rng.uniform(0.25, 0.75, size=2) * size
        k = int(rng.integers(3, 8))
        radius = rng.uniform(0.1, 0.4) * size
        angles = np.sort(rng.uniform(0, 2 * math.pi, size=k))
        pts = [_polar(cx, cy, radius * rng.uniform(0.5, 1.2), a) for a in angles]
        d = f"M{_f(pts[0][0])} {_f(pts[0][1])}"
        for j in range(1, k + 1):
            x, y = pts[j % k]
            c1 = (x + rng.uniform(-0.15, 0.15) * size, y + rng.uniform(-0.15, 0.15) * size)
            d += f"C{_f(c1[0])} {_f(c1[1])} {_f(c1[0])} {_f(c1[1])} {_f(x)} {_f(y)}"
        parts.append(f'<path d="{d}Z" fill="{colors[i % 4]}"/>')
    extra = rng.uniform()
    if extra < 0.25:
        parts.append(
            f'<circle cx="{_f(rng.uniform(0.2, 0.8) * size)}" cy="{_f(rng.uniform(0.2, 0.8) * size)}" '
            f'r="{_f(rng.uniform(0.05, 0.2) * size)}" fill="{colors[3]}"/>'
        )
    elif extra < 0.5:
        w, h = rng.uniform(0.2, 0.6, size=2) * size
        parts.append(
            f'<rect x="{_f(rng.uniform(0, 0.3) * size)}" y="{_f(rng.uniform(0, 0.3) * size)}" '
            f'width="{_f(w)}" height="{_f(h)}" rx="2" fill="{colors[2]}"/>'
        )
    if rng.uniform() < 0.3:
        x, y = rng.uniform(0, size, size=2)
        dx, dy = rng.uniform(-size / 2, size / 2, size=2)
        parts.append(
            f'<path d="M{_f(x)} {_f(y)}q{_f(dx)} {_f(dy)} {_f(2 * dx)} 0" fill="none" stroke="#000" stroke-width="2"/>'
        )
    body = "\n".join(parts)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">\n{body}\n</svg>\n'
    )


def _spec_for(chart_type: str, seed: int, index: int) -> ChartSpec:
    rng = np.random.default_rng([seed, CHART_TYPES.index(chart_type), index])
    lo, hi = _POINT_RANGES[chart_type]
    return ChartSpec(
        chart_type=chart_type,
        seed=int(rng.integers(2**31)),
        n_points=int(rng.integers(lo, hi + 1)),
        width=int(rng.integers(300, 801)),
        height=int(rng.integers(200, 501)),
        palette_size=int(rng.integers(1, 4)),
    )


def generate_corpus(
    types: tuple[str, ...] = CHART_TYPES,
    per_type: int = 100,
    seed: int = 0,
    nonchart_label: str | None = None,
    nonchart_count: int = 0,
) -> Iterator[tuple[str, str, str]]:
    """Yield ``(filename, label, svg_text)`` for a labeled synthetic corpus.

    Sizes, point counts and palettes vary per sample. When ``nonchart_count``
    is positive, that many icon-like drawings are added under
    ``nonchart_label``.
    """
    for chart_type in types:
        if chart_type not in CHART_TYPES:
            raise BadSpec(f"unknown chart type {chart_type!r}")
        for i in range(per_type):
            yield f"{chart_type}-{i:04d}.svg", chart_type, generate_chart(_spec_for(chart_type, seed, i))
    for i in range(nonchart_count):
        yield f"nonchart-{i:04d}.svg", nonchart_label or "non-vis", generate_nonchart(seed * 100_003 + i)


def write_corpus(out_dir: str | Path, samples) -> Path:
    """Write samples as SVG files plus a ``labels.tsv`` ready for ingestion."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for name, label, text in samples:
        atomic_write(out / name, text)
        lines.append(f"{name}\t{label}\n")
    atomic_write(out / "labels.tsv", "".join(lines))
    return out / "labels.tsv"
