"""Statistical feature vector of an SVG document.

The vector has three parts: element counts and axis lines ("general"),
colour/stroke/font statistics over every drawable element ("style"), and
position/size statistics computed per element kind. Positions are divided by
the viewport width or height, lengths by its diagonal and shape sizes by its
larger side; counts and ``d`` attribute lengths are left as they are.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from svgviz.io import atomic_write
from svgviz.pathdata import EmptyPath, PathMetrics, parse_path, path_metrics
from svgviz.style import NONE, ResolvedStyle, parse_stylesheet, resolve_style
from svgviz.svgdom import (
    DRAWABLE_KINDS,
    RawElement,
    SvgDocument,
    Viewport,
    flatten_elements,
    parse_svg,
)

__all__ = [
    "MANIFEST_VERSION",
    "FeatureEntry",
    "FeatureManifest",
    "FeatureVector",
    "ElementSummary",
    "feature_manifest",
    "summarize_elements",
    "axis_line_counts",
    "extract_features",
    "write_matrix",
    "read_matrix",
    "MatrixFormatError",
]

MANIFEST_VERSION = "1"

# uniqueness and "identical" comparisons use values rounded to this many decimals
ROUND_DECIMALS = 6
AXIS_ALIGN_TOLERANCE = 0.5
AXIS_MIN_FRACTION = 0.5

_POSITIONED_KINDS = ("circle", "rect", "line", "path")


@dataclass(frozen=True)
class FeatureEntry:
    id: str
    group: str  # "general", "style" or "per_element:<kind>"
    description: str


@dataclass(frozen=True)
class FeatureManifest:
    version: str
    entries: tuple[FeatureEntry, ...]

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    @cached_property
    def _positions(self) -> dict[str, int]:
        return {e.id: i for i, e in enumerate(self.entries)}

    def index(self, feature_id: str) -> int:
        try:
            return self._positions[feature_id]
        except KeyError:
            raise KeyError(f"unknown feature id {feature_id!r}") from None

    def lookup(self, feature_id: str) -> FeatureEntry:
        return self.entries[self.index(feature_id)]

    def __len__(self) -> int:
        return len(self.entries)


def _position_entries(kind: str) -> list[FeatureEntry]:
    group = f"per_element:{kind}"
    out = []
    for axis, denom in (("x", "width"), ("y", "height")):
        for stat, text in (
            ("max", "maximum"),
            ("min", "minimum"),
            ("mean", "mean"),
            ("variance", "variance of"),
            ("unique", "distinct values of"),
        ):
            out.append(FeatureEntry(f"{kind}.{axis}.{stat}", group, f"{text} {kind} anchor {axis} / viewport {denom}"))
    out.append(FeatureEntry(f"{kind}.position.shared_mean", group, f"mean number of {kind} elements per distinct anchor"))
    out.append(FeatureEntry(f"{kind}.class.unique", group, f"distinct CSS class names on {kind} elements"))
    return out


def _size_entries(kind: str, name: str, stats: Sequence[str], denom: str) -> list[FeatureEntry]:
    group = f"per_element:{kind}"
    text = {
        "max": "maximum",
        "min": "minimum",
        "mean": "mean",
        "variance": "variance of",
        "max_identical": "largest group of identical",
        "unique": "distinct values of",
    }
    return [FeatureEntry(f"{kind}.{name}.{s}", group, f"{text[s]} {kind} {name}{denom}") for s in stats]


@lru_cache(maxsize=None)
def feature_manifest() -> FeatureManifest:
    entries = [FeatureEntry(f"general.count.{k}", "general", f"number of {k} elements") for k in DRAWABLE_KINDS]
    entries += [
        FeatureEntry("general.axis.horizontal", "general", "long horizontal line elements"),
        FeatureEntry("general.axis.vertical", "general", "long vertical line elements"),
        FeatureEntry("style.fill.unique", "style", "distinct fill colours"),
        FeatureEntry("style.stroke.unique", "style", "distinct stroke colours"),
        FeatureEntry("style.stroke_width.max", "style", "maximum stroke width, px"),
        FeatureEntry("style.stroke_width.min", "style", "minimum stroke width, px"),
        FeatureEntry("style.font_size.max", "style", "maximum font size, px"),
        FeatureEntry("style.font_size.min", "style", "minimum font size, px"),
        FeatureEntry("style.font_size.unique", "style", "distinct font sizes"),
        FeatureEntry("style.font_size.variance", "style", "variance of font size, px^2"),
    ]
    full = ("max", "min", "variance", "max_identical", "unique")
    entries += _position_entries("circle")
    entries += _size_entries("circle", "r", ("max", "min", "variance", "max_identical"), " / max(width, height)")
    entries += _position_entries("rect")
    entries += _size_entries("rect", "width", full, " / max(width, height)")
    entries += _size_entries("rect", "height", full, " / max(width, height)")
    entries += _position_entries("line")
    entries += _size_entries("line", "length", ("max", "min", "variance"), " / diagonal")
    entries += _position_entries("path")
    moments = ("max", "min", "mean", "variance")
    entries += _size_entries("path", "d_length", moments, " in characters")
    entries += _size_entries("path", "endpoint_distance", moments, " / diagonal")
    entries.append(FeatureEntry("path.polygon.count", "per_element:path", "number of closed paths"))
    entries += _size_entries("path", "polygon.d_length", moments, " over closed paths, in characters")
    entries += [
        FeatureEntry("path.arc_calls.total", "per_element:path", "arc commands over all paths"),
        FeatureEntry("path.arc_calls.max", "per_element:path", "most arc commands in one path"),
        FeatureEntry("text.font_size.unique", "per_element:text", "distinct font sizes among text elements"),
        FeatureEntry("text.position.shared_max", "per_element:text", "largest number of text elements sharing an anchor"),
        FeatureEntry("text.class.unique", "per_element:text", "distinct CSS class names on text elements"),
    ]
    return FeatureManifest(MANIFEST_VERSION, tuple(entries))


@dataclass(frozen=True)
class FeatureVector:
    values: tuple[float, ...]
    manifest_version: str = MANIFEST_VERSION

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, feature_id: str) -> float:
        return self.values[feature_manifest().index(feature_id)]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)


@dataclass(frozen=True)
class ElementSummary:
    """Post-transform geometry and resolved style of one drawable element.

    ``sizes`` holds ``r`` for circles, ``width``/``height`` for rects and
    ``length`` for lines, all in px; ``path`` is set for paths only.
    """

    kind: str
    anchor: tuple[float, float]
    sizes: dict[str, float]
    style: ResolvedStyle
    class_names: frozenset[str]
    endpoints: tuple[tuple[float, float], tuple[float, float]] | None = None
    path: PathMetrics | None = None


def _summarize(el: RawElement, style: ResolvedStyle) -> ElementSummary:
    tf = el.transform
    n = el.number
    sx = math.hypot(tf.a, tf.b)
    sy = math.hypot(tf.c, tf.d)
    sizes: dict[str, float] = {}
    endpoints = None
    metrics = None
    if el.kind == "circle":
        anchor = tf.apply(n("cx"), n("cy"))
        sizes["r"] = abs(n("r")) * math.sqrt(sx * sy)
    elif el.kind == "rect":
        anchor = tf.apply(n("x"), n("y"))
        sizes["width"] = abs(n("width")) * sx
        sizes["height"] = abs(n("height")) * sy
    elif el.kind == "line":
        p1 = tf.apply(n("x1"), n("y1"))
        p2 = tf.apply(n("x2"), n("y2"))
        anchor = p1
        endpoints = (p1, p2)
        sizes["length"] = math.hypot(p2[0] - p1[0], p2[1] - p1[1])
    elif el.kind == "path":
        d = el.attributes.get("d", "")
        try:
            raw = path_metrics(parse_path(d))
        except EmptyPath:
            raw = PathMetrics(len(d), (0.0, 0.0), (0.0, 0.0), 0.0, False, 0)
        start = tf.apply(*raw.start)
        end = tf.apply(*raw.end)
        anchor = start
        endpoints = (start, end)
        sizes["endpoint_distance"] = math.hypot(end[0] - start[0], end[1] - start[1])
        metrics = raw
    else:
        anchor = tf.apply(n("x"), n("y"))
    return ElementSummary(el.kind, anchor, sizes, style, el.class_names, endpoints, metrics)


def summarize_elements(doc: SvgDocument) -> list[ElementSummary]:
    rules = parse_stylesheet(doc.stylesheet_text)
    cache: dict = {}
    return [_summarize(el, resolve_style(el, rules, cache)) for el in flatten_elements(doc)]


def axis_line_counts(els: Iterable[ElementSummary], vp: Viewport) -> tuple[int, int]:
    horizontal = vertical = 0
    for el in els:
        if el.kind != "line":
            continue
        (x1, y1), (x2, y2) = el.endpoints
        length = el.sizes["length"]
        if abs(y1 - y2) <= AXIS_ALIGN_TOLERANCE and length >= AXIS_MIN_FRACTION * vp.width:
            horizontal += 1
        elif abs(x1 - x2) <= AXIS_ALIGN_TOLERANCE and length >= AXIS_MIN_FRACTION * vp.height:
            vertical += 1
    return horizontal, vertical


def _rounded(values) -> list[float]:
    return [round(v, ROUND_DECIMALS) for v in values]


def _moments(values: Sequence[float]) -> dict[str, float]:
    if not values:
        return {"max": 0.0, "min": 0.0, "mean": 0.0, "variance": 0.0}
    lo, hi = min(values), max(values)
    if lo == hi:
        return {"max": hi, "min": lo, "mean": lo, "variance": 0.0}
    # fsum is exactly rounded, so the result does not depend on element order
    n = len(values)
    mean = math.fsum(values) / n
    return {
        "max": hi,
        "min": lo,
        "mean": mean,
        "variance": math.fsum((v - mean) ** 2 for v in values) / n,
    }


def _size_stats(values: Sequence[float]) -> dict[str, float]:
    out = _moments(values)
    counts = Counter(_rounded(values))
    out["unique"] = float(len(counts))
    out["max_identical"] = float(max(counts.values(), default=0))
    return out


def _put(features: dict[str, float], prefix: str, stats: dict[str, float]) -> None:
    for key, value in stats.items():
        features[f"{prefix}.{key}"] = value


def _positions(features, kind, group, vp):
    xs = [e.anchor[0] / vp.width for e in group]
    ys = [e.anchor[1] / vp.height for e in group]
    _put(features, f"{kind}.x", _size_stats(xs))
    _put(features, f"{kind}.y", _size_stats(ys))
    anchors = Counter(zip(_rounded(xs), _rounded(ys)))
    features[f"{kind}.position.shared_mean"] = len(group) / len(anchors) if anchors else 0.0
    features[f"{kind}.class.unique"] = float(len(set().union(*(e.class_names for e in group))))


def _compute(summaries: list[ElementSummary], vp: Viewport) -> dict[str, float]:
    by_kind = {k: [s for s in summaries if s.kind == k] for k in DRAWABLE_KINDS}
    features: dict[str, float] = {}
    for kind in DRAWABLE_KINDS:
        features[f"general.count.{kind}"] = float(len(by_kind[kind]))
    horizontal, vertical = axis_line_counts(summaries, vp)
    features["general.axis.horizontal"] = float(horizontal)
    features["general.axis.vertical"] = float(vertical)

    styles = [s.style for s in summaries]
    features["style.fill.unique"] = float(len({st.fill for st in styles if st.fill != NONE}))
    features["style.stroke.unique"] = float(len({st.stroke for st in styles if st.stroke != NONE}))
    widths = _moments([st.stroke_width for st in styles])
    features["style.stroke_width.max"] = widths["max"]
    features["style.stroke_width.min"] = widths["min"]
    font_sizes = [st.font_size for st in styles]
    fonts = _size_stats(font_sizes)
    for key in ("max", "min", "unique", "variance"):
        features[f"style.font_size.{key}"] = fonts[key]

    longest = max(vp.width, vp.height)
    for kind in _POSITIONED_KINDS:
        _positions(features, kind, by_kind[kind], vp)

    _put(features, "circle.r", _size_stats([c.sizes["r"] / longest for c in by_kind["circle"]]))
    rects = by_kind["rect"]
    _put(features, "rect.width", _size_stats([r.sizes["width"] / longest for r in rects]))
    _put(features, "rect.height", _size_stats([r.sizes["height"] / longest for r in rects]))
    _put(features, "line.length", _moments([ln.sizes["length"] / vp.diagonal for ln in by_kind["line"]]))

    paths = by_kind["path"]
    _put(features, "path.d_length", _moments([float(p.path.d_length) for p in paths]))
    _put(
        features,
        "path.endpoint_distance",
        _moments([p.sizes["endpoint_distance"] / vp.diagonal for p in paths]),
    )
    polygons = [p for p in paths if p.path.is_polygon]
    features["path.polygon.count"] = float(len(polygons))
    _put(features, "path.polygon.d_length", _moments([float(p.path.d_length) for p in polygons]))
    arcs = [p.path.arc_calls for p in paths]
    features["path.arc_calls.total"] = float(sum(arcs))
    features["path.arc_calls.max"] = float(max(arcs, default=0))

    texts = by_kind["text"]
    features["text.font_size.unique"] = float(len(set(_rounded(t.style.font_size for t in texts))))
    text_anchors = Counter(
        (round(t.anchor[0] / vp.width, ROUND_DECIMALS), round(t.anchor[1] / vp.height, ROUND_DECIMALS))
        for t in texts
    )
    features["text.position.shared_max"] = float(max(text_anchors.values(), default=0))
    features["text.class.unique"] = float(len(set().union(*(t.class_names for t in texts))))
    return features


def extract_features(doc: SvgDocument | str | bytes) -> FeatureVector:
    """Feature vector of one document, in manifest order.

    Statistics over an empty set are 0. Variances are population variances.
    """
    if not isinstance(doc, SvgDocument):
        doc = parse_svg(doc)
    features = _compute(summarize_elements(doc), doc.viewport)
    values = []
    for feature_id in feature_manifest().ids:
        v = features[feature_id]
        values.append(v if math.isfinite(v) else 0.0)
    return FeatureVector(tuple(values))


class MatrixFormatError(ValueError):
    pass


def format_value(v: float) -> str:
    return format(v, ".9g")


def write_matrix(rows: Iterable[tuple[str, str, FeatureVector]], path: str | Path | None = None) -> str:
    """Serialize ``(id, label, vector)`` rows as a feature matrix.

    The text starts with a ``# manifest_version:`` line, then a CSV header of
    ``id``, ``label`` and the manifest ids. Returned as a string and also
    written to ``path`` when given.
    """
    manifest = feature_manifest()
    buf = io.StringIO()
    buf.write(f"# manifest_version: {manifest.version}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "label", *manifest.ids])
    for doc_id, label, vector in rows:
        if len(vector) != len(manifest):
            raise MatrixFormatError(f"vector for {doc_id} has {len(vector)} values, expected {len(manifest)}")
        writer.writerow([doc_id, label or "", *(format_value(v) for v in vector.values)])
    text = buf.getvalue()
    if path is not None:
        atomic_write(path, text)
    return text


def read_matrix(path: str | Path) -> tuple[list[str], list[str], np.ndarray, str]:
    """Load a feature matrix file; returns ``(ids, labels, X, manifest_version)``."""
    text = Path(path).read_text(encoding="utf-8")
    first, _, rest = text.partition("\n")
    if not first.startswith("# manifest_version:"):
        raise MatrixFormatError(f"{path}: missing '# manifest_version:' line")
    version = first.split(":", 1)[1].strip()
    reader = csv.reader(io.StringIO(rest))
    try:
        header = next(reader)
    except StopIteration:
        raise MatrixFormatError(f"{path}: missing header row") from None
    if header[:2] != ["id", "label"]:
        raise MatrixFormatError(f"{path}: header must start with id,label")
    width = len(header) - 2
    ids, labels, rows = [], [], []
    for lineno, row in enumerate(reader, start=3):
        if not row:
            continue
        if len(row) != width + 2:
            raise MatrixFormatError(f"{path}:{lineno}: expected {width + 2} columns, got {len(row)}")
        ids.append(row[0])
        labels.append(row[1])
        try:
            rows.append([float(v) for v in row[2:]])
        except ValueError as exc:
            raise MatrixFormatError(f"{path}:{lineno}: {exc}") from None
    X = np.asarray(rows, dtype=float).reshape(len(rows), width)
    return ids, labels, X, version
