"""SVG element tree, viewport resolution and flattening of drawable elements."""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from svgviz.pathdata import EmptyPath, parse_path, pen_positions

__all__ = [
    "DRAWABLE_KINDS",
    "MalformedXml",
    "NotSvg",
    "ElementNode",
    "Viewport",
    "AffineTransform",
    "IDENTITY",
    "Ancestor",
    "RawElement",
    "ElementList",
    "SvgDocument",
    "parse_svg",
    "parse_transform",
    "viewport_of",
    "flatten_elements",
]

DRAWABLE_KINDS = ("circle", "rect", "line", "path", "text")

_KIND_OF_TAG = {
    "svg": "svg",
    "g": "group",
    "circle": "circle",
    "rect": "rect",
    "line": "line",
    "path": "path",
    "text": "text",
}

_PX_LENGTH = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(px)?\s*$", re.I)
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_TRANSFORM_ITEM = re.compile(r"\s*([A-Za-z]+)\s*\(([^)]*)\)\s*,?")


class MalformedXml(ValueError):
    pass


class NotSvg(ValueError):
    pass


def _local(name: str) -> str:
    return name.rsplit("}", 1)[-1] if name.startswith("{") else name


@dataclass
class ElementNode:
    kind: str
    tag: str
    attributes: dict[str, str] = field(default_factory=dict)
    children: list[ElementNode] = field(default_factory=list)
    text_content: str = ""

    def iter(self):
        yield self
        for child in self.children:
            yield from child.iter()


@dataclass(frozen=True)
class Viewport:
    width: float
    height: float

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)


@dataclass(frozen=True)
class AffineTransform:
    """2x3 affine matrix ``[[a, c, e], [b, d, f]]``."""

    a: float = 1.0
    b: float = 0.0
    c: float = 0.0
    d: float = 1.0
    e: float = 0.0
    f: float = 0.0

    def __matmul__(self, other: AffineTransform) -> AffineTransform:
        return AffineTransform(
            self.a * other.a + self.c * other.b,
            self.b * other.a + self.d * other.b,
            self.a * other.c + self.c * other.d,
            self.b * other.c + self.d * other.d,
            self.a * other.e + self.c * other.f + self.e,
            self.b * other.e + self.d * other.f + self.f,
        )

    def apply(self, x: float, y: float) -> tuple[float, float]:
        return (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)

    @classmethod
    def translate(cls, tx: float, ty: float = 0.0) -> AffineTransform:
        return cls(e=tx, f=ty)

    @classmethod
    def scale(cls, sx: float, sy: float | None = None) -> AffineTransform:
        return cls(a=sx, d=sx if sy is None else sy)

    @classmethod
    def rotate(cls, degrees: float, cx: float = 0.0, cy: float = 0.0) -> AffineTransform:
        t = math.radians(degrees)
        rot = cls(math.cos(t), math.sin(t), -math.sin(t), math.cos(t))
        if cx or cy:
            return cls.translate(cx, cy) @ rot @ cls.translate(-cx, -cy)
        return rot


IDENTITY = AffineTransform()


def parse_transform(text: str) -> AffineTransform:
    """Parse a ``transform`` attribute. Raises ValueError if malformed."""
    result = IDENTITY
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TRANSFORM_ITEM.match(text, pos)
        if m is None:
            raise ValueError(f"bad transform: {text!r}")
        pos = m.end()
        name = m.group(1)
        args = [float(v) for v in _NUMBER.findall(m.group(2))]
        n = len(args)
        if name == "translate" and n in (1, 2):
            step = AffineTransform.translate(*args)
        elif name == "scale" and n in (1, 2):
            step = AffineTransform.scale(*args)
        elif name == "matrix" and n == 6:
            step = AffineTransform(*args)
        elif name == "rotate" and n in (1, 3):
            step = AffineTransform.rotate(*args)
        elif name == "skewX" and n == 1:
            step = AffineTransform(c=math.tan(math.radians(args[0])))
        elif name == "skewY" and n == 1:
            step = AffineTransform(b=math.tan(math.radians(args[0])))
        else:
            raise ValueError(f"bad transform: {text!r}")
        result = result @ step
    return result


@dataclass(frozen=True)
class Ancestor:
    tag: str
    attributes: dict[str, str]


@dataclass(frozen=True)
class RawElement:
    kind: str
    attributes: dict[str, str]
    transform: AffineTransform
    ancestors: tuple[Ancestor, ...]
    class_names: frozenset[str]
    text_content: str = ""

    @property
    def ancestor_styles(self) -> list[dict[str, str]]:
        return [a.attributes for a in self.ancestors]

    def number(self, name: str, default: float = 0.0) -> float:
        """Leading numeric value of a geometry attribute, ``default`` if absent."""
        m = _NUMBER.match(self.attributes.get(name, "").strip())
        return float(m.group()) if m else default


class ElementList(list):
    """A list of flattened elements that also carries a warning tally."""

    warnings: int = 0


@dataclass
class SvgDocument:
    root: ElementNode
    stylesheet_text: str = ""
    viewport: Viewport = field(init=False)

    def __post_init__(self):
        self.viewport = viewport_of(self)


def _convert(el: ET.Element, is_root: bool, styles: list[str]) -> ElementNode:
    tag = _local(el.tag)
    kind = _KIND_OF_TAG.get(tag, "other")
    if kind == "svg" and not is_root:
        kind = "group"
    attributes = {_local(k): v for k, v in el.attrib.items()}
    if tag == "style":
        styles.append("".join(el.itertext()))
    if kind == "text":
        text = "".join(el.itertext())
    else:
        text = el.text or ""
    children = [_convert(child, False, styles) for child in el]
    return ElementNode(kind, tag, attributes, children, text)


def parse_svg(text: str | bytes) -> SvgDocument:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc
    if _local(root.tag) != "svg":
        raise NotSvg(f"root element is <{_local(root.tag)}>, not <svg>")
    styles: list[str] = []
    tree = _convert(root, True, styles)
    return SvgDocument(tree, "\n".join(styles))


def _px(value: str | None) -> float | None:
    if value is None:
        return None
    m = _PX_LENGTH.match(value)
    if m is None:
        return None
    v = float(m.group(1))
    return v if v > 0 and math.isfinite(v) else None


def _viewbox_size(value: str | None) -> tuple[float, float] | None:
    if not value:
        return None
    parts = _NUMBER.findall(value)
    if len(parts) != 4:
        return None
    w, h = float(parts[2]), float(parts[3])
    if w > 0 and h > 0:
        return w, h
    return None


def _element_points(el: RawElement) -> list[tuple[float, float]]:
    n = el.number
    if el.kind == "circle":
        cx, cy, r = n("cx"), n("cy"), abs(n("r"))
        pts = [(cx - r, cy - r), (cx + r, cy + r)]
    elif el.kind == "rect":
        x, y = n("x"), n("y")
        pts = [(x, y), (x + n("width"), y + n("height"))]
    elif el.kind == "line":
        pts = [(n("x1"), n("y1")), (n("x2"), n("y2"))]
    elif el.kind == "path":
        try:
            pts = pen_positions(parse_path(el.attributes.get("d", "")))
        except EmptyPath:
            pts = []
    else:
        pts = [(n("x"), n("y"))]
    return [el.transform.apply(x, y) for x, y in pts]


def viewport_of(doc: SvgDocument) -> Viewport:
    """Resolve drawing dimensions; never fails.

    Tried in order: numeric width/height, viewBox size, bounding box of the
    drawable elements, and finally a 1x1 sentinel.
    """
    attrs = doc.root.attributes
    w, h = _px(attrs.get("width")), _px(attrs.get("height"))
    if w is not None and h is not None:
        return Viewport(w, h)
    box = _viewbox_size(attrs.get("viewBox"))
    if box is not None:
        return Viewport(*box)
    points = [p for el in flatten_elements(doc) for p in _element_points(el)]
    if points:
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        bw, bh = max(xs) - min(xs), max(ys) - min(ys)
        if bw > 0 and bh > 0 and math.isfinite(bw) and math.isfinite(bh):
            return Viewport(bw, bh)
    return Viewport(1.0, 1.0)


def flatten_elements(doc: SvgDocument) -> ElementList:
    """Depth-first list of drawable elements outside ``defs``.

    Each element carries its accumulated transform and its ancestor chain
    (root first). Malformed transforms count as identity and bump
    ``warnings`` on the returned list.
    """
    out = ElementList()

    def visit(node: ElementNode, parent_tf: AffineTransform, ancestors: tuple[Ancestor, ...]):
        if node.tag == "defs":
            return
        tf = parent_tf
        raw = node.attributes.get("transform")
        if raw is not None:
            try:
                tf = parent_tf @ parse_transform(raw)
            except ValueError:
                out.warnings += 1
        if node.kind in DRAWABLE_KINDS:
            out.append(
                RawElement(
                    kind=node.kind,
                    attributes=node.attributes,
                    transform=tf,
                    ancestors=ancestors,
                    class_names=frozenset(node.attributes.get("class", "").split()),
                    text_content=node.text_content,
                )
            )
        here = ancestors + (Ancestor(node.tag, node.attributes),)
        for child in node.children:
            visit(child, tf, here)

    visit(doc.root, IDENTITY, ())
    return out
