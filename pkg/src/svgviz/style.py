"""CSS cascade for the handful of properties the feature extractor reads.

Only flat selectors are understood (``tag``, ``.class``, ``#id``, ``*`` and
comma lists of those). Chart libraries style their output that way, and
anything richer is dropped and counted.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import NamedTuple, Union

import webcolors

from svgviz.svgdom import RawElement

__all__ = [
    "Rgba",
    "Paint",
    "NONE",
    "ColorError",
    "LengthError",
    "StyleRule",
    "RuleList",
    "ResolvedStyle",
    "parse_color",
    "parse_length",
    "parse_declarations",
    "parse_stylesheet",
    "resolve_style",
]


class Rgba(NamedTuple):
    r: int
    g: int
    b: int
    a: int = 255


NONE = "none"

# Rgba, NONE, or a "url(#id)" paint-server reference
Paint = Union[Rgba, str]


class ColorError(ValueError):
    pass


class LengthError(ValueError):
    pass


INITIAL_FONT_SIZE = 16.0
INITIAL_FILL: Paint = Rgba(0, 0, 0)
INITIAL_STROKE: Paint = NONE
INITIAL_STROKE_WIDTH = 1.0

_HEX = re.compile(r"^#([0-9a-f]{3}|[0-9a-f]{6})$")
_FUNC = re.compile(r"^(rgba?)\(\s*([^)]*)\)$")
_URL = re.compile(r"^url\(\s*['\"]?([^'\")]*)['\"]?\s*\)")
_LENGTH = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*([a-zA-Z%]*)$")
_EXTRA_NAMES = {"rebeccapurple": Rgba(0x66, 0x33, 0x99)}


def _channel(token: str) -> int:
    token = token.strip()
    if token.endswith("%"):
        value = float(token[:-1]) * 255 / 100
    else:
        value = float(token)
    return max(0, min(255, round(value)))


def _alpha(token: str) -> int:
    token = token.strip()
    value = float(token[:-1]) / 100 if token.endswith("%") else float(token)
    return max(0, min(255, round(value * 255)))


def parse_color(text: str) -> Paint:
    """Parse a paint value into its canonical form.

    ``#fff``, ``#ffffff``, ``rgb(255,255,255)`` and ``white`` all give the
    same ``Rgba``. ``url(...)`` references come back as a normalized string
    so each distinct reference counts as its own paint.
    """
    value = text.strip().lower()
    if value == "none":
        return NONE
    if value == "transparent":
        return Rgba(0, 0, 0, 0)
    m = _URL.match(value)
    if m:
        return f"url({m.group(1).strip()})"
    m = _HEX.match(value)
    if m:
        digits = m.group(1)
        if len(digits) == 3:
            digits = "".join(ch * 2 for ch in digits)
        return Rgba(int(digits[0:2], 16), int(digits[2:4], 16), int(digits[4:6], 16))
    m = _FUNC.match(value)
    if m:
        parts = [p for p in re.split(r"[\s,/]+", m.group(2)) if p]
        try:
            if len(parts) == 3:
                return Rgba(*(_channel(p) for p in parts))
            if len(parts) == 4:
                return Rgba(*(_channel(p) for p in parts[:3]), _alpha(parts[3]))
        except ValueError:
            pass
        raise ColorError(f"unparseable color: {text!r}")
    if value in _EXTRA_NAMES:
        return _EXTRA_NAMES[value]
    try:
        rgb = webcolors.name_to_rgb(value)
    except ValueError:
        raise ColorError(f"unparseable color: {text!r}") from None
    return Rgba(rgb.red, rgb.green, rgb.blue)


def parse_length(text: str, inherited_px: float) -> float:
    """Convert a CSS length to px.

    ``pt`` scales by 4/3, ``em`` and ``%`` are relative to ``inherited_px``;
    any other unit keeps its numeric part as is.
    """
    m = _LENGTH.match(text.strip())
    if m is None:
        raise LengthError(f"unparseable length: {text!r}")
    value = float(m.group(1))
    unit = m.group(2).lower()
    if unit == "pt":
        return value * 4 / 3
    if unit == "em":
        return value * inherited_px
    if unit == "%":
        return value * inherited_px / 100
    return value


@dataclass(frozen=True)
class StyleRule:
    selector_kind: str  # "id" | "class" | "type" | "universal"
    selector_name: str
    declarations: dict[str, str]
    source_index: int

    def specificity(self) -> tuple[int, int]:
        return (_SPECIFICITY[self.selector_kind], self.source_index)

    def matches(self, tag: str, attributes: dict[str, str], classes) -> bool:
        kind = self.selector_kind
        if kind == "universal":
            return True
        if kind == "type":
            return tag == self.selector_name
        if kind == "class":
            return self.selector_name in classes
        return attributes.get("id") == self.selector_name


_SPECIFICITY = {"universal": 0, "type": 1, "class": 2, "id": 3}
_SIMPLE_SELECTOR = re.compile(r"^(?:(\*)|([A-Za-z][\w-]*)|\.(-?[_A-Za-z][\w-]*)|#([\w-]+))$")
_COMMENT = re.compile(r"/\*.*?\*/", re.S)


class RuleList(list):
    """Parsed rules plus the number of selectors that were dropped."""

    warnings: int = 0


def parse_declarations(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for decl in text.split(";"):
        name, sep, value = decl.partition(":")
        if not sep:
            continue
        name = name.strip().lower()
        value = re.sub(r"!\s*important\s*$", "", value.strip(), flags=re.I).strip()
        if name and value:
            out[name] = value
    return out


def _blocks(text: str):
    """Yield (prelude, body) for top-level rule blocks; at-rules are skipped."""
    depth = 0
    start = 0
    prelude = ""
    for i, ch in enumerate(text):
        if ch == "{":
            if depth == 0:
                prelude = text[start:i]
                start = i + 1
            depth += 1
        elif ch == "}" and depth:
            depth -= 1
            if depth == 0:
                body = text[start:i]
                start = i + 1
                if not prelude.strip().startswith("@"):
                    yield prelude.strip(), body
        elif ch == ";" and depth == 0:
            # statement at-rules such as @import
            start = i + 1


def parse_stylesheet(text: str) -> RuleList:
    rules = RuleList()
    text = _COMMENT.sub("", text).replace("<![CDATA[", "").replace("]]>", "")
    for index, (prelude, body) in enumerate(_blocks(text)):
        declarations = parse_declarations(body)
        for selector in prelude.split(","):
            m = _SIMPLE_SELECTOR.match(selector.strip())
            if m is None:
                rules.warnings += 1
                continue
            if m.group(1):
                rule = StyleRule("universal", "*", declarations, index)
            elif m.group(2):
                rule = StyleRule("type", m.group(2), declarations, index)
            elif m.group(3):
                rule = StyleRule("class", m.group(3), declarations, index)
            else:
                rule = StyleRule("id", m.group(4), declarations, index)
            rules.append(rule)
    return rules


@dataclass(frozen=True)
class ResolvedStyle:
    fill: Paint = INITIAL_FILL
    stroke: Paint = INITIAL_STROKE
    stroke_width: float = INITIAL_STROKE_WIDTH
    font_size: float = INITIAL_FONT_SIZE
    class_names: frozenset[str] = frozenset()


def _candidates(prop, tag, attributes, classes, rules):
    """Declared values for ``prop`` from highest to lowest precedence."""
    inline = parse_declarations(attributes.get("style", ""))
    if prop in inline:
        yield inline[prop]
    matching = [r for r in rules if prop in r.declarations and r.matches(tag, attributes, classes)]
    for rule in sorted(matching, key=StyleRule.specificity, reverse=True):
        yield rule.declarations[prop]
    if prop in attributes:
        yield attributes[prop]


def _paint(value: str, inherited: Paint, inherited_fill: Paint) -> Paint:
    lowered = value.strip().lower()
    if lowered == "inherit":
        return inherited
    if lowered == "currentcolor":
        return inherited_fill
    return parse_color(value)


def _cascade(tag, attributes, rules, parent: ResolvedStyle) -> ResolvedStyle:
    classes = frozenset(attributes.get("class", "").split())

    def pick(prop, convert, inherited):
        for value in _candidates(prop, tag, attributes, classes, rules):
            if value.strip().lower() == "inherit":
                return inherited
            try:
                return convert(value)
            except (ColorError, LengthError):
                continue
        return inherited

    def positive(value, allow_zero):
        def convert(text):
            px = parse_length(text, value)
            if not math.isfinite(px) or px < 0 or (px == 0 and not allow_zero):
                raise LengthError(text)
            return px
        return convert

    font_size = pick("font-size", positive(parent.font_size, False), parent.font_size)
    fill = pick("fill", lambda v: _paint(v, parent.fill, parent.fill), parent.fill)
    stroke = pick("stroke", lambda v: _paint(v, parent.stroke, parent.fill), parent.stroke)
    stroke_width = pick("stroke-width", positive(font_size, True), parent.stroke_width)
    return ResolvedStyle(fill, stroke, stroke_width, font_size, classes)


def _inherited(ancestors, rules, cache) -> ResolvedStyle:
    if not ancestors:
        return ResolvedStyle()
    # ancestor objects are shared between siblings; the cached value keeps
    # them alive so their ids stay unique
    key = tuple(map(id, ancestors))
    hit = cache.get(key)
    if hit is not None:
        return hit[1]
    parent = _inherited(ancestors[:-1], rules, cache)
    last = ancestors[-1]
    style = _cascade(last.tag, last.attributes, rules, parent)
    cache[key] = (ancestors, style)
    return style


def resolve_style(el: RawElement, rules: list[StyleRule], cache: dict | None = None) -> ResolvedStyle:
    """Effective paint, stroke width and font size of one element.

    Precedence per property: inline ``style``, then stylesheet rules (by
    specificity, then source order), then the presentation attribute, then
    the parent's resolved value. ``cache`` may be shared across the elements
    of one document to avoid re-resolving common ancestors.
    """
    parent = _inherited(el.ancestors, rules, {} if cache is None else cache)
    return _cascade(el.kind, el.attributes, rules, parent)
