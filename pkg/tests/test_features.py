from __future__ import annotations

import math
import random
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svgviz.chartgen import CHART_TYPES, ChartSpec, generate_chart
from svgviz.features import (
    MANIFEST_VERSION,
    MatrixFormatError,
    axis_line_counts,
    extract_features,
    feature_manifest,
    read_matrix,
    summarize_elements,
    write_matrix,
)
from svgviz.svgdom import Viewport, parse_svg

GOLDEN = Path(__file__).parent / "golden"


# --- manifest -------------------------------------------------------------------


def test_manifest_shape():
    m = feature_manifest()
    assert m.version == MANIFEST_VERSION == "1"
    assert len(m) == 98
    assert len(set(m.ids)) == len(m)
    assert m.ids[:7] == [
        "general.count.circle",
        "general.count.rect",
        "general.count.line",
        "general.count.path",
        "general.count.text",
        "general.axis.horizontal",
        "general.axis.vertical",
    ]


def test_manifest_groups():
    m = feature_manifest()
    groups = {}
    for e in m.entries:
        groups[e.group] = groups.get(e.group, 0) + 1
    assert groups == {
        "general": 7,
        "style": 8,
        "per_element:circle": 16,
        "per_element:rect": 22,
        "per_element:line": 15,
        "per_element:path": 27,
        "per_element:text": 3,
    }


def test_manifest_lookup():
    m = feature_manifest()
    assert m.lookup("circle.r.max").group == "per_element:circle"
    assert m.ids[m.index("path.arc_calls.total")] == "path.arc_calls.total"
    with pytest.raises(KeyError):
        m.index("nope")


def test_every_entry_is_described():
    assert all(e.description for e in feature_manifest().entries)


# --- axis lines ----------------------------------------------------------------


@pytest.mark.parametrize(
    "line, expected",
    [
        ((0, 50, 100, 50), (1, 0)),
        ((0, 50, 4, 50), (0, 0)),
        ((0, 0, 100, 100), (0, 0)),
        ((50, 0, 50, 100), (0, 1)),
        ((50, 0, 50.4, 60), (0, 1)),
        ((0, 10, 49, 10), (0, 0)),
    ],
)
def test_axis_line_counts(line, expected):
    x1, y1, x2, y2 = line
    doc = parse_svg(f'<svg width="100" height="100"><line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/></svg>')
    assert axis_line_counts(summarize_elements(doc), Viewport(100, 100)) == expected


def test_axis_line_after_transform():
    doc = parse_svg('<svg width="100" height="100"><line transform="rotate(90 50 50)" x1="0" y1="50" x2="100" y2="50"/></svg>')
    assert axis_line_counts(summarize_elements(doc), doc.viewport) == (0, 1)


# --- examples --------------------------------------------------------------------


def test_bar_fixture():
    v = extract_features((GOLDEN / "01_bars.svg").read_text())
    assert v["general.count.rect"] == 3
    assert v["rect.width.unique"] == 1
    assert v["rect.width.variance"] == 0
    assert v["rect.x.unique"] == 3
    assert v["rect.width.max"] == pytest.approx(0.1)


def test_empty_document_all_zero():
    assert set(extract_features('<svg width="10" height="10"/>').values) == {0.0}


def test_radius_normalized_by_longer_side():
    v = extract_features('<svg width="100" height="50"><circle cx="1" cy="1" r="5"/></svg>')
    assert v["circle.r.max"] == pytest.approx(0.05)


def test_rotated_rect_keeps_size():
    v = extract_features('<svg width="100" height="100"><rect transform="rotate(30)" width="10" height="20"/></svg>')
    assert v["rect.width.max"] == pytest.approx(0.1)
    assert v["rect.height.max"] == pytest.approx(0.2)


def test_unparseable_path_still_counted():
    v = extract_features('<svg width="10" height="10"><path d="garbage"/><path/></svg>')
    assert v["general.count.path"] == 2
    assert v["path.d_length.max"] == len("garbage")
    assert v["path.polygon.count"] == 0


def test_accepts_bytes_and_document():
    text = (GOLDEN / "06_paths.svg").read_text()
    assert extract_features(text.encode()) == extract_features(parse_svg(text)) == extract_features(text)


def test_vector_length_and_version():
    v = extract_features("<svg/>")
    assert len(v) == len(feature_manifest())
    assert v.manifest_version == MANIFEST_VERSION
    assert v.as_array().shape == (98,)


# --- matrix file ------------------------------------------------------------------


def test_matrix_round_trip(tmp_path):
    rows = [(p.stem, "lbl" if i % 2 else "", extract_features(p.read_text())) for i, p in enumerate(sorted(GOLDEN.glob("*.svg")))]
    text = write_matrix(rows, tmp_path / "m.csv")
    assert text.startswith("# manifest_version: 1\nid,label,general.count.circle,")
    ids, labels, X, version = read_matrix(tmp_path / "m.csv")
    assert version == "1"
    assert ids == [r[0] for r in rows]
    assert labels == [r[1] for r in rows]
    for row, (_, _, vec) in zip(X, rows):
        assert [format(a, ".9g") for a in row] == [format(b, ".9g") for b in vec.values]


def test_matrix_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,label,a\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(bad)
    bad.write_text("# manifest_version: 1\nid,label,a\nx,y,1,2\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(bad)
    bad.write_text("# manifest_version: 1\nid,label,a\nx,y,abc\n")
    with pytest.raises(MatrixFormatError):
        read_matrix(bad)


# --- properties --------------------------------------------------------------------

D_LENGTH_FEATURES = {i for i in feature_manifest().ids if ".d_length." in i}
# the axis alignment tolerance is an absolute 0.5 px, so scaling can move a
# nearly aligned line across it; see test_axis_tolerance_is_absolute
AXIS_FEATURES = {"general.axis.horizontal", "general.axis.vertical"}

_coord = st.integers(-40, 200)
_pos = st.integers(1, 60)
_elements = st.one_of(
    st.tuples(st.just("circle"), _coord, _coord, _pos),
    st.tuples(st.just("rect"), _coord, _coord, _pos, _pos),
    st.tuples(st.just("line"), _coord, _coord, _coord, _coord),
    st.tuples(st.just("text"), _coord, _coord, st.sampled_from(["10", "12pt", "1.5em"])),
    st.tuples(
        st.just("path"),
        st.lists(
            st.one_of(
                st.tuples(st.just("L"), _coord, _coord),
                st.tuples(st.just("l"), _coord, _coord),
                st.tuples(st.just("A"), _pos, _pos, st.just(0), st.just(0), st.just(1), _coord, _coord),
                st.tuples(st.just("Z")),
            ),
            max_size=5,
        ),
        _coord,
        _coord,
    ),
)
_groups = st.lists(
    st.tuples(
        st.one_of(st.none(), st.tuples(_coord, _coord, st.sampled_from([1, 2, 0.5]))),
        st.lists(st.tuples(_elements, st.sampled_from(["", "a", "b c"]), st.sampled_from(["", "red", "#00f"])), max_size=5),
    ),
    max_size=4,
)


def _render(groups, k=1.0, order=None) -> str:
    def num(v):
        return repr(float(v) * k)

    def element(spec, cls, fill):
        kind, *a = spec
        attrs = (f' class="{cls}"' if cls else "") + (f' fill="{fill}"' if fill else "")
        if kind == "circle":
            return f'<circle cx="{num(a[0])}" cy="{num(a[1])}" r="{num(a[2])}"{attrs}/>'
        if kind == "rect":
            return f'<rect x="{num(a[0])}" y="{num(a[1])}" width="{num(a[2])}" height="{num(a[3])}"{attrs}/>'
        if kind == "line":
            return f'<line x1="{num(a[0])}" y1="{num(a[1])}" x2="{num(a[2])}" y2="{num(a[3])}"{attrs}/>'
        if kind == "text":
            return f'<text x="{num(a[0])}" y="{num(a[1])}" font-size="{a[2]}"{attrs}>t</text>'
        cmds, x0, y0 = a
        d = f"M{num(x0)} {num(y0)}"
        for op, *args in cmds:
            if op == "A":
                rx, ry, rot, large, sweep, x, y = args
                d += f" A{num(rx)} {num(ry)} {rot} {large} {sweep} {num(x)} {num(y)}"
            else:
                d += " " + op + " ".join(num(v) for v in args)
        return f'<path d="{d}"{attrs}/>'

    parts = []
    for g_index, (tf, members) in enumerate(groups):
        inner = [element(*m) for m in members]
        if order is not None:
            order.shuffle(inner)
        open_tag = "<g>" if tf is None else f'<g transform="translate({num(tf[0])},{num(tf[1])}) scale({tf[2]})">'
        parts.append(open_tag + "".join(inner) + "</g>")
    if order is not None:
        order.shuffle(parts)
    w, h = 200 * k, 150 * k
    return f'<svg width="{w!r}" height="{h!r}"><style>.a{{stroke:blue}} .c{{stroke-width:3}}</style>{"".join(parts)}</svg>'


@settings(max_examples=150, deadline=None)
@given(_groups, st.sampled_from([0.125, 0.25, 0.5, 2.0, 4.0, 8.0, 1024.0]))
def test_scale_invariance(groups, k):
    ids = feature_manifest().ids
    base = extract_features(_render(groups))
    scaled = extract_features(_render(groups, k))
    for fid, a, b in zip(ids, base.values, scaled.values):
        if fid in D_LENGTH_FEATURES or fid in AXIS_FEATURES:
            continue
        assert b == pytest.approx(a, rel=1e-9, abs=1e-12), fid


@pytest.mark.parametrize("k, vertical", [(1, 0), (0.5, 1), (0.125, 1), (2, 0)])
def test_axis_tolerance_is_absolute(k, vertical):
    # a line leaning by 1px per 75px is not vertical, but leaning 0.5px is
    svg = f'<svg width="{200 * k}" height="{150 * k}"><line x1="0" y1="0" x2="{k}" y2="{75 * k}"/></svg>'
    v = extract_features(svg)
    assert (v["general.axis.horizontal"], v["general.axis.vertical"]) == (0, vertical)


@pytest.mark.parametrize("k", [0.125, 0.5, 2.0, 1024.0])
def test_exact_axes_survive_scaling(k):
    svg = (
        f'<svg width="{200 * k}" height="{150 * k}"><line x1="0" y1="{150 * k}" x2="{200 * k}" y2="{150 * k}"/>'
        f'<line x1="0" y1="0" x2="0" y2="{150 * k}"/><line x1="0" y1="0" x2="{20 * k}" y2="{75 * k}"/></svg>'
    )
    v = extract_features(svg)
    assert (v["general.axis.horizontal"], v["general.axis.vertical"]) == (1, 1)


@settings(max_examples=150, deadline=None)
@given(_groups, st.randoms(use_true_random=False))
def test_sibling_permutation_invariance(groups, rng):
    assert extract_features(_render(groups, order=rng)) == extract_features(_render(groups))


@settings(max_examples=100, deadline=None)
@given(_groups)
def test_vector_length_always_matches_manifest(groups):
    v = extract_features(_render(groups))
    assert len(v.values) == len(feature_manifest())
    assert all(math.isfinite(x) for x in v.values)


@pytest.mark.parametrize("kind", CHART_TYPES)
def test_determinism(kind):
    text = generate_chart(ChartSpec(kind, seed=3))
    assert extract_features(text) == extract_features(text)


def test_scale_invariance_on_charts():
    """Charts scaled through their viewport and a wrapping transform."""
    for kind in CHART_TYPES:
        text = generate_chart(ChartSpec(kind, seed=11))
        doc = parse_svg(text)
        w, h = doc.viewport.width, doc.viewport.height
        inner = text[text.index(">") + 1 : text.rindex("</svg>")]
        scaled = f'<svg xmlns="http://www.w3.org/2000/svg" width="{w * 4}" height="{h * 4}"><g transform="scale(4)">{inner}</g></svg>'
        a, b = extract_features(text), extract_features(scaled)
        for fid, x, y in zip(feature_manifest().ids, a.values, b.values):
            # stroke widths and font sizes are raw px, so scale() leaves them alone too
            assert y == pytest.approx(x, rel=1e-9, abs=1e-12), (kind, fid)
