"""Per-type visualization counts of five published SVG chart collections.

Each collection maps to ``(declared size, {type: count})``. The Fusion
Charts type counts sum to 519 while the collection holds 530 charts; the
remaining 11 belong to types that were seen but not tallied.
"""

from __future__ import annotations

LABELS = (
    "area", "bar", "box", "bubble", "chord", "contour", "donut", "filled-line",
    "geographic-map", "graph", "heatmap", "hexabin", "line", "parallel-coordinates",
    "pie", "radial", "sankey", "scatter", "stream-graph", "sunburst", "treemap",
    "voronoi", "waffle", "word-cloud",
)  # fmt: skip

COLLECTIONS: dict[str, tuple[int, dict[str, int]]] = {
    "D3": (1247, {
        "area": 32, "bar": 154, "box": 11, "bubble": 70, "chord": 34, "donut": 31,
        "heatmap": 32, "geographic-map": 379, "graph": 60, "hexabin": 21, "line": 157,
        "radial": 13, "pie": 7, "sankey": 11, "scatter": 118, "treemap": 10,
        "voronoi": 25, "waffle": 12, "word-cloud": 6, "sunburst": 28,
        "stream-graph": 13, "parallel-coordinates": 23,
    }),
    "Chartblocks": (22730, {"pie": 5514, "line": 8065, "bar": 7402, "scatter": 1749}),
    "Fusion Charts": (530, {
        "area": 14, "bar": 224, "box": 22, "donut": 54, "geographic-map": 48,
        "heatmap": 12, "line": 84, "pie": 26, "scatter": 29, "sunburst": 6,
    }),
    "Graphiq": (2727, {
        "bubble": 9, "donut": 18, "area": 210, "graph": 5, "geographic-map": 244,
        "line": 655, "waffle": 4, "box": 6, "bar": 1542, "treemap": 6, "scatter": 28,
    }),
    "Plotly": (6544, {
        "area": 10, "bar": 1364, "box": 259, "contour": 118, "donut": 193,
        "filled-line": 126, "geographic-map": 184, "line": 1198, "pie": 26,
        "radial": 17, "scatter": 3049,
    }),
}  # fmt: skip
