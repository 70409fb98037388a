"""Compare the feature vectors of a bar chart, a pie chart and an icon.

Run: python demos/03_features.py
"""

from __future__ import annotations

from svgviz import extract_features, feature_manifest
from svgviz.chartgen import ChartSpec, generate_chart, generate_nonchart

manifest = feature_manifest()
print(f"manifest version {manifest.version}: {len(manifest)} features")

docs = {
    "bar": generate_chart(ChartSpec("bar", seed=1, n_points=6)),
    "pie": generate_chart(ChartSpec("pie", seed=1, n_points=5)),
    "icon": generate_nonchart(1),
}
vectors = {name: extract_features(text) for name, text in docs.items()}

SHOWN = [
    "general.count.rect",
    "general.count.path",
    "general.axis.horizontal",
    "general.axis.vertical",
    "rect.y.unique",
    "rect.width.max_identical",
    "path.polygon.count",
    "path.arc_calls.total",
    "style.fill.unique",
]
print(f"{'feature':28}" + "".join(f"{name:>8}" for name in docs))
for fid in SHOWN:
    print(f"{fid:28}" + "".join(f"{vectors[name][fid]:8.3g}" for name in docs))

# Bars share one width and stand on axes; wedges are closed paths drawn with
# arcs; icons have neither axes nor repeated shapes.
