"""Extract SVG visualizations from web pages and classify them by chart type."""

from svgviz.features import extract_features, feature_manifest
from svgviz.svgdom import parse_svg
from svgviz.tree import fit_tree, predict

__version__ = "0.1.0"

__all__ = ["parse_svg", "extract_features", "feature_manifest", "fit_tree", "predict"]
