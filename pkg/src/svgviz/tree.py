"""CART classification tree with deterministic tie-breaking and a JSON model format.

Splits maximize the decrease in Gini impurity. Candidate thresholds are the
midpoints between consecutive distinct values of a feature and samples with
``value <= threshold`` go left. Ties go to the lowest feature index, then
the lowest threshold; leaf votes tie-break on the lexicographically smallest
label. Trees are grown until pure unless limited by ``TrainParams``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

__all__ = [
    "FORMAT_VERSION",
    "EmptyDataset",
    "EmptyHistogram",
    "InconsistentVectorLength",
    "VectorLengthMismatch",
    "UnsupportedVersion",
    "CorruptModel",
    "LabeledSample",
    "TrainParams",
    "SplitCandidate",
    "Node",
    "TreeModel",
    "gini_impurity",
    "best_split",
    "fit_tree",
    "fit_matrix",
    "predict",
    "predict_many",
    "encode_model",
    "decode_model",
]

FORMAT_VERSION = "1"

# impurity decreases closer than this are treated as ties
TIE_TOLERANCE = 1e-12


class EmptyDataset(ValueError):
    pass


class EmptyHistogram(ValueError):
    pass


class InconsistentVectorLength(ValueError):
    pass


class VectorLengthMismatch(ValueError):
    pass


class UnsupportedVersion(ValueError):
    pass


class CorruptModel(ValueError):
    pass


@dataclass(frozen=True)
class LabeledSample:
    vector: Any  # FeatureVector or a plain sequence of numbers
    label: str


def _values(vector) -> np.ndarray:
    return np.asarray(getattr(vector, "values", vector), dtype=float)


@dataclass(frozen=True)
class TrainParams:
    max_depth: int | None = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    criterion: str = "gini"

    def __post_init__(self):
        if self.criterion != "gini":
            raise ValueError("only the gini criterion is supported")
        if self.min_samples_split < 2 or self.min_samples_leaf < 1:
            raise ValueError("min_samples_split must be >= 2 and min_samples_leaf >= 1")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be non-negative")


@dataclass(frozen=True)
class SplitCandidate:
    feature_index: int
    threshold: float
    impurity_decrease: float
    left_count: int
    right_count: int


@dataclass
class Node:
    counts: dict[str, int]
    feature: int | None = None
    threshold: float | None = None
    left: int | None = None
    right: int | None = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None


@dataclass
class TreeModel:
    nodes: list[Node]
    label_set: tuple[str, ...]
    n_features: int
    manifest_version: str = ""
    version: str = field(default=FORMAT_VERSION)

    def depth(self) -> int:
        def walk(i):
            node = self.nodes[i]
            return 0 if node.is_leaf else 1 + max(walk(node.left), walk(node.right))

        return walk(0)


def gini_impurity(counts: Mapping[str, int]) -> float:
    total = sum(counts.values())
    if total <= 0:
        raise EmptyHistogram("histogram has no samples")
    return 1.0 - sum((c / total) ** 2 for c in counts.values())


def _midpoint(lo: float, hi: float) -> float:
    mid = lo / 2 + hi / 2
    # adjacent floats can round the midpoint up onto ``hi``
    return mid if lo <= mid < hi else lo


def _column_best(values: np.ndarray, onehot: np.ndarray, parent_gini: float, min_leaf: int):
    """Best (decrease, threshold, left_count) for one feature column, or None."""
    n = len(values)
    if n < 2:
        return None
    order = np.argsort(values, kind="stable")
    sv = values[order]
    left = np.cumsum(onehot[order], axis=0)[:-1]
    right = onehot.sum(axis=0) - left
    n_left = np.arange(1, n, dtype=float)
    n_right = n - n_left
    valid = (sv[:-1] < sv[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = (left**2).sum(axis=1) / n_left + (right**2).sum(axis=1) / n_right
    decrease = parent_gini - 1.0 + score / n
    decrease = np.where(valid, decrease, -np.inf)
    best = decrease.max()
    # earliest sorted position among ties is the smallest threshold
    pos = int(np.flatnonzero(decrease >= best - TIE_TOLERANCE)[0])
    return max(float(decrease[pos]), 0.0), _midpoint(float(sv[pos]), float(sv[pos + 1])), pos + 1


def _encode_labels(labels: Sequence[str]):
    label_set = tuple(sorted(set(labels)))
    code = {label: i for i, label in enumerate(label_set)}
    y = np.fromiter((code[label] for label in labels), dtype=int, count=len(labels))
    return label_set, y


def _onehot(y: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((len(y), n_classes))
    out[np.arange(len(y)), y] = 1.0
    return out


def best_split(samples: Sequence[LabeledSample], feature_index: int, min_samples_leaf: int = 1) -> SplitCandidate | None:
    """Best threshold on one feature, or None when the feature is constant."""
    if len(samples) < 2:
        return None
    values = np.array([_values(s.vector)[feature_index] for s in samples])
    label_set, y = _encode_labels([s.label for s in samples])
    parent = gini_impurity(Counter(s.label for s in samples))
    found = _column_best(values, _onehot(y, len(label_set)), parent, min_samples_leaf)
    if found is None:
        return None
    decrease, threshold, n_left = found
    return SplitCandidate(feature_index, threshold, decrease, n_left, len(samples) - n_left)


def _histogram(y: np.ndarray, label_set) -> dict[str, int]:
    counts = np.bincount(y, minlength=len(label_set))
    return {label_set[i]: int(c) for i, c in enumerate(counts) if c}


def fit_matrix(X, labels: Sequence[str], params: TrainParams | None = None, manifest_version: str = "") -> TreeModel:
    """Grow a tree from a 2-D array of feature values and a label per row."""
    params = params or TrainParams()
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise EmptyDataset("no training samples")
    if len(labels) != X.shape[0]:
        raise ValueError("one label per row is required")
    label_set, y = _encode_labels(labels)
    onehot = _onehot(y, len(label_set))
    n_features = X.shape[1]

    nodes: list[Node] = []
    queue = [(np.arange(X.shape[0]), 0)]
    nodes.append(Node(_histogram(y, label_set)))
    head = 0
    while head < len(queue):
        idx, depth = queue[head]
        node = nodes[head]
        head += 1
        if (
            len(node.counts) == 1
            or len(idx) < params.min_samples_split
            or (params.max_depth is not None and depth >= params.max_depth)
        ):
            continue
        parent_gini = gini_impurity(node.counts)
        best = None
        for f in range(n_features):
            found = _column_best(X[idx, f], onehot[idx], parent_gini, params.min_samples_leaf)
            if found is None:
                continue
            if best is None or found[0] > best[0] + TIE_TOLERANCE:
                best = (found[0], f, found[1])
        if best is None:
            continue
        _, f, threshold = best
        go_left = X[idx, f] <= threshold
        node.feature, node.threshold = f, threshold
        for part in (idx[go_left], idx[~go_left]):
            child = len(nodes)
            nodes.append(Node(_histogram(y[part], label_set)))
            queue.append((part, depth + 1))
            if node.left is None:
                node.left = child
            else:
                node.right = child
    return TreeModel(nodes, label_set, n_features, manifest_version)


def fit_tree(data: Sequence[LabeledSample], params: TrainParams | None = None) -> TreeModel:
    if not data:
        raise EmptyDataset("no training samples")
    rows = [_values(s.vector) for s in data]
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InconsistentVectorLength("samples have differing vector lengths")
    version = getattr(data[0].vector, "manifest_version", "")
    return fit_matrix(np.vstack(rows), [s.label for s in data], params, version)


def _vote(counts: Mapping[str, int]) -> tuple[str, float]:
    label = min(counts, key=lambda k: (-counts[k], k))
    return label, counts[label] / sum(counts.values())


def predict(model: TreeModel, v) -> tuple[str, float]:
    """Predicted label and the leaf's majority fraction."""
    values = _values(v)
    if len(values) != model.n_features:
        raise VectorLengthMismatch(f"expected {model.n_features} values, got {len(values)}")
    node = model.nodes[0]
    while not node.is_leaf:
        node = model.nodes[node.left if values[node.feature] <= node.threshold else node.right]
    return _vote(node.counts)


def predict_many(model: TreeModel, X) -> list[tuple[str, float]]:
    return [predict(model, row) for row in np.asarray(X, dtype=float)]


def _node_to_json(node: Node) -> dict:
    out: dict[str, Any] = {"counts": dict(sorted(node.counts.items()))}
    if not node.is_leaf:
        out.update(feature=node.feature, threshold=node.threshold, left=node.left, right=node.right)
    return out


def encode_model(model: TreeModel) -> bytes:
    doc = {
        "version": model.version,
        "manifest_version": model.manifest_version,
        "label_set": list(model.label_set),
        "n_features": model.n_features,
        "nodes": [_node_to_json(n) for n in model.nodes],
    }
    return (json.dumps(doc, indent=1, sort_keys=True, allow_nan=False) + "\n").encode("utf-8")


def _check_tree(nodes: list[Node], n_features: int) -> None:
    seen = set()
    stack = [0]
    while stack:
        i = stack.pop()
        if not isinstance(i, int) or not 0 <= i < len(nodes) or i in seen:
            raise CorruptModel(f"node reference {i!r} is invalid or repeated")
        seen.add(i)
        node = nodes[i]
        if not node.counts or any(not isinstance(c, int) or c < 0 for c in node.counts.values()):
            raise CorruptModel(f"node {i} has an invalid histogram")
        if not node.is_leaf:
            if not isinstance(node.feature, int) or not 0 <= node.feature < n_features:
                raise CorruptModel(f"node {i} has an invalid feature index")
            if not isinstance(node.threshold, (int, float)):
                raise CorruptModel(f"node {i} has an invalid threshold")
            stack += [node.right, node.left]
    if len(seen) != len(nodes):
        raise CorruptModel("model contains unreachable nodes")


def decode_model(data: bytes | str) -> TreeModel:
    try:
        doc = json.loads(data)
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModel(f"model is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptModel("model has no version field")
    if doc["version"] != FORMAT_VERSION:
        raise UnsupportedVersion(f"model format version {doc['version']!r} is not supported")
    try:
        nodes = []
        for raw in doc["nodes"]:
            leaf = "feature" not in raw
            nodes.append(
                Node(
                    counts={str(k): v for k, v in raw["counts"].items()},
                    feature=None if leaf else raw["feature"],
                    threshold=None if leaf else float(raw["threshold"]),
                    left=None if leaf else raw["left"],
                    right=None if leaf else raw["right"],
                )
            )
        model = TreeModel(
            nodes=nodes,
            label_set=tuple(doc["label_set"]),
            n_features=int(doc["n_features"]),
            manifest_version=str(doc["manifest_version"]),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise CorruptModel(f"malformed model: {exc!r}") from None
    if not nodes:
        raise CorruptModel("model has no nodes")
    _check_tree(nodes, model.n_features)
    return model
