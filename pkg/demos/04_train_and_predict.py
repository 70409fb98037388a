"""Train a tree on synthetic charts and classify charts it has not seen.

Run: python demos/04_train_and_predict.py
"""

from __future__ import annotations

from svgviz import extract_features, feature_manifest, fit_tree, predict
from svgviz.chartgen import CHART_TYPES, generate_corpus
from svgviz.tree import LabeledSample, decode_model, encode_model

train = [LabeledSample(extract_features(text), label) for _, label, text in generate_corpus(per_type=30, seed=0)]
model = fit_tree(train)
print(f"trained on {len(train)} charts: {len(model.nodes)} nodes, depth {model.depth()}")

# the top of the tree shows which features separate the types first
ids = feature_manifest().ids


def show(i: int, indent: int = 0, limit: int = 3) -> None:
    node = model.nodes[i]
    pad = "  " * indent
    if node.is_leaf or indent == limit:
        print(f"{pad}-> {dict(node.counts)}")
        return
    print(f"{pad}{ids[node.feature]} <= {node.threshold:.4g}")
    show(node.left, indent + 1, limit)
    show(node.right, indent + 1, limit)


show(0)

# a model survives a round trip through its JSON file unchanged
restored = decode_model(encode_model(model))
assert encode_model(restored) == encode_model(model)

fresh = list(generate_corpus(per_type=5, seed=99))
hits = 0
for name, label, text in fresh:
    guess, confidence = predict(restored, extract_features(text))
    hits += guess == label
    if guess != label:
        print(f"  {name}: predicted {guess} ({confidence:.2f})")
print(f"held-out accuracy: {hits}/{len(fresh)} over {len(CHART_TYPES)} types")
