"""Estimate accuracy with repeated stratified k-fold cross-validation.

Run: python demos/05_cross_validation.py
"""

from __future__ import annotations

from svgviz import extract_features
from svgviz.chartgen import generate_corpus
from svgviz.evaluation import cross_validate, stratified_folds
from svgviz.tree import LabeledSample

# 40 charts per type plus a few icons; the icons get their own label
samples = generate_corpus(per_type=40, seed=3, nonchart_label="icon", nonchart_count=3)
data = [LabeledSample(extract_features(text), label) for _, label, text in samples]

folds = stratified_folds([s.label for s in data], k=5, seed=0)
print("samples per fold:", [len(folds.test_indices(f)) for f in range(5)])

report = cross_validate(data, k=5, runs=3, seed=0, jobs=4)
print(report.table())
# "icon" has fewer samples than folds, so it is pooled for fold assignment
print("pooled rare classes:", report.rare_labels)
