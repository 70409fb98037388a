"""Stratified cross-validation, confusion matrices and chart-type usage tables."""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from decimal import ROUND_HALF_UP, Decimal
from typing import Mapping, Sequence

import numpy as np

from svgviz.tree import EmptyDataset, LabeledSample, TrainParams, fit_matrix, predict_many

__all__ = [
    "RARE_STRATUM",
    "TOP_FOUR",
    "BadK",
    "EmptyCounts",
    "FoldAssignment",
    "ConfusionMatrix",
    "EvalReport",
    "UsageReport",
    "stratified_folds",
    "cross_validate",
    "confusion_matrix",
    "usage_stats",
]

RARE_STRATUM = "__rare__"
UNLISTED = "__unlisted__"
TOP_FOUR = ("bar", "line", "scatter", "geographic-map")


class BadK(ValueError):
    pass


class EmptyCounts(ValueError):
    pass


@dataclass(frozen=True)
class FoldAssignment:
    fold_of: tuple[int, ...]
    k: int
    seed: int

    def test_indices(self, fold: int) -> list[int]:
        return [i for i, f in enumerate(self.fold_of) if f == fold]


def stratified_folds(labels: Sequence[str], k: int, seed: int) -> FoldAssignment:
    """Assign each sample to one of ``k`` folds, balanced within every class.

    Classes are visited in sorted order; each is shuffled with a generator
    seeded by ``seed`` and dealt round-robin, continuing from the fold where
    the previous class stopped so that fold totals stay balanced as well.
    """
    if k < 2:
        raise BadK(f"k must be at least 2, got {k}")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = defaultdict(list)
    for i, label in enumerate(labels):
        by_class[label].append(i)
    fold_of = [0] * len(labels)
    cursor = 0
    for label in sorted(by_class):
        members = np.array(by_class[label])
        for i in members[rng.permutation(len(members))]:
            fold_of[int(i)] = cursor
            cursor = (cursor + 1) % k
    return FoldAssignment(tuple(fold_of), k, seed)


@dataclass(frozen=True)
class ConfusionMatrix:
    labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]  # counts[true][predicted]

    def __getitem__(self, pair: tuple[str, str]) -> int:
        t, p = pair
        return self.counts[self.labels.index(t)][self.labels.index(p)]

    @property
    def total(self) -> int:
        return sum(map(sum, self.counts))

    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(self.labels)))

    def table(self) -> str:
        width = max([len(l) for l in self.labels] + [5])
        cells = max([len(str(c)) for row in self.counts for c in row] + [1])
        col = max(cells, 3)
        lines = [" " * width + " " + " ".join(f"{l[:col]:>{col}}" for l in self.labels)]
        for label, row in zip(self.labels, self.counts):
            lines.append(f"{label:<{width}} " + " ".join(f"{c:>{col}}" for c in row))
        return "\n".join(lines)


def confusion_matrix(pairs: Sequence[tuple[str, str]]) -> ConfusionMatrix:
    labels = tuple(sorted({t for t, _ in pairs} | {p for _, p in pairs}))
    index = {label: i for i, label in enumerate(labels)}
    grid = [[0] * len(labels) for _ in labels]
    for t, p in pairs:
        grid[index[t]][index[p]] += 1
    return ConfusionMatrix(labels, tuple(map(tuple, grid)))


@dataclass
class EvalReport:
    k: int
    runs: int
    seed: int
    accuracies: list[float]
    confusion: ConfusionMatrix
    rare_labels: list[str] = field(default_factory=list)
    predictions: list[list[str]] = field(default_factory=list)  # [run][sample]

    @property
    def mean_accuracy(self) -> float:
        return sum(self.accuracies) / len(self.accuracies)

    def to_json(self) -> str:
        doc = {
            "version": "1",
            "k": self.k,
            "runs": self.runs,
            "seed": self.seed,
            "run_accuracy": self.accuracies,
            "mean_accuracy": self.mean_accuracy,
            "rare_labels": self.rare_labels,
            "confusion": {"labels": list(self.confusion.labels), "counts": [list(r) for r in self.confusion.counts]},
        }
        return json.dumps(doc, indent=1, sort_keys=True) + "\n"

    def table(self) -> str:
        lines = [f"{'run':>4}  {'seed':>6}  accuracy"]
        for r, acc in enumerate(self.accuracies):
            lines.append(f"{r:>4}  {self.seed + r:>6}  {acc:.4f}")
        lines.append(f"{'mean':>4}  {'':>6}  {self.mean_accuracy:.4f}")
        lines.append("")
        lines.append(self.confusion.table())
        return "\n".join(lines) + "\n"


def _run_fold(X, labels, train, test, params):
    model = fit_matrix(X[train], [labels[i] for i in train], params)
    return [label for label, _ in predict_many(model, X[test])]


def cross_validate(
    data: Sequence[LabeledSample],
    k: int = 5,
    runs: int = 10,
    seed: int = 0,
    params: TrainParams | None = None,
    jobs: int = 1,
) -> EvalReport:
    """Repeated stratified k-fold cross-validation.

    Run ``r`` draws its folds with seed ``seed + r``. Classes with fewer than
    ``k`` samples are pooled into one stratum for fold assignment only; they
    keep their labels for training and testing.
    """
    if not data:
        raise EmptyDataset("no samples to evaluate")
    X = np.vstack([np.asarray(getattr(s.vector, "values", s.vector), dtype=float) for s in data])
    labels = [s.label for s in data]
    sizes = Counter(labels)
    rare = sorted(label for label, n in sizes.items() if n < k)
    strata = [RARE_STRATUM if sizes[label] < k else label for label in labels]

    tasks = []
    for r in range(runs):
        folds = stratified_folds(strata, k, seed + r)
        for fold in range(k):
            test = np.array(folds.test_indices(fold), dtype=int)
            train = np.array([i for i, f in enumerate(folds.fold_of) if f != fold], dtype=int)
            tasks.append((r, test, train))

    def work(task):
        _, test, train = task
        if len(test) == 0 or len(train) == 0:
            return []
        return _run_fold(X, labels, train, test, params)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, tasks))
    else:
        results = [work(t) for t in tasks]

    predictions = [[""] * len(data) for _ in range(runs)]
    for (r, test, _), predicted in zip(tasks, results):
        for i, p in zip(test, predicted):
            predictions[r][int(i)] = p
    accuracies = []
    pairs = []
    for r in range(runs):
        correct = sum(1 for t, p in zip(labels, predictions[r]) if t == p)
        accuracies.append(correct / len(data))
        pairs += list(zip(labels, predictions[r]))
    return EvalReport(k, runs, seed, accuracies, confusion_matrix(pairs), rare, predictions)


def _percent(count: int, total: int) -> float:
    return float(Fraction(100 * count, total))


def _round1(count: int, total: int) -> float:
    exact = Decimal(100 * count) / Decimal(total)
    return float(exact.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class UsageReport:
    counts: dict[str, int]
    total: int
    percentages: dict[str, float]  # rounded to 1 decimal
    raw_percentages: dict[str, float]
    most_popular: tuple[str, float]
    second_most_popular: tuple[str, float] | None
    top4_coverage: float  # rounded to 1 decimal
    top4_coverage_raw: float

    def percent(self, label: str) -> float:
        return self.percentages.get(label, 0.0)

    def table(self) -> str:
        width = max([len(l) for l in self.counts] + [5])
        lines = [f"{'type':<{width}}  {'count':>7}  {'%':>6}"]
        for label in sorted(self.counts, key=lambda l: (-self.counts[l], l)):
            lines.append(f"{label:<{width}}  {self.counts[label]:>7}  {self.percentages[label]:>6.1f}")
        lines.append(f"{'total':<{width}}  {self.total:>7}")
        lines.append(f"most popular: {self.most_popular[0]} {self.most_popular[1]:.1f}%")
        if self.second_most_popular:
            lines.append(f"second most popular: {self.second_most_popular[0]} {self.second_most_popular[1]:.1f}%")
        lines.append(f"bar+line+scatter+geographic-map: {self.top4_coverage:.1f}%")
        return "\n".join(lines) + "\n"


def usage_stats(counts: Mapping[str, int], total: int | None = None) -> UsageReport:
    """Share of each visualization type in a collection.

    ``total`` is the declared collection size when it exceeds the sum of the
    listed counts (some samples belong to types that were not tallied); the
    difference is reported under ``__unlisted__`` so that percentages still
    add up to 100.
    """
    counts = {label: int(n) for label, n in counts.items() if n > 0}
    listed = sum(counts.values())
    if listed == 0:
        raise EmptyCounts("usage statistics need at least one counted sample")
    total = listed if total is None else int(total)
    if total < listed:
        raise ValueError(f"declared total {total} is below the listed count {listed}")
    if total > listed:
        counts[UNLISTED] = total - listed
    percentages = {label: _round1(n, total) for label, n in counts.items()}
    raw = {label: _percent(n, total) for label, n in counts.items()}
    ranked = sorted((l for l in counts if l != UNLISTED), key=lambda l: (-counts[l], l))
    most = (ranked[0], percentages[ranked[0]])
    second = (ranked[1], percentages[ranked[1]]) if len(ranked) > 1 else None
    covered = sum(counts.get(label, 0) for label in TOP_FOUR)
    return UsageReport(
        counts=counts,
        total=total,
        percentages=percentages,
        raw_percentages=raw,
        most_popular=most,
        second_most_popular=second,
        top4_coverage=_round1(covered, total),
        top4_coverage_raw=_percent(covered, total),
    )
