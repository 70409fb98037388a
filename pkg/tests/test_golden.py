"""Hand-computed feature vectors for tiny SVGs.

Each ``golden/*.json`` lists the nonzero features of the matching ``.svg``;
every other feature must be exactly zero. Values are compared at 9
significant digits.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from svgviz import extract_features, feature_manifest

GOLDEN = Path(__file__).parent / "golden"
CASES = sorted(p.stem for p in GOLDEN.glob("*.svg"))


def sig9(x: float) -> str:
    return format(float(x), ".9g")


def golden_mismatches(stem: str) -> list[str]:
    expected = json.loads((GOLDEN / f"{stem}.json").read_text())
    manifest = feature_manifest()
    unknown = sorted(set(expected) - set(manifest.ids))
    if unknown:
        return [f"unknown feature ids {unknown}"]
    vector = extract_features((GOLDEN / f"{stem}.svg").read_text())
    bad = []
    for fid in manifest.ids:
        want, got = expected.get(fid, 0.0), vector[fid]
        if sig9(want) != sig9(got):
            bad.append(f"{fid}: expected {sig9(want)}, got {sig9(got)}")
    return bad


def test_enough_fixtures():
    assert len(CASES) >= 10


def test_fixtures_cover_every_group():
    groups = set()
    manifest = feature_manifest()
    for stem in CASES:
        for fid in json.loads((GOLDEN / f"{stem}.json").read_text()):
            groups.add(manifest.lookup(fid).group)
    assert groups == {e.group for e in manifest.entries}


@pytest.mark.parametrize("stem", CASES)
def test_golden_vector(stem):
    assert golden_mismatches(stem) == []
