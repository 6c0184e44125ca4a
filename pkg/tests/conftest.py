"""Shared fixtures: the canonical six-record dataset and random generators."""

from __future__ import annotations

import numpy as np
import pytest

from classlens.analytics import LabelEntry, PredictionRecord, build_dataset

# Canonical hand-checkable dataset: K=3, six instances, exercising a top-1
# tie (i3), every summary component, and asymmetric flows.
T6_ROWS = [
    ("i0", 0, [0.7, 0.2, 0.1]),
    ("i1", 0, [0.3, 0.6, 0.1]),
    ("i2", 1, [0.1, 0.8, 0.1]),
    ("i3", 1, [0.4, 0.4, 0.2]),
    ("i4", 2, [0.2, 0.3, 0.5]),
    ("i5", 2, [0.5, 0.4, 0.1]),
]

T6_LABELS = [
    LabelEntry(0, "kit fox", ("animal", "canine", "fox")),
    LabelEntry(1, "red fox", ("animal", "canine", "fox")),
    LabelEntry(2, "grey whale", ("animal", "cetacean")),
]

T6_IMAGES = {"i0": "https://img.example/i0.jpg", "i3": "https://img.example/i3.jpg"}


def t6_records():
    return [
        PredictionRecord(iid, true, np.asarray(probs, dtype=np.float64))
        for iid, true, probs in T6_ROWS
    ]


@pytest.fixture
def t6():
    return build_dataset(t6_records())


@pytest.fixture
def t6_labeled():
    return build_dataset(t6_records(), labels=T6_LABELS, images=T6_IMAGES)


def random_records(rng: np.random.Generator, k: int, n: int):
    """Valid random records: normalized uniform vectors, unique ids."""
    records = []
    for i in range(n):
        v = rng.random(k) + 1e-3
        v /= v.sum()
        records.append(
            PredictionRecord(f"r{i:05d}", int(rng.integers(0, k)), v)
        )
    return records


def random_dataset(seed: int, max_k: int = 10, max_n: int = 200):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(2, max_k + 1))
    n = int(rng.integers(1, max_n + 1))
    return build_dataset(random_records(rng, k, n))
