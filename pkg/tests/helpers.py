"""Shared builders for test datasets and profiles."""

from __future__ import annotations

import numpy as np

from threshtune import ThresholdProfile, parse_dataset


def csv_text(vocabulary, rows, include_id=False) -> str:
    header = ("id," if include_id else "") + "truth," + ",".join(f"score:{l}" for l in vocabulary)
    lines = [header]
    for row in rows:
        if include_id:
            record_id, truth, scores = row
            prefix = f"{record_id},"
        else:
            truth, scores = row
            prefix = ""
        truth_cell = ";".join(sorted(truth)) if isinstance(truth, (set, frozenset, list, tuple)) else truth
        lines.append(prefix + truth_cell + "," + ",".join(repr(float(scores[l])) for l in vocabulary))
    return "\n".join(lines) + "\n"


def make_dataset(vocabulary, rows, task, positive_label=None, include_id=False):
    return parse_dataset(csv_text(vocabulary, rows, include_id).encode(), task, positive_label)


def random_dataset(rng: np.random.Generator, task: str, n_records: int, labels, decimals: int | None = None):
    """Random dataset via the real parse path; ``decimals`` snaps scores to a grid."""
    labels = list(labels)
    positive_label = labels[0] if task == "binary" else None
    rows = []
    for _ in range(n_records):
        if task == "multilabel":
            truth = {l for l in labels if rng.random() < 0.4}
            if not truth:
                truth = {labels[int(rng.integers(0, len(labels)))]}
        else:
            truth = {labels[int(rng.integers(0, len(labels)))]}
        if decimals is not None:
            steps = 10**decimals
            scores = {l: int(rng.integers(0, steps + 1)) / steps for l in labels}
        else:
            scores = {l: float(rng.random()) for l in labels}
        rows.append((truth, scores))
    return make_dataset(labels, rows, task, positive_label)


def random_profile(rng: np.random.Generator, dataset) -> ThresholdProfile:
    thresholds = {
        label: float(rng.random())
        for label in dataset.vocabulary
        if rng.random() < 0.7
    }
    return ThresholdProfile(
        thresholds=thresholds,
        default_threshold=float(rng.random()),
        task=dataset.task,
        positive_label=dataset.positive_label,
    )
