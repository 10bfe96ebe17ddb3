"""Bundled synthetic benchmark datasets for demos and acceptance tests.

Every fixture is generated from a seeded spec, so the committed CSV bytes can
be regenerated and verified at any time.  The two spam fixtures model a pair of
email classifiers whose safe-mail scores cluster at different points (0.12 and
0.65), forcing model-dependent thresholds; the tomato fixtures model a
harvesting pipeline with a five-type classifier and a binary ripeness check
whose score overlap makes cost-optimal and F1-optimal thresholds disagree.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .payloads import dumps

MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class FixtureSpec:
    name: str
    kind: str
    seed: int
    params: dict[str, Any]
    expected: dict[str, Any]

    @property
    def filename(self) -> str:
        return self.name + (".json" if self.kind == "cost_schedule" else ".csv")


def _round3(values: np.ndarray) -> np.ndarray:
    return np.round(values, 3)


def _csv_bytes(vocabulary: list[str], rows: list[tuple[str, str, dict[str, float]]]) -> bytes:
    lines = ["id,truth," + ",".join(f"score:{label}" for label in vocabulary)]
    for record_id, truth, scores in rows:
        cells = ",".join(f"{scores[label]:.3f}" for label in vocabulary)
        lines.append(f"{record_id},{truth},{cells}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _binary_rows(spec: FixtureSpec) -> list[tuple[str, str, dict[str, float]]]:
    p = spec.params
    rng = np.random.default_rng(spec.seed)
    n = p["n_records"]
    n_positive = int(round(n * p["positive_fraction"]))
    positive, negative = p["positive_label"], p["negative_label"]

    if p["negative_scores"]["shape"] == "normal":
        shape = p["negative_scores"]
        neg = rng.normal(shape["center"], shape["spread"], size=n - n_positive)
        neg = np.clip(neg, shape["low"], shape["high"])
    else:
        shape = p["negative_scores"]
        parts = []
        for chunk in shape["mixture"]:
            count = int(round((n - n_positive) * chunk["fraction"]))
            parts.append(rng.uniform(chunk["low"], chunk["high"], size=count))
        neg = np.concatenate(parts)[: n - n_positive]
        if len(neg) < n - n_positive:
            last = shape["mixture"][-1]
            neg = np.concatenate([neg, rng.uniform(last["low"], last["high"], size=n - n_positive - len(neg))])
    pos = rng.uniform(p["positive_scores"]["low"], p["positive_scores"]["high"], size=n_positive)

    truths = np.array([positive] * n_positive + [negative] * (n - n_positive), dtype=object)
    scores = np.concatenate([pos, neg])
    order = rng.permutation(n)
    truths, scores = truths[order], _round3(scores[order])

    rows = []
    for i in range(n):
        s = float(scores[i])
        rows.append((
            f"{p['id_prefix']}_{i:04d}",
            str(truths[i]),
            {positive: s, negative: round(1.0 - s, 3)},
        ))
    return rows


def _degrade_rows(
    rows: list[tuple[str, str, dict[str, float]]], positive: str, negative: str, shift: float
) -> list[tuple[str, str, dict[str, float]]]:
    degraded = []
    for record_id, truth, scores in rows:
        s = max(0.0, round(scores[positive] - shift, 3))
        degraded.append((record_id, truth, {positive: s, negative: round(1.0 - s, 3)}))
    return degraded


def _multiclass_rows(spec: FixtureSpec) -> list[tuple[str, str, dict[str, float]]]:
    p = spec.params
    rng = np.random.default_rng(spec.seed)
    labels = list(p["labels"])
    n = p["n_records"]
    rows = []
    for i in range(n):
        true_label = labels[int(rng.integers(0, len(labels)))]
        if rng.random() < p["correct_probability"]:
            winner = true_label
        else:
            others = [label for label in labels if label != true_label]
            winner = others[int(rng.integers(0, len(others)))]
        top = float(rng.uniform(p["winner_low"], p["winner_high"]))
        scores = {}
        for label in labels:
            if label == winner:
                scores[label] = round(top, 3)
            else:
                scores[label] = round(float(rng.uniform(0.0, 0.7 * top)), 3)
        rows.append((f"{p['id_prefix']}_{i:04d}", true_label, scores))
    return rows


def generate_fixture(spec: FixtureSpec) -> bytes:
    """Deterministic file bytes for a fixture spec."""
    if spec.kind == "two_cluster_binary" or spec.kind == "overlapping_binary":
        rows = _binary_rows(spec)
        vocab = sorted([spec.params["positive_label"], spec.params["negative_label"]])
        return _csv_bytes(vocab, rows)
    if spec.kind == "degraded_binary":
        base = fixture_by_name(spec.params["base"])
        rows = _degrade_rows(
            _binary_rows(base),
            base.params["positive_label"],
            base.params["negative_label"],
            spec.params["shift"],
        )
        vocab = sorted([base.params["positive_label"], base.params["negative_label"]])
        return _csv_bytes(vocab, rows)
    if spec.kind == "multiclass_types":
        return _csv_bytes(sorted(spec.params["labels"]), _multiclass_rows(spec))
    if spec.kind == "cost_schedule":
        return dumps(spec.params["schedule"]).encode("utf-8")
    raise ValueError(f"unknown fixture kind {spec.kind!r}")


BUILTIN_FIXTURES: tuple[FixtureSpec, ...] = (
    FixtureSpec(
        name="spam_model_1",
        kind="two_cluster_binary",
        seed=101,
        params={
            "n_records": 100,
            "positive_fraction": 0.45,
            "positive_label": "spam",
            "negative_label": "ham",
            "id_prefix": "email",
            "negative_scores": {"shape": "normal", "center": 0.12, "spread": 0.035, "low": 0.05, "high": 0.19},
            "positive_scores": {"low": 0.30, "high": 0.95},
        },
        expected={
            "record_count": 100,
            "positives": 45,
            "task": "binary",
            "gap_low": 0.19,
            "gap_high": 0.30,
        },
    ),
    FixtureSpec(
        name="spam_model_2",
        kind="two_cluster_binary",
        seed=102,
        params={
            "n_records": 100,
            "positive_fraction": 0.40,
            "positive_label": "spam",
            "negative_label": "ham",
            "id_prefix": "email",
            "negative_scores": {"shape": "normal", "center": 0.65, "spread": 0.025, "low": 0.58, "high": 0.68},
            "positive_scores": {"low": 0.74, "high": 0.95},
        },
        expected={
            "record_count": 100,
            "positives": 40,
            "task": "binary",
            "gap_low": 0.68,
            "gap_high": 0.74,
        },
    ),
    FixtureSpec(
        name="spam_model_1_degraded",
        kind="degraded_binary",
        seed=101,
        params={"base": "spam_model_1", "shift": 0.5},
        expected={"record_count": 100, "task": "binary"},
    ),
    FixtureSpec(
        name="tomatoes_ripeness",
        kind="overlapping_binary",
        seed=77,
        params={
            "n_records": 1000,
            "positive_fraction": 0.5,
            "positive_label": "ripe",
            "negative_label": "not_ripe",
            "id_prefix": "tomato",
            "negative_scores": {
                "shape": "mixture",
                "mixture": [
                    {"fraction": 0.7, "low": 0.02, "high": 0.30},
                    {"fraction": 0.3, "low": 0.30, "high": 0.72},
                ],
            },
            "positive_scores": {"low": 0.25, "high": 0.95},
        },
        expected={"record_count": 1000, "positives": 500, "task": "binary"},
    ),
    FixtureSpec(
        name="tomatoes_type",
        kind="multiclass_types",
        seed=55,
        params={
            "n_records": 1000,
            "labels": ["roma", "cherry", "plum", "green", "yellow"],
            "correct_probability": 0.85,
            "winner_low": 0.45,
            "winner_high": 0.98,
            "id_prefix": "tomato",
        },
        expected={"record_count": 1000, "label_count": 5, "task": "multiclass"},
    ),
    FixtureSpec(
        name="tomatoes_costs",
        kind="cost_schedule",
        seed=0,
        params={
            "schedule": {
                "currency_tag": "AUD",
                "per_label": {
                    "not_ripe": {"correct": 0.0, "false_positive": 1.0, "missed_positive": 1.0},
                    "ripe": {"correct": 0.0, "false_positive": 5.0, "missed_positive": 1.0},
                },
            },
        },
        expected={},
    ),
)


def fixture_by_name(name: str) -> FixtureSpec:
    for spec in BUILTIN_FIXTURES:
        if spec.name == name:
            return spec
    raise KeyError(f"no fixture named {name!r}")


def write_fixtures(directory: Path) -> list[Path]:
    """Write every builtin fixture plus the manifest into ``directory``."""
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    entries = []
    for spec in BUILTIN_FIXTURES:
        data = generate_fixture(spec)
        path = directory / spec.filename
        path.write_bytes(data)
        written.append(path)
        entries.append({
            "name": spec.name,
            "file": spec.filename,
            "kind": spec.kind,
            "seed": spec.seed,
            "params": spec.params,
            "expected": spec.expected,
            "sha256": hashlib.sha256(data).hexdigest(),
        })
    manifest = directory / MANIFEST_NAME
    manifest.write_text(dumps({"format_version": 1, "fixtures": entries}), encoding="utf-8")
    written.append(manifest)
    return written


def load_manifest(directory: Path) -> dict[str, Any]:
    return json.loads((directory / MANIFEST_NAME).read_text(encoding="utf-8"))


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("fixtures")
    for path in write_fixtures(target):
        print(path)
