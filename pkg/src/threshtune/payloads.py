"""JSON-able payload builders shared by the CLI and the HTTP service.

Both front ends serialize through :func:`dumps`, so machine-readable output is
byte-identical no matter which surface produced it.  Label-keyed maps are
emitted in sorted order and floats use the shortest round-trip rendering.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from .costs import CostSchedule
from .dataset import Dataset, DatasetSummary
from .metrics import ConfusionSummary, LabelCounts, MetricReport, MetricTriple
from .optimizer import (
    OptimizationResult,
    OptimizerSettings,
    ParetoSolution,
)


def dumps(payload: Any) -> str:
    """Canonical JSON text: 2-space indent, no NaN/Infinity, newline-terminated."""
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def digest_of(payload: Any) -> str:
    compact = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(compact.encode("utf-8")).hexdigest()


def summary_payload(dataset: Dataset, summary: DatasetSummary) -> dict[str, Any]:
    return {
        "dataset_id": dataset.content_digest,
        "task": dataset.task.value,
        "positive_label": dataset.positive_label,
        "summary": {
            "record_count": summary.record_count,
            "label_count": summary.label_count,
            "per_label_positive_count": dict(sorted(summary.per_label_positive_count.items())),
            "score_histogram": {
                label: {"positive": list(hist.positive), "negative": list(hist.negative)}
                for label, hist in sorted(summary.score_histogram.items())
            },
        },
    }


def confusion_payload(summary: ConfusionSummary) -> dict[str, Any]:
    return {
        "per_label": {
            label: {"tp": counts.tp, "fp": counts.fp, "mp": counts.mp}
            for label, counts in sorted(summary.per_label.items())
        },
        "n_labels": summary.n_labels,
        "m_classes": summary.m_classes,
        "task": summary.task.value,
    }


def _triple_payload(triple: MetricTriple) -> dict[str, float]:
    return {"precision": triple.precision, "recall": triple.recall, "f1": triple.f1}


def metrics_payload(report: MetricReport) -> dict[str, Any]:
    return {
        "per_label": {
            label: {
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
                "degenerate": m.degenerate,
            }
            for label, m in sorted(report.per_label.items())
        },
        "micro": _triple_payload(report.micro),
        "macro": _triple_payload(report.macro),
        "abstain_count": report.abstain_count,
    }


def settings_payload(settings: OptimizerSettings) -> dict[str, Any]:
    return settings.to_payload()


def solution_payload(solution: ParetoSolution, vocabulary: tuple[str, ...]) -> dict[str, Any]:
    neg_tp, fp, mp = solution.objectives
    tp_count, fp_count, mp_count = solution.counts
    return {
        "thresholds": {label: t for label, t in sorted(zip(vocabulary, solution.thresholds))},
        "objectives": {"neg_tp": neg_tp, "fp": fp, "mp": mp},
        "counts": {"tp": tp_count, "fp": fp_count, "mp": mp_count},
        "rank": solution.rank,
        "crowding": None if math.isinf(solution.crowding) else solution.crowding,
    }


def result_payload(result: OptimizationResult, vocabulary: tuple[str, ...]) -> dict[str, Any]:
    provenance = result.provenance
    return {
        "front": [solution_payload(s, vocabulary) for s in result.front],
        "recommended_index": result.recommended_index,
        "provenance": {
            "dataset_digest": provenance.dataset_digest,
            "settings": settings_payload(provenance.settings),
            "rng_seed": provenance.settings.rng_seed,
            "schedule_digest": provenance.schedule_digest,
            "engine_version": provenance.engine_version,
        },
    }


def schedule_payload(schedule: CostSchedule | None) -> dict[str, Any] | None:
    return None if schedule is None else schedule.to_payload()


def counts_from_payload(payload: dict[str, Any]) -> dict[str, LabelCounts]:
    return {
        label: LabelCounts(tp=int(cell["tp"]), fp=int(cell["fp"]), mp=int(cell["mp"]))
        for label, cell in payload.items()
    }
