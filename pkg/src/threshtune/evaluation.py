"""One-call evaluation of a threshold profile against a dataset."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .costs import CostSchedule, total_cost
from .dataset import Dataset
from .metrics import ConfusionSummary, MetricReport, confusion, metrics_from_confusion
from .payloads import confusion_payload, metrics_payload
from .thresholding import ThresholdProfile, decide


@dataclass(frozen=True)
class EvaluationOutcome:
    confusion: ConfusionSummary
    metrics: MetricReport
    total_cost: float | None


def evaluate_dataset(
    dataset: Dataset,
    profile: ThresholdProfile,
    schedule: CostSchedule | None = None,
) -> EvaluationOutcome:
    summary = confusion(dataset, decide(dataset, profile))
    report = metrics_from_confusion(summary)
    cost = total_cost(summary, schedule) if schedule is not None else None
    return EvaluationOutcome(confusion=summary, metrics=report, total_cost=cost)


def evaluation_payload(outcome: EvaluationOutcome) -> dict[str, Any]:
    return {
        "confusion": confusion_payload(outcome.confusion),
        "metrics": metrics_payload(outcome.metrics),
        "total_cost": outcome.total_cost,
    }
