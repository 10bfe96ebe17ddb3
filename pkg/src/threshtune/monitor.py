"""Headless re-evaluation of a stored profile against fresh benchmark data.

Regression is judged on relative F1 drop (micro plus per-label for labels with
baseline support) against the baseline embedded in the profile.  Cost deltas
are always reported but only gate the verdict when a cost tolerance is passed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any

from .dataset import Dataset
from .evaluation import evaluate_dataset
from .metrics import MetricReport
from .payloads import metrics_payload
from .profiles import ProfileDocument
from .thresholding import UnknownLabelWarning

DEFAULT_TOLERANCE = 0.05

VERDICT_PASS = "pass"
VERDICT_REGRESS = "regress"


class MonitorError(ValueError):
    """The profile/dataset pair cannot be compared."""


@dataclass(frozen=True)
class MetricDelta:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class Violation:
    scope: str          # label name, "micro", or "aggregate"
    metric: str
    baseline: float
    current: float
    relative_drop: float  # (baseline - current) / baseline; negative when the metric rose


@dataclass(frozen=True)
class RegressionReport:
    verdict: str
    tolerance: float
    cost_tolerance: float | None
    violations: tuple[Violation, ...]
    baseline_metrics: MetricReport
    current_metrics: MetricReport
    baseline_cost: float | None
    current_cost: float | None
    per_label_deltas: dict[str, MetricDelta]
    warnings: tuple[str, ...]


def monitor_compare(
    profile: ProfileDocument,
    dataset: Dataset,
    tolerance: float = DEFAULT_TOLERANCE,
    cost_tolerance: float | None = None,
) -> RegressionReport:
    """Apply the profile to the dataset and flag metric drops beyond tolerance.

    Raises MonitorError when the profile has no baseline, the tasks disagree,
    or the profile's labels are entirely disjoint from the dataset vocabulary.
    """
    if not (0.0 <= tolerance <= 1.0):
        raise MonitorError(f"tolerance out of range [0, 1]: {tolerance}")
    if profile.baseline is None:
        raise MonitorError("profile has no baseline metrics; export it with a baseline to enable monitoring")
    if profile.task is not dataset.task:
        raise MonitorError(f"profile task {profile.task.value!r} does not match dataset task {dataset.task.value!r}")
    if profile.task.value == "binary" and profile.positive_label != dataset.positive_label:
        raise MonitorError(
            f"profile positive_label {profile.positive_label!r} does not match dataset {dataset.positive_label!r}"
        )

    vocabulary = set(dataset.vocabulary)
    profile_labels = set(profile.thresholds)
    if profile_labels and not (profile_labels & vocabulary):
        raise MonitorError("profile thresholds and dataset vocabulary are disjoint; wrong dataset?")

    coverage_warnings = [
        f"profile threshold for {label!r} has no matching label in the dataset"
        for label in sorted(profile_labels - vocabulary)
    ]

    with warnings.catch_warnings():
        # Coverage gaps are reported structurally in the returned report.
        warnings.simplefilter("ignore", UnknownLabelWarning)
        outcome = evaluate_dataset(dataset, profile.to_threshold_profile(), profile.costs)

    baseline = profile.baseline
    current_metrics = outcome.metrics
    baseline_metrics = baseline.metrics

    deltas: dict[str, MetricDelta] = {}
    for label in sorted(set(baseline_metrics.per_label) & set(current_metrics.per_label)):
        b = baseline_metrics.per_label[label]
        c = current_metrics.per_label[label]
        deltas[label] = MetricDelta(
            precision=c.precision - b.precision,
            recall=c.recall - b.recall,
            f1=c.f1 - b.f1,
        )

    violations: list[Violation] = []

    def check(scope: str, metric: str, base: float, current: float, limit: float) -> None:
        if base <= 0:
            return
        drop = (base - current) / base
        if drop > limit:
            violations.append(Violation(scope=scope, metric=metric, baseline=base, current=current, relative_drop=drop))

    check("micro", "f1", baseline_metrics.micro.f1, current_metrics.micro.f1, tolerance)
    for label in sorted(baseline_metrics.per_label):
        support = 0
        if label in baseline.confusion.per_label:
            counts = baseline.confusion.per_label[label]
            support = counts.tp + counts.mp
        if support > 0 and label in current_metrics.per_label:
            check(label, "f1", baseline_metrics.per_label[label].f1, current_metrics.per_label[label].f1, tolerance)

    if cost_tolerance is not None and baseline.total_cost is not None and outcome.total_cost is not None:
        base_cost = baseline.total_cost
        if base_cost > 0:
            drop = (base_cost - outcome.total_cost) / base_cost
            if -drop > cost_tolerance:  # cost rose beyond tolerance
                violations.append(Violation(
                    scope="aggregate",
                    metric="total_cost",
                    baseline=base_cost,
                    current=outcome.total_cost,
                    relative_drop=drop,
                ))

    return RegressionReport(
        verdict=VERDICT_REGRESS if violations else VERDICT_PASS,
        tolerance=tolerance,
        cost_tolerance=cost_tolerance,
        violations=tuple(violations),
        baseline_metrics=baseline_metrics,
        current_metrics=current_metrics,
        baseline_cost=baseline.total_cost,
        current_cost=outcome.total_cost,
        per_label_deltas=deltas,
        warnings=tuple(coverage_warnings),
    )


def report_payload(report: RegressionReport) -> dict[str, Any]:
    return {
        "verdict": report.verdict,
        "tolerance": report.tolerance,
        "cost_tolerance": report.cost_tolerance,
        "violations": [
            {
                "scope": v.scope,
                "metric": v.metric,
                "baseline": v.baseline,
                "current": v.current,
                "relative_drop": v.relative_drop,
            }
            for v in report.violations
        ],
        "baseline_metrics": metrics_payload(report.baseline_metrics),
        "current_metrics": metrics_payload(report.current_metrics),
        "baseline_cost": report.baseline_cost,
        "current_cost": report.current_cost,
        "per_label_deltas": {
            label: {"precision": d.precision, "recall": d.recall, "f1": d.f1}
            for label, d in sorted(report.per_label_deltas.items())
        },
        "warnings": list(report.warnings),
    }
