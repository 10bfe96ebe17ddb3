"""The exportable threshold configuration document (``.threshy.json``).

Serialization is canonical: fixed top-level key order, label maps sorted by
code point, shortest round-trip float rendering, newline-terminated.  Unknown
top-level fields survive a parse/serialize round trip so profiles written by
newer engines keep working.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Mapping

from .costs import CostSchedule, CostScheduleError, schedule_from_payload
from .dataset import Dataset, TaskKind
from .evaluation import evaluate_dataset
from .metrics import ConfusionSummary, LabelMetrics, MetricReport, MetricTriple
from .optimizer import OptimizerSettings
from .payloads import confusion_payload, counts_from_payload, dumps, metrics_payload, settings_payload
from .thresholding import ThresholdProfile
from .version import ENGINE_VERSION

PROFILE_FORMAT_VERSION = 1
PROFILE_SUFFIX = ".threshy.json"

_KNOWN_KEYS = (
    "format_version",
    "task",
    "positive_label",
    "thresholds",
    "default_threshold",
    "costs",
    "baseline",
    "provenance",
)

_RFC3339_RE = re.compile(r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(\.\d+)?(Z|[+-]\d{2}:\d{2})$")


class ProfileError(ValueError):
    """A profile document is malformed or violates an invariant."""


def utc_now_rfc3339() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class ProfileProvenance:
    dataset_digest: str
    settings: OptimizerSettings | None  # None: thresholds were set manually
    engine_version: str = ENGINE_VERSION
    created_at: str = "1970-01-01T00:00:00Z"


@dataclass(frozen=True)
class BaselineSnapshot:
    confusion: ConfusionSummary
    metrics: MetricReport
    total_cost: float | None


@dataclass(frozen=True)
class ProfileDocument:
    task: TaskKind
    thresholds: dict[str, float]
    default_threshold: float
    provenance: ProfileProvenance
    positive_label: str | None = None
    costs: CostSchedule | None = None
    baseline: BaselineSnapshot | None = None
    extra: dict[str, Any] = field(default_factory=dict)
    format_version: int = PROFILE_FORMAT_VERSION

    def to_threshold_profile(self) -> ThresholdProfile:
        return ThresholdProfile(
            thresholds=dict(self.thresholds),
            default_threshold=self.default_threshold,
            task=self.task,
            positive_label=self.positive_label,
        )


def make_baseline(dataset: Dataset, profile: ThresholdProfile, schedule: CostSchedule | None = None) -> BaselineSnapshot:
    """Snapshot the metrics the profile achieves on the dataset it was tuned on."""
    outcome = evaluate_dataset(dataset, profile, schedule)
    return BaselineSnapshot(confusion=outcome.confusion, metrics=outcome.metrics, total_cost=outcome.total_cost)


def export_profile(
    profile: ThresholdProfile,
    *,
    provenance: ProfileProvenance,
    baseline: BaselineSnapshot | None = None,
    costs: CostSchedule | None = None,
    extra: Mapping[str, Any] | None = None,
) -> bytes:
    """Build and canonically serialize a profile document; byte-stable for equal inputs."""
    document = ProfileDocument(
        task=profile.task,
        positive_label=profile.positive_label,
        thresholds=dict(profile.thresholds),
        default_threshold=profile.default_threshold,
        costs=costs,
        baseline=baseline,
        provenance=provenance,
        extra=dict(extra) if extra else {},
    )
    return serialize_profile(document)


def serialize_profile(document: ProfileDocument) -> bytes:
    provenance = document.provenance
    provenance_payload: dict[str, Any] = {"dataset_digest": provenance.dataset_digest}
    if provenance.settings is None:
        provenance_payload["settings"] = "manual"
    else:
        provenance_payload["settings"] = settings_payload(provenance.settings)
        provenance_payload["rng_seed"] = provenance.settings.rng_seed
    provenance_payload["engine_version"] = provenance.engine_version
    provenance_payload["created_at"] = provenance.created_at

    baseline_payload = None
    if document.baseline is not None:
        baseline_payload = {
            "confusion": confusion_payload(document.baseline.confusion),
            "metrics": metrics_payload(document.baseline.metrics),
            "total_cost": document.baseline.total_cost,
        }

    payload: dict[str, Any] = {
        "format_version": document.format_version,
        "task": document.task.value,
        "positive_label": document.positive_label,
        "thresholds": dict(sorted(document.thresholds.items())),
        "default_threshold": document.default_threshold,
        "costs": document.costs.to_payload() if document.costs is not None else None,
        "baseline": baseline_payload,
        "provenance": provenance_payload,
    }
    for key in sorted(document.extra):
        payload[key] = document.extra[key]
    return dumps(payload).encode("utf-8")


def _require(payload: Mapping[str, Any], key: str) -> Any:
    if key not in payload:
        raise ProfileError(f"profile document is missing required key {key!r}")
    return payload[key]


def _check_threshold(value: Any, what: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ProfileError(f"{what} must be a number, got {value!r}")
    if not (0.0 <= value <= 1.0):
        raise ProfileError(f"{what} out of range [0, 1]: {value}")
    return float(value)


def _parse_metric_triple(payload: Mapping[str, Any], what: str) -> MetricTriple:
    try:
        return MetricTriple(
            precision=float(payload["precision"]),
            recall=float(payload["recall"]),
            f1=float(payload["f1"]),
        )
    except (KeyError, TypeError, ValueError):
        raise ProfileError(f"malformed {what} metric triple") from None


def _parse_baseline(payload: Mapping[str, Any]) -> BaselineSnapshot:
    try:
        confusion_raw = payload["confusion"]
        per_label = counts_from_payload(confusion_raw["per_label"])
        summary = ConfusionSummary(
            per_label=per_label,
            n_labels=int(confusion_raw["n_labels"]),
            m_classes=int(confusion_raw["m_classes"]),
            task=TaskKind(confusion_raw["task"]),
        )
        metrics_raw = payload["metrics"]
        report = MetricReport(
            per_label={
                label: LabelMetrics(
                    precision=float(cell["precision"]),
                    recall=float(cell["recall"]),
                    f1=float(cell["f1"]),
                    degenerate=bool(cell["degenerate"]),
                )
                for label, cell in metrics_raw["per_label"].items()
            },
            micro=_parse_metric_triple(metrics_raw["micro"], "micro"),
            macro=_parse_metric_triple(metrics_raw["macro"], "macro"),
            abstain_count=None if metrics_raw["abstain_count"] is None else int(metrics_raw["abstain_count"]),
        )
        cost = payload["total_cost"]
    except ProfileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ProfileError(f"malformed baseline section: {exc}") from None
    for label, counts in summary.per_label.items():
        if counts.tp < 0 or counts.fp < 0 or counts.mp < 0:
            raise ProfileError(f"baseline counts for {label!r} must be non-negative")
    return BaselineSnapshot(confusion=summary, metrics=report, total_cost=None if cost is None else float(cost))


def _parse_provenance(payload: Mapping[str, Any]) -> ProfileProvenance:
    if not isinstance(payload, Mapping):
        raise ProfileError("provenance must be an object")
    digest = _require(payload, "dataset_digest")
    settings_raw = _require(payload, "settings")
    created_at = _require(payload, "created_at")
    engine_version = _require(payload, "engine_version")
    if not isinstance(created_at, str) or not _RFC3339_RE.match(created_at):
        raise ProfileError(f"provenance created_at is not an RFC-3339 timestamp: {created_at!r}")
    if settings_raw == "manual":
        settings = None
    else:
        try:
            settings = OptimizerSettings(
                population_size=int(settings_raw["population_size"]),
                generations=int(settings_raw["generations"]),
                crossover_probability=float(settings_raw["crossover_probability"]),
                crossover_distribution_index=float(settings_raw["crossover_distribution_index"]),
                mutation_probability_per_gene=(
                    None
                    if settings_raw["mutation_probability_per_gene"] is None
                    else float(settings_raw["mutation_probability_per_gene"])
                ),
                mutation_distribution_index=float(settings_raw["mutation_distribution_index"]),
                rng_seed=int(_require(payload, "rng_seed")),
            )
        except (KeyError, TypeError, ValueError):
            raise ProfileError("malformed provenance settings") from None
    return ProfileProvenance(
        dataset_digest=str(digest),
        settings=settings,
        engine_version=str(engine_version),
        created_at=created_at,
    )


def parse_profile(data: bytes) -> ProfileDocument:
    """Parse and validate a profile document, preserving unknown top-level fields."""
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ProfileError(f"profile is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ProfileError("profile document must be a JSON object")
    return document_from_payload(payload)


def document_from_payload(payload: dict[str, Any]) -> ProfileDocument:
    version = _require(payload, "format_version")
    if version != PROFILE_FORMAT_VERSION:
        raise ProfileError(
            f"unsupported format_version {version!r}; supported versions: {PROFILE_FORMAT_VERSION}"
        )
    try:
        task = TaskKind(_require(payload, "task"))
    except ValueError:
        raise ProfileError(f"unknown task {payload.get('task')!r}") from None

    positive_label = payload.get("positive_label")
    if task is TaskKind.BINARY and positive_label is None:
        raise ProfileError("binary profiles require positive_label")
    if task is not TaskKind.BINARY and positive_label is not None:
        raise ProfileError(f"positive_label is only valid for binary profiles, not {task.value}")

    thresholds_raw = _require(payload, "thresholds")
    if not isinstance(thresholds_raw, Mapping):
        raise ProfileError("thresholds must be an object keyed by label")
    thresholds = {
        str(label): _check_threshold(value, f"threshold for {label!r}")
        for label, value in thresholds_raw.items()
    }
    default_threshold = _check_threshold(_require(payload, "default_threshold"), "default_threshold")

    costs_raw = payload.get("costs")
    try:
        costs = None if costs_raw is None else schedule_from_payload(costs_raw)
    except CostScheduleError as exc:
        raise ProfileError(str(exc)) from None

    baseline_raw = payload.get("baseline")
    baseline = None if baseline_raw is None else _parse_baseline(baseline_raw)

    provenance = _parse_provenance(_require(payload, "provenance"))
    extra = {key: value for key, value in payload.items() if key not in _KNOWN_KEYS}

    return ProfileDocument(
        format_version=int(version),
        task=task,
        positive_label=positive_label,
        thresholds=thresholds,
        default_threshold=default_threshold,
        costs=costs,
        baseline=baseline,
        provenance=provenance,
        extra=extra,
    )
