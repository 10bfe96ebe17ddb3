"""Map confusion summaries to scalar monetary cost via per-label weights."""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass
from typing import Any, Mapping

from .metrics import ConfusionSummary


class CostScheduleError(ValueError):
    """A cost schedule payload is malformed or violates an invariant."""


class UnknownCostLabelWarning(UserWarning):
    """Schedule lists labels the evaluated summary does not contain."""


@dataclass(frozen=True)
class LabelCost:
    correct: float = 0.0           # may be negative: a reward per true positive
    false_positive: float = 1.0
    missed_positive: float = 1.0

    def __post_init__(self):
        if self.false_positive < 0 or self.missed_positive < 0:
            raise CostScheduleError("error costs (false_positive, missed_positive) must be >= 0")


DEFAULT_LABEL_COST = LabelCost()


@dataclass(frozen=True)
class CostSchedule:
    per_label: dict[str, LabelCost]
    currency_tag: str = ""

    def cost_for(self, label: str) -> LabelCost:
        return self.per_label.get(label, DEFAULT_LABEL_COST)

    def to_payload(self) -> dict[str, Any]:
        return {
            "currency_tag": self.currency_tag,
            "per_label": {
                label: {
                    "correct": cost.correct,
                    "false_positive": cost.false_positive,
                    "missed_positive": cost.missed_positive,
                }
                for label, cost in sorted(self.per_label.items())
            },
        }

    def digest(self) -> str:
        canonical = json.dumps(self.to_payload(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def schedule_from_payload(payload: Mapping[str, Any]) -> CostSchedule:
    """Parse the cost-schedule table used in settings files and profile documents."""
    if not isinstance(payload, Mapping):
        raise CostScheduleError("cost schedule must be an object")
    per_label_raw = payload.get("per_label", {})
    if not isinstance(per_label_raw, Mapping):
        raise CostScheduleError("cost schedule 'per_label' must be an object keyed by label")
    per_label: dict[str, LabelCost] = {}
    for label, cell in per_label_raw.items():
        if not isinstance(cell, Mapping):
            raise CostScheduleError(f"cost entry for {label!r} must be an object")
        try:
            per_label[label] = LabelCost(
                correct=float(cell.get("correct", 0.0)),
                false_positive=float(cell.get("false_positive", 1.0)),
                missed_positive=float(cell.get("missed_positive", 1.0)),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, CostScheduleError):
                raise
            raise CostScheduleError(f"cost entry for {label!r} holds a non-numeric value") from None
    currency = payload.get("currency_tag", "")
    if not isinstance(currency, str):
        raise CostScheduleError("currency_tag must be a string")
    return CostSchedule(per_label=per_label, currency_tag=currency)


def parse_schedule(data: bytes) -> CostSchedule:
    try:
        payload = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CostScheduleError(f"cost schedule is not valid JSON: {exc}") from None
    return schedule_from_payload(payload)


def total_cost(summary: ConfusionSummary, schedule: CostSchedule) -> float:
    """Sum of tp*correct + fp*false_positive + mp*missed_positive over all labels.

    Labels missing from the schedule use the default weights (0, 1, 1); schedule
    labels missing from the summary are tolerated with a warning.
    """
    unknown = set(schedule.per_label) - set(summary.per_label)
    if unknown:
        warnings.warn(
            f"cost schedule lists labels absent from the evaluated data: {sorted(unknown)}",
            UnknownCostLabelWarning,
            stacklevel=2,
        )
    cost = 0.0
    for label, counts in summary.per_label.items():
        weights = schedule.cost_for(label)
        cost += counts.tp * weights.correct
        cost += counts.fp * weights.false_positive
        cost += counts.mp * weights.missed_positive
    return cost
