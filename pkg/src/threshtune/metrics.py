"""Three-construct confusion summaries and derived quality metrics.

The confusion summary stores exactly three counts per label (true positives,
false positives, missed positives); true negatives are deliberately dropped,
which is what keeps the multi-label payload at 3 numbers per label instead of
a full matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset, TaskKind
from .thresholding import DecisionSet


class AlignmentError(ValueError):
    """Decisions are not aligned with the dataset they claim to describe."""


@dataclass(frozen=True)
class LabelCounts:
    tp: int
    fp: int
    mp: int


@dataclass(frozen=True)
class ConfusionSummary:
    per_label: dict[str, LabelCounts]
    n_labels: int
    m_classes: int
    task: TaskKind

    @property
    def total_tp(self) -> int:
        return sum(c.tp for c in self.per_label.values())

    @property
    def total_fp(self) -> int:
        return sum(c.fp for c in self.per_label.values())

    @property
    def total_mp(self) -> int:
        return sum(c.mp for c in self.per_label.values())


@dataclass(frozen=True)
class MetricTriple:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    degenerate: bool  # a zero denominator forced a 0.0 value above


@dataclass(frozen=True)
class MetricReport:
    per_label: dict[str, LabelMetrics]
    micro: MetricTriple
    macro: MetricTriple
    abstain_count: int | None  # multiclass only


def confusion(dataset: Dataset, decisions: DecisionSet) -> ConfusionSummary:
    """Count per-label (tp, fp, mp) from the emission mask.

    tp: emitted and in truth; fp: emitted, not in truth; mp: in truth, not emitted.
    """
    if len(decisions) != dataset.record_count:
        raise AlignmentError(f"decisions cover {len(decisions)} records, dataset has {dataset.record_count}")
    if decisions.vocabulary != dataset.vocabulary:
        raise AlignmentError("decisions vocabulary does not match dataset vocabulary")

    emitted = decisions.mask
    truth = dataset.truth_matrix
    tp = (emitted & truth).sum(axis=0)
    fp = (emitted & ~truth).sum(axis=0)
    mp = (~emitted & truth).sum(axis=0)

    per_label = {
        label: LabelCounts(tp=int(tp[j]), fp=int(fp[j]), mp=int(mp[j]))
        for j, label in enumerate(dataset.vocabulary)
    }
    return ConfusionSummary(
        per_label=per_label,
        n_labels=len(dataset.vocabulary),
        m_classes=len(dataset.vocabulary),
        task=dataset.task,
    )


def _safe_ratio(numerator: int, denominator: int) -> tuple[float, bool]:
    if denominator == 0:
        return 0.0, True
    return numerator / denominator, False


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def metrics_from_confusion(summary: ConfusionSummary) -> MetricReport:
    """Precision / recall / F1 per label plus micro and macro aggregates.

    Zero-denominator values are reported as 0.0 with the label flagged as
    degenerate, never as a silent 1.0: "no predictions made" must surface.
    """
    per_label: dict[str, LabelMetrics] = {}
    for label, counts in summary.per_label.items():
        precision, p_degenerate = _safe_ratio(counts.tp, counts.tp + counts.fp)
        recall, r_degenerate = _safe_ratio(counts.tp, counts.tp + counts.mp)
        per_label[label] = LabelMetrics(
            precision=precision,
            recall=recall,
            f1=_f1(precision, recall),
            degenerate=p_degenerate or r_degenerate,
        )

    tp, fp, mp = summary.total_tp, summary.total_fp, summary.total_mp
    micro_precision, _ = _safe_ratio(tp, tp + fp)
    micro_recall, _ = _safe_ratio(tp, tp + mp)
    micro = MetricTriple(micro_precision, micro_recall, _f1(micro_precision, micro_recall))

    n = len(per_label)
    macro = MetricTriple(
        precision=sum(m.precision for m in per_label.values()) / n if n else 0.0,
        recall=sum(m.recall for m in per_label.values()) / n if n else 0.0,
        f1=sum(m.f1 for m in per_label.values()) / n if n else 0.0,
    )

    abstain_count = None
    if summary.task is TaskKind.MULTICLASS:
        # Each record carries one truth label and emits at most one label, so
        # abstentions = records - emissions = total mp - total fp.
        abstain_count = mp - fp

    return MetricReport(per_label=per_label, micro=micro, macro=macro, abstain_count=abstain_count)
