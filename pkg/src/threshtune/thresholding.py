"""Apply global or per-label decision thresholds to a scored dataset.

All comparisons are inclusive (``score >= threshold``), so a threshold of 0.0
means "accept everything" and raising a label's threshold can only shrink the
set of records that emit it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping, Sequence

import numpy as np

from .dataset import Dataset, TaskKind, coerce_task


class TaskMismatchError(ValueError):
    """Profile and dataset disagree on task kind or positive label."""


class UnknownLabelWarning(UserWarning):
    """Profile carries thresholds for labels the dataset does not know."""


@dataclass(frozen=True)
class ThresholdProfile:
    """Per-label thresholds plus a default for labels absent from the map."""

    thresholds: dict[str, float]
    default_threshold: float
    task: TaskKind
    positive_label: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "task", coerce_task(self.task))
        for label, value in self.thresholds.items():
            _check_range(value, f"threshold for {label!r}")
        _check_range(self.default_threshold, "default_threshold")
        if self.task is TaskKind.BINARY and self.positive_label is None:
            raise ValueError("binary profiles require a positive_label")

    def threshold_for(self, label: str) -> float:
        return self.thresholds.get(label, self.default_threshold)


def _check_range(value: float, what: str) -> None:
    if not (0.0 <= value <= 1.0):
        raise ValueError(f"{what} out of range [0, 1]: {value}")


def global_profile(dataset: Dataset, threshold: float) -> ThresholdProfile:
    """A single global threshold applied to every label of the dataset."""
    return ThresholdProfile(
        thresholds={},
        default_threshold=threshold,
        task=dataset.task,
        positive_label=dataset.positive_label,
    )


def profile_for(dataset: Dataset, thresholds: Mapping[str, float] | Sequence[float],
                default_threshold: float = 0.5) -> ThresholdProfile:
    """Build a profile for a dataset from a label map or a vocabulary-ordered vector."""
    if not isinstance(thresholds, Mapping):
        if len(thresholds) != len(dataset.vocabulary):
            raise ValueError(f"expected {len(dataset.vocabulary)} thresholds, got {len(thresholds)}")
        thresholds = dict(zip(dataset.vocabulary, thresholds))
    return ThresholdProfile(
        thresholds={label: float(v) for label, v in thresholds.items()},
        default_threshold=default_threshold,
        task=dataset.task,
        positive_label=dataset.positive_label,
    )


@dataclass(frozen=True, eq=False)
class DecisionSet:
    """Per-record emitted label sets, aligned by index with the dataset's records.

    ``mask`` is the (records x vocabulary) boolean emission matrix; ``emitted``
    materializes it as frozensets on first use.
    """

    mask: np.ndarray = field(repr=False)
    vocabulary: tuple[str, ...]

    def __post_init__(self):
        self.mask.setflags(write=False)

    @cached_property
    def emitted(self) -> tuple[frozenset[str], ...]:
        vocab = self.vocabulary
        return tuple(
            frozenset(vocab[j] for j in np.nonzero(row)[0])
            for row in self.mask
        )

    def __len__(self) -> int:
        return self.mask.shape[0]

    def __getitem__(self, index: int) -> frozenset[str]:
        return self.emitted[index]

    def __iter__(self) -> Iterator[frozenset[str]]:
        return iter(self.emitted)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DecisionSet):
            return NotImplemented
        return self.vocabulary == other.vocabulary and np.array_equal(self.mask, other.mask)


def decide(dataset: Dataset, profile: ThresholdProfile) -> DecisionSet:
    """Apply the profile's thresholds to every record.

    Decision rules, with t(L) = profile threshold for label L:
      - multilabel: emit every L with score(L) >= t(L)
      - multiclass: emit the argmax label (name-ordered tie break) if its score
        clears its threshold, otherwise abstain (empty set)
      - binary: emit the positive label if its score clears its threshold,
        otherwise the negative label (always decides)
    """
    if profile.task is not dataset.task:
        raise TaskMismatchError(f"profile task {profile.task.value!r} does not match dataset task {dataset.task.value!r}")
    if dataset.task is TaskKind.BINARY and profile.positive_label != dataset.positive_label:
        raise TaskMismatchError(
            f"profile positive_label {profile.positive_label!r} does not match dataset positive_label {dataset.positive_label!r}"
        )
    unknown = set(profile.thresholds) - set(dataset.vocabulary)
    if unknown:
        warnings.warn(
            f"profile thresholds for labels not in the dataset vocabulary are ignored: {sorted(unknown)}",
            UnknownLabelWarning,
            stacklevel=2,
        )

    scores = dataset.score_matrix
    cutoffs = np.array([profile.threshold_for(label) for label in dataset.vocabulary])

    if dataset.task is TaskKind.MULTILABEL:
        mask = scores >= cutoffs
    elif dataset.task is TaskKind.MULTICLASS:
        winners = dataset.argmax_column
        rows = np.arange(len(dataset.records))
        accepted = scores[rows, winners] >= cutoffs[winners]
        mask = np.zeros(scores.shape, dtype=bool)
        mask[rows[accepted], winners[accepted]] = True
    else:
        pos = dataset.label_index[dataset.positive_label]
        neg = dataset.label_index[dataset.negative_label]
        is_positive = scores[:, pos] >= cutoffs[pos]
        mask = np.zeros(scores.shape, dtype=bool)
        mask[is_positive, pos] = True
        mask[~is_positive, neg] = True

    return DecisionSet(mask=mask, vocabulary=dataset.vocabulary)
