"""Benchmark CSV parsing, validation, and summary statistics.

The expected file layout is one header row ``[id,]truth,score:<L1>,...,score:<Lk>``
followed by one row per evaluated instance.  The ``truth`` cell holds a single
label (binary / multiclass) or a ``;``-joined list of labels (multilabel); each
``score:<label>`` cell holds that label's confidence in [0, 1].  Empty score
cells are read as 0.0 (a service that never returned the label expressed zero
confidence in it).
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np

HISTOGRAM_BINS = 20
SCORE_PREFIX = "score:"

_LABEL_RE = re.compile(r"^[A-Za-z0-9_-]+$")


class TaskKind(str, Enum):
    BINARY = "binary"
    MULTICLASS = "multiclass"
    MULTILABEL = "multilabel"


def coerce_task(task: TaskKind | str) -> TaskKind:
    try:
        return TaskKind(task)
    except ValueError:
        valid = ", ".join(t.value for t in TaskKind)
        raise DatasetError(f"unknown task {task!r}; expected one of: {valid}") from None


class DatasetError(ValueError):
    """A benchmark CSV violates the expected grammar or a dataset invariant."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class BenchmarkRecord:
    record_id: str
    truth: frozenset[str]
    scores: dict[str, float]  # one entry per vocabulary label


@dataclass(frozen=True)
class Dataset:
    records: tuple[BenchmarkRecord, ...]
    vocabulary: tuple[str, ...]
    task: TaskKind
    positive_label: str | None
    content_digest: str

    @property
    def record_count(self) -> int:
        return len(self.records)

    @property
    def negative_label(self) -> str:
        if self.task is not TaskKind.BINARY:
            raise ValueError("negative_label is only defined for binary datasets")
        a, b = self.vocabulary
        return b if a == self.positive_label else a

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.vocabulary)}

    @cached_property
    def score_matrix(self) -> np.ndarray:
        """(records x labels) float array in vocabulary order."""
        m = np.empty((len(self.records), len(self.vocabulary)), dtype=np.float64)
        for i, rec in enumerate(self.records):
            for j, label in enumerate(self.vocabulary):
                m[i, j] = rec.scores[label]
        m.setflags(write=False)
        return m

    @cached_property
    def truth_matrix(self) -> np.ndarray:
        """(records x labels) bool array; True where the label is in the record's truth."""
        m = np.zeros((len(self.records), len(self.vocabulary)), dtype=bool)
        index = self.label_index
        for i, rec in enumerate(self.records):
            for label in rec.truth:
                m[i, index[label]] = True
        m.setflags(write=False)
        return m

    @cached_property
    def argmax_column(self) -> np.ndarray:
        """Per-record index of the highest-scoring label, ties broken by label name.

        Thresholds never change which label wins, so this is computed once.
        """
        name_order = np.argsort(np.asarray(self.vocabulary, dtype=object))
        by_name = self.score_matrix[:, name_order]
        winners = name_order[np.argmax(by_name, axis=1)]
        winners.setflags(write=False)
        return winners


@dataclass(frozen=True)
class LabelHistogram:
    positive: tuple[int, ...]  # records whose truth contains the label
    negative: tuple[int, ...]


@dataclass(frozen=True)
class DatasetSummary:
    record_count: int
    label_count: int
    per_label_positive_count: dict[str, int]
    score_histogram: dict[str, LabelHistogram]


def _split_line(line: str) -> list[str]:
    return [cell.strip() for cell in line.split(",")]


def _parse_header(cells: list[str]) -> tuple[bool, tuple[str, ...]]:
    has_id = bool(cells) and cells[0] == "id"
    body = cells[1:] if has_id else cells
    if not body or body[0] != "truth":
        raise DatasetError("header must be '[id,]truth,score:<label>,...'", line=1)
    labels: list[str] = []
    for cell in body[1:]:
        if not cell.startswith(SCORE_PREFIX):
            raise DatasetError(f"unexpected column {cell!r}; only score:<label> columns may follow truth", line=1)
        label = cell[len(SCORE_PREFIX):].strip()
        if not _LABEL_RE.match(label):
            raise DatasetError(f"invalid label name {label!r} (allowed: [A-Za-z0-9_-]+)", line=1)
        if label in labels:
            raise DatasetError(f"duplicate score column for label {label!r}", line=1)
        labels.append(label)
    if not labels:
        raise DatasetError("header has no score:<label> columns", line=1)
    return has_id, tuple(labels)


def _parse_score(cell: str, line: int) -> float:
    if cell == "":
        return 0.0
    try:
        value = float(cell)
    except ValueError:
        raise DatasetError(f"non-numeric score {cell!r}", line=line) from None
    if not math.isfinite(value):
        raise DatasetError(f"non-numeric score {cell!r}", line=line)
    if value < 0.0 or value > 1.0:
        raise DatasetError(f"score out of range [0, 1]: {cell}", line=line)
    return value


def _parse_truth(cell: str, vocabulary: tuple[str, ...], task: TaskKind, line: int) -> frozenset[str]:
    if cell == "":
        raise DatasetError("empty truth cell", line=line)
    labels = frozenset(part.strip() for part in cell.split(";") if part.strip())
    if not labels:
        raise DatasetError("empty truth cell", line=line)
    for label in labels:
        if label not in vocabulary:
            raise DatasetError(f"truth label {label!r} has no score column", line=line)
    if task is not TaskKind.MULTILABEL and len(labels) != 1:
        raise DatasetError(f"{task.value} task requires exactly one truth label per record, got {len(labels)}", line=line)
    return labels


def parse_dataset(
    csv_bytes: bytes,
    task: TaskKind | str,
    positive_label: str | None = None,
) -> Dataset:
    """Parse and validate a benchmark CSV, preserving row order.

    The content digest is computed over the exact input bytes, so byte-equal
    files map to equal digests and any perturbation changes the digest.

    Raises:
        DatasetError: on any grammar violation, carrying the 1-based file line
            number where the problem was found (when attributable to a line).
    """
    task = coerce_task(task)
    digest = hashlib.sha256(csv_bytes).hexdigest()
    try:
        text = csv_bytes.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DatasetError(f"input is not valid UTF-8: {exc}") from None
    if text.startswith("﻿"):
        text = text[1:]

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    lines = [line[:-1] if line.endswith("\r") else line for line in lines]
    if not lines:
        raise DatasetError("empty input: missing header row")

    header_cells = _split_line(lines[0])
    has_id, vocabulary = _parse_header(header_cells)
    if len(vocabulary) < 2:
        raise DatasetError("vocabulary must contain at least 2 labels (add another score:<label> column)", line=1)

    if task is TaskKind.BINARY:
        if positive_label is None:
            raise DatasetError("binary task requires a positive_label")
        if len(vocabulary) != 2:
            raise DatasetError(f"binary task requires exactly 2 score columns, got {len(vocabulary)}", line=1)
        if positive_label not in vocabulary:
            raise DatasetError(f"positive_label {positive_label!r} is not a score column")
    elif positive_label is not None:
        raise DatasetError(f"positive_label is only valid for binary tasks, not {task.value}")

    expected_cells = len(header_cells)
    records: list[BenchmarkRecord] = []
    seen_ids: set[str] = set()
    for row_index, line in enumerate(lines[1:]):
        line_no = row_index + 2
        cells = _split_line(line)
        if len(cells) != expected_cells:
            raise DatasetError(f"expected {expected_cells} cells, got {len(cells)}", line=line_no)
        if has_id:
            record_id = cells[0]
            if record_id == "":
                raise DatasetError("empty id cell", line=line_no)
            body = cells[1:]
        else:
            record_id = str(row_index)
            body = cells
        if record_id in seen_ids:
            raise DatasetError(f"duplicate record_id {record_id!r}", line=line_no)
        seen_ids.add(record_id)
        truth = _parse_truth(body[0], vocabulary, task, line_no)
        scores = {label: _parse_score(cell, line_no) for label, cell in zip(vocabulary, body[1:])}
        records.append(BenchmarkRecord(record_id=record_id, truth=truth, scores=scores))

    if not records:
        raise DatasetError("dataset has no records")

    return Dataset(
        records=tuple(records),
        vocabulary=vocabulary,
        task=task,
        positive_label=positive_label,
        content_digest=digest,
    )


def to_canonical_csv(dataset: Dataset) -> bytes:
    """Serialize to the canonical wide CSV: explicit id column, vocabulary-ordered
    score columns, sorted multilabel truth cells, shortest round-trip floats."""
    out = ["id,truth," + ",".join(SCORE_PREFIX + label for label in dataset.vocabulary)]
    for rec in dataset.records:
        truth = ";".join(sorted(rec.truth))
        scores = ",".join(repr(rec.scores[label]) for label in dataset.vocabulary)
        out.append(f"{rec.record_id},{truth},{scores}")
    return ("\n".join(out) + "\n").encode("utf-8")


def summarize(dataset: Dataset) -> DatasetSummary:
    """Per-label positive counts and 20-bin score histograms split by truth membership."""
    scores = dataset.score_matrix
    truth = dataset.truth_matrix
    bins = np.clip((scores * HISTOGRAM_BINS).astype(int), 0, HISTOGRAM_BINS - 1)

    positive_count: dict[str, int] = {}
    histogram: dict[str, LabelHistogram] = {}
    for j, label in enumerate(dataset.vocabulary):
        is_pos = truth[:, j]
        pos_bins = np.bincount(bins[is_pos, j], minlength=HISTOGRAM_BINS)
        neg_bins = np.bincount(bins[~is_pos, j], minlength=HISTOGRAM_BINS)
        positive_count[label] = int(is_pos.sum())
        histogram[label] = LabelHistogram(
            positive=tuple(int(c) for c in pos_bins),
            negative=tuple(int(c) for c in neg_bins),
        )

    return DatasetSummary(
        record_count=dataset.record_count,
        label_count=len(dataset.vocabulary),
        per_label_positive_count=positive_count,
        score_histogram=histogram,
    )
