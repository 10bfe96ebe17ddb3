"""Per-label threshold search with the NSGA-II multi-objective genetic algorithm.

The genome is one real gene per vocabulary label (binary tasks optimize only
the positive-label gene; the other gene is pinned at 0 and excluded from the
operators).  Objectives are (-TP, FP, MP) summed over the vocabulary, all
minimized.  Binary tasks sum the positive label only: the negative label's row
mirrors the positive one (every error is one FP and one MP at once), so
including it would collapse the trade-off surface to a single total-error
axis.  Costs never enter the objectives; they only pick the recommended
solution off the Pareto front.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import numpy as np

from .costs import CostSchedule, total_cost
from .dataset import Dataset, TaskKind
from .metrics import confusion, metrics_from_confusion
from .thresholding import decide, profile_for
from .version import ENGINE_VERSION

Objectives = tuple[float, float, float]

_GENE_EPS = 1e-14


class OptimizationCancelled(RuntimeError):
    """Raised when a cooperative stop request interrupts the generational loop."""


class DegenerateDatasetWarning(UserWarning):
    """No label has a single positive record; threshold search is pointless."""


@dataclass(frozen=True)
class OptimizerSettings:
    population_size: int = 100
    generations: int = 50
    crossover_probability: float = 0.9
    crossover_distribution_index: float = 15.0
    mutation_probability_per_gene: float | None = None  # None: 1 / vocabulary size
    mutation_distribution_index: float = 20.0
    rng_seed: int = 42

    def validate(self) -> None:
        if self.population_size < 4 or self.population_size % 2 != 0:
            raise ValueError(f"population_size must be an even integer >= 4, got {self.population_size}")
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not (0.0 <= self.crossover_probability <= 1.0):
            raise ValueError(f"crossover_probability out of [0, 1]: {self.crossover_probability}")
        if self.mutation_probability_per_gene is not None and not (0.0 <= self.mutation_probability_per_gene <= 1.0):
            raise ValueError(f"mutation_probability_per_gene out of [0, 1]: {self.mutation_probability_per_gene}")
        if self.crossover_distribution_index <= 0:
            raise ValueError("crossover_distribution_index must be > 0")
        if self.mutation_distribution_index <= 0:
            raise ValueError("mutation_distribution_index must be > 0")
        if not (0 <= self.rng_seed < 2**64):
            raise ValueError("rng_seed must fit in an unsigned 64-bit integer")

    def to_payload(self) -> dict[str, Any]:
        return {
            "population_size": self.population_size,
            "generations": self.generations,
            "crossover_probability": self.crossover_probability,
            "crossover_distribution_index": self.crossover_distribution_index,
            "mutation_probability_per_gene": self.mutation_probability_per_gene,
            "mutation_distribution_index": self.mutation_distribution_index,
        }


@dataclass(frozen=True)
class ParetoSolution:
    thresholds: tuple[float, ...]   # one per vocabulary label, vocabulary order
    objectives: Objectives          # (-total TP, total FP, total MP)
    rank: int
    crowding: float

    @property
    def counts(self) -> tuple[int, int, int]:
        neg_tp, fp, mp = self.objectives
        return int(-neg_tp), int(fp), int(mp)


@dataclass(frozen=True)
class OptimizationProvenance:
    settings: OptimizerSettings
    dataset_digest: str
    schedule_digest: str | None
    engine_version: str


@dataclass(frozen=True)
class OptimizationResult:
    front: tuple[ParetoSolution, ...]
    recommended_index: int
    provenance: OptimizationProvenance

    @property
    def recommended(self) -> ParetoSolution:
        return self.front[self.recommended_index]


@dataclass(frozen=True)
class ProgressUpdate:
    generation: int
    generations_total: int
    best_objectives: Objectives
    front_objectives: tuple[Objectives, ...]


def fast_nondominated_sort(objectives: Sequence[Sequence[float]]) -> list[int]:
    """NSGA-II front ranks under minimization; 0 means non-dominated.

    Domination: <= in every coordinate and < in at least one.  Rank k+1 is
    defined on the set that remains after removing ranks <= k.
    """
    values = np.asarray(objectives, dtype=np.float64)
    if values.ndim != 2 or len(values) == 0:
        raise ValueError("expected a non-empty list of objective vectors")
    less_eq = (values[:, None, :] <= values[None, :, :]).all(axis=-1)
    less = (values[:, None, :] < values[None, :, :]).any(axis=-1)
    dominates = less_eq & less  # dominates[i, j]: i dominates j

    ranks = np.full(len(values), -1, dtype=np.int64)
    remaining = np.ones(len(values), dtype=bool)
    rank = 0
    while remaining.any():
        dominator_count = (dominates & remaining[:, None]).sum(axis=0)
        front = remaining & (dominator_count == 0)
        ranks[front] = rank
        remaining &= ~front
        rank += 1
    return [int(r) for r in ranks]


def crowding_distance(front_objectives: Sequence[Sequence[float]]) -> list[float]:
    """Diversity measure within one rank: normalized gap to objective-space neighbors.

    Boundary solutions per objective get +inf; a zero objective range contributes 0.
    """
    values = np.asarray(front_objectives, dtype=np.float64)
    n = len(values)
    if n <= 2:
        return [float("inf")] * n
    distance = np.zeros(n)
    for col in range(values.shape[1]):
        order = np.argsort(values[:, col], kind="stable")
        distance[order[0]] = float("inf")
        distance[order[-1]] = float("inf")
        span = values[order[-1], col] - values[order[0], col]
        if span > 0:
            gaps = (values[order[2:], col] - values[order[:-2], col]) / span
            distance[order[1:-1]] += gaps
    return [float(d) for d in distance]


def sbx_crossover(
    parent_a: Sequence[float],
    parent_b: Sequence[float],
    settings: OptimizerSettings,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Simulated-binary crossover, applied per gene with the configured probability.

    Children are a symmetric spread around the parent mean (child_a + child_b
    equals parent_a + parent_b before clamping to [0, 1]).
    """
    a = np.array(parent_a, dtype=np.float64)
    b = np.array(parent_b, dtype=np.float64)
    child_a = a.copy()
    child_b = b.copy()
    eta = settings.crossover_distribution_index
    for i in range(len(a)):
        if rng.random() >= settings.crossover_probability:
            continue
        if abs(a[i] - b[i]) <= _GENE_EPS:
            continue
        u = rng.random()
        if u <= 0.5:
            beta = (2.0 * u) ** (1.0 / (eta + 1.0))
        else:
            beta = (1.0 / (2.0 * (1.0 - u))) ** (1.0 / (eta + 1.0))
        mean = 0.5 * (a[i] + b[i])
        spread = 0.5 * beta * abs(a[i] - b[i])
        child_a[i] = mean - spread
        child_b[i] = mean + spread
    return np.clip(child_a, 0.0, 1.0), np.clip(child_b, 0.0, 1.0)


def polynomial_mutation(
    genes: Sequence[float],
    settings: OptimizerSettings,
    rng: np.random.Generator,
) -> np.ndarray:
    """Polynomial mutation against bounds [0, 1], clamped.

    When settings leave the per-gene probability unset it defaults to
    1 / len(genes).
    """
    out = np.array(genes, dtype=np.float64)
    probability = settings.mutation_probability_per_gene
    if probability is None:
        probability = 1.0 / len(out)
    eta = settings.mutation_distribution_index
    power = 1.0 / (eta + 1.0)
    for i in range(len(out)):
        if rng.random() >= probability:
            continue
        y = out[i]
        u = rng.random()
        if u < 0.5:
            base = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - y) ** (eta + 1.0)
            delta = base**power - 1.0
        else:
            base = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * y ** (eta + 1.0)
            delta = 1.0 - base**power
        out[i] = y + delta
    return np.clip(out, 0.0, 1.0)


def hypervolume(objectives: Sequence[Sequence[float]], reference: Sequence[float]) -> float:
    """Volume of objective space dominated by a 3-objective minimization front.

    Points that do not strictly dominate the reference point contribute nothing.
    Used as a convergence monitor: the evaluated front can only grow outward, so
    the hypervolume trace over generations must be non-decreasing.
    """
    ref = np.asarray(reference, dtype=np.float64)
    if ref.shape != (3,):
        raise ValueError("reference point must have 3 coordinates")
    points = np.asarray(objectives, dtype=np.float64).reshape(-1, 3)
    points = points[(points < ref).all(axis=1)]
    if len(points) == 0:
        return 0.0

    xs = np.unique(points[:, 0])
    edges = np.append(xs, ref[0])
    volume = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        active = points[points[:, 0] <= lo][:, 1:]
        volume += (hi - lo) * _staircase_area(active, ref[1], ref[2])
    return float(volume)


def _staircase_area(points: np.ndarray, ref_a: float, ref_b: float) -> float:
    # Union area of rectangles [a, ref_a] x [b, ref_b]; keep the Pareto staircase.
    order = np.lexsort((points[:, 1], points[:, 0]))
    stairs: list[tuple[float, float]] = []
    best_b = np.inf
    for a, b in points[order]:
        if b < best_b:
            stairs.append((a, b))
            best_b = b
    area = 0.0
    for i, (a, b) in enumerate(stairs):
        next_a = stairs[i + 1][0] if i + 1 < len(stairs) else ref_a
        area += (next_a - a) * (ref_b - b)
    return area


class _FastEvaluator:
    """Vectorized objective evaluation.

    For every task kind the per-label counts are step functions of that label's
    own threshold (in multiclass the argmax winner is threshold-independent, and
    in binary both labels' counts follow the positive gene), so a population is
    evaluated with sorted score arrays and searchsorted instead of re-deciding
    every record.
    """

    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.task = dataset.task
        scores = dataset.score_matrix
        truth = dataset.truth_matrix
        n_labels = len(dataset.vocabulary)

        if self.task is TaskKind.BINARY:
            pos_col = dataset.label_index[dataset.positive_label]
            positive_rows = truth[:, pos_col]
            self._pos_scores = np.sort(scores[positive_rows, pos_col])
            self._neg_scores = np.sort(scores[~positive_rows, pos_col])
            self.gene_columns = [pos_col]
            return

        if self.task is TaskKind.MULTICLASS:
            winners = dataset.argmax_column
            eligible = np.zeros_like(truth)
            eligible[np.arange(len(winners)), winners] = True
        else:
            eligible = np.ones_like(truth)

        self._pos_by_label: list[np.ndarray] = []
        self._neg_by_label: list[np.ndarray] = []
        self._positives = truth.sum(axis=0)
        for j in range(n_labels):
            self._pos_by_label.append(np.sort(scores[eligible[:, j] & truth[:, j], j]))
            self._neg_by_label.append(np.sort(scores[eligible[:, j] & ~truth[:, j], j]))
        self.gene_columns = list(range(n_labels))

    @staticmethod
    def _count_at_or_above(sorted_scores: np.ndarray, cutoffs: np.ndarray) -> np.ndarray:
        return len(sorted_scores) - np.searchsorted(sorted_scores, cutoffs, side="left")

    def population_objectives(self, genes: np.ndarray) -> np.ndarray:
        """(population x 3) objective matrix for (population x n_genes) gene rows."""
        genes = np.atleast_2d(genes)
        if self.task is TaskKind.BINARY:
            t = genes[:, 0]
            tp = self._count_at_or_above(self._pos_scores, t)
            fp = self._count_at_or_above(self._neg_scores, t)
            mp = len(self._pos_scores) - tp
        else:
            tp = np.zeros(len(genes), dtype=np.int64)
            fp = np.zeros(len(genes), dtype=np.int64)
            mp = np.zeros(len(genes), dtype=np.int64)
            for j in range(genes.shape[1]):
                t = genes[:, j]
                tp_j = self._count_at_or_above(self._pos_by_label[j], t)
                fp_j = self._count_at_or_above(self._neg_by_label[j], t)
                tp += tp_j
                fp += fp_j
                mp += int(self._positives[j]) - tp_j
        return np.stack([-tp, fp, mp], axis=1).astype(np.float64)

    def own_label_counts(self, gene_index: int, cutoffs: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(tp, fp, mp) arrays for one optimized label over an array of cutoffs."""
        if self.task is TaskKind.BINARY:
            pos, neg = self._pos_scores, self._neg_scores
            total = len(pos)
        else:
            col = self.gene_columns[gene_index]
            pos, neg = self._pos_by_label[col], self._neg_by_label[col]
            total = int(self._positives[col])
        tp = self._count_at_or_above(pos, cutoffs)
        fp = self._count_at_or_above(neg, cutoffs)
        return tp, fp, total - tp

    def candidate_cutoffs(self, gene_index: int) -> np.ndarray:
        col = self.gene_columns[gene_index]
        column = self.dataset.score_matrix[:, col]
        return np.unique(np.concatenate([column, [0.0, 1.0]]))


def _f1_greedy_member(evaluator: _FastEvaluator, n_genes: int) -> np.ndarray:
    """Per-label thresholds maximizing each label's own F1 (ties: lowest cutoff)."""
    member = np.empty(n_genes)
    for g in range(n_genes):
        cutoffs = evaluator.candidate_cutoffs(g)
        tp, fp, mp = evaluator.own_label_counts(g, cutoffs)
        denom = 2 * tp + fp + mp
        f1 = np.divide(2 * tp, denom, out=np.zeros(len(cutoffs)), where=denom > 0)
        member[g] = cutoffs[np.argmax(f1)]  # argmax keeps the first (lowest) cutoff on ties
    return member


def _initial_population(
    size: int, n_genes: int, rng: np.random.Generator, evaluator: _FastEvaluator
) -> np.ndarray:
    # Latin-hypercube style stratified genes, plus three heuristic members:
    # all-0.5, per-label F1-greedy, all-0.0.
    stratified_count = size - 3
    population = np.empty((size, n_genes))
    for j in range(n_genes):
        strata = rng.permutation(stratified_count)
        population[:stratified_count, j] = (strata + rng.random(stratified_count)) / stratified_count
    population[stratified_count] = 0.5
    population[stratified_count + 1] = _f1_greedy_member(evaluator, n_genes)
    population[stratified_count + 2] = 0.0
    return population


def _tournament(rng: np.random.Generator, size: int, ranks: np.ndarray, crowding: np.ndarray) -> int:
    i, j = rng.integers(0, size, size=2)
    if ranks[i] != ranks[j]:
        return int(i if ranks[i] < ranks[j] else j)
    if crowding[i] != crowding[j]:
        return int(i if crowding[i] > crowding[j] else j)
    return int(i)


def _crowding_by_rank(objectives: np.ndarray, ranks: np.ndarray) -> np.ndarray:
    crowding = np.zeros(len(objectives))
    for rank in np.unique(ranks):
        members = np.nonzero(ranks == rank)[0]
        crowding[members] = crowding_distance(objectives[members])
    return crowding


def _environmental_selection(
    objectives: np.ndarray, capacity: int
) -> tuple[np.ndarray, np.ndarray]:
    """Elitist survivor indices from parents + offspring, plus their front ranks."""
    ranks = np.asarray(fast_nondominated_sort(objectives))
    chosen: list[int] = []
    for rank in range(int(ranks.max()) + 1):
        members = [int(i) for i in np.nonzero(ranks == rank)[0]]
        if len(chosen) + len(members) <= capacity:
            chosen.extend(members)
        else:
            distances = crowding_distance(objectives[members])
            order = sorted(range(len(members)), key=lambda k: (-distances[k], members[k]))
            chosen.extend(members[k] for k in order[: capacity - len(chosen)])
        if len(chosen) == capacity:
            break
    idx = np.asarray(chosen)
    return idx, ranks[idx]


class _ParetoArchive:
    """Non-dominated set of every evaluated genome, deduplicated by objectives.

    Keeps the lexicographically smallest full threshold vector per objective
    triple, which makes optimizer output stable and diff-able and guarantees a
    non-decreasing hypervolume trace.
    """

    def __init__(self, n_thresholds: int):
        self.objectives = np.empty((0, 3))
        self.thresholds = np.empty((0, n_thresholds))

    def update(self, objectives: np.ndarray, thresholds: np.ndarray) -> None:
        all_obj = np.vstack([self.objectives, objectives])
        all_thr = np.vstack([self.thresholds, thresholds])
        less_eq = (all_obj[:, None, :] <= all_obj[None, :, :]).all(axis=-1)
        less = (all_obj[:, None, :] < all_obj[None, :, :]).any(axis=-1)
        nondominated = ~np.any(less_eq & less, axis=0)
        all_obj = all_obj[nondominated]
        all_thr = all_thr[nondominated]
        # Lexicographic sort by (objectives, thresholds); first row per triple wins.
        table = np.hstack([all_obj, all_thr])
        order = np.lexsort(table.T[::-1])
        all_obj = all_obj[order]
        all_thr = all_thr[order]
        keep = np.ones(len(all_obj), dtype=bool)
        keep[1:] = np.any(all_obj[1:] != all_obj[:-1], axis=1)
        self.objectives = all_obj[keep]
        self.thresholds = all_thr[keep]

    def snapshot(self) -> tuple[Objectives, ...]:
        return tuple(tuple(float(v) for v in row) for row in self.objectives)


def objectives_from_summary(dataset: Dataset, summary) -> Objectives:
    """(-TP, FP, MP) for optimization purposes; positive label only in binary mode."""
    if dataset.task is TaskKind.BINARY:
        counts = summary.per_label[dataset.positive_label]
        return (-float(counts.tp), float(counts.fp), float(counts.mp))
    return (-float(summary.total_tp), float(summary.total_fp), float(summary.total_mp))


def evaluate_thresholds(dataset: Dataset, thresholds: Sequence[float]) -> Objectives:
    """Reference objective evaluation through the decision and confusion modules."""
    summary = confusion(dataset, decide(dataset, profile_for(dataset, list(thresholds))))
    return objectives_from_summary(dataset, summary)


def recommend(
    front: Sequence[ParetoSolution],
    dataset: Dataset,
    schedule: CostSchedule | None = None,
) -> int:
    """Pick one front member: minimal total cost when a schedule is given,
    otherwise maximal micro-F1.  Ties fall back to lower FP, lower MP, then the
    lexicographically smallest threshold vector."""
    if not front:
        raise ValueError("cannot recommend from an empty front")

    def sort_key(item: tuple[int, ParetoSolution]):
        _, solution = item
        neg_tp, fp, mp = solution.objectives
        if schedule is not None:
            summary = confusion(dataset, decide(dataset, profile_for(dataset, list(solution.thresholds))))
            primary = total_cost(summary, schedule)
        else:
            tp = -neg_tp
            denom = 2 * tp + fp + mp
            primary = -(2 * tp / denom) if denom > 0 else 0.0
        return (primary, fp, mp, solution.thresholds)

    index, _ = min(enumerate(front), key=sort_key)
    return index


def optimize(
    dataset: Dataset,
    settings: OptimizerSettings | None = None,
    schedule: CostSchedule | None = None,
    *,
    progress: Callable[[ProgressUpdate], None] | None = None,
    should_stop: Callable[[], bool] | None = None,
) -> OptimizationResult:
    """Run NSGA-II and return the deduplicated, sorted non-dominated front.

    Deterministic for fixed (dataset, settings, schedule) including the seed.
    ``progress`` is invoked once per generation with monotonic generation
    numbers; ``should_stop`` is polled between generations and raises
    OptimizationCancelled when it returns True.
    """
    settings = settings or OptimizerSettings()
    settings.validate()
    vocabulary = dataset.vocabulary
    resolved = settings
    if resolved.mutation_probability_per_gene is None:
        resolved = replace(resolved, mutation_probability_per_gene=1.0 / len(vocabulary))

    provenance = OptimizationProvenance(
        settings=settings,
        dataset_digest=dataset.content_digest,
        schedule_digest=schedule.digest() if schedule is not None else None,
        engine_version=ENGINE_VERSION,
    )

    if int(dataset.truth_matrix.sum()) == 0:
        warnings.warn(
            "no label has any positive record; returning the all-max-threshold solution",
            DegenerateDatasetWarning,
            stacklevel=2,
        )
        thresholds = tuple(1.0 for _ in vocabulary)
        solution = ParetoSolution(
            thresholds=thresholds,
            objectives=evaluate_thresholds(dataset, thresholds),
            rank=0,
            crowding=float("inf"),
        )
        return OptimizationResult(front=(solution,), recommended_index=0, provenance=provenance)

    evaluator = _FastEvaluator(dataset)
    gene_columns = evaluator.gene_columns
    n_genes = len(gene_columns)
    rng = np.random.default_rng(settings.rng_seed)
    pop_size = settings.population_size

    def full_thresholds(genes: np.ndarray) -> np.ndarray:
        full = np.zeros((len(genes), len(vocabulary)))
        full[:, gene_columns] = genes
        return full

    population = _initial_population(pop_size, n_genes, rng, evaluator)
    objectives = evaluator.population_objectives(population)
    archive = _ParetoArchive(len(vocabulary))
    archive.update(objectives, full_thresholds(population))

    for generation in range(1, settings.generations + 1):
        if should_stop is not None and should_stop():
            raise OptimizationCancelled(f"stop requested before generation {generation}")

        ranks = np.asarray(fast_nondominated_sort(objectives))
        crowding = _crowding_by_rank(objectives, ranks)

        offspring = np.empty_like(population)
        produced = 0
        while produced < pop_size:
            parent_a = population[_tournament(rng, pop_size, ranks, crowding)]
            parent_b = population[_tournament(rng, pop_size, ranks, crowding)]
            child_a, child_b = sbx_crossover(parent_a, parent_b, resolved, rng)
            offspring[produced] = polynomial_mutation(child_a, resolved, rng)
            produced += 1
            if produced < pop_size:
                offspring[produced] = polynomial_mutation(child_b, resolved, rng)
                produced += 1

        offspring_objectives = evaluator.population_objectives(offspring)
        archive.update(offspring_objectives, full_thresholds(offspring))

        combined = np.vstack([population, offspring])
        combined_objectives = np.vstack([objectives, offspring_objectives])
        survivors, _ = _environmental_selection(combined_objectives, pop_size)
        population = combined[survivors]
        objectives = combined_objectives[survivors]

        if progress is not None:
            front_objectives = archive.snapshot()
            progress(ProgressUpdate(
                generation=generation,
                generations_total=settings.generations,
                best_objectives=min(front_objectives),
                front_objectives=front_objectives,
            ))

    front = _build_front(dataset, archive)
    recommended = recommend(front, dataset, schedule)
    return OptimizationResult(front=front, recommended_index=recommended, provenance=provenance)


def _build_front(dataset: Dataset, archive: _ParetoArchive) -> tuple[ParetoSolution, ...]:
    # Re-evaluate every archive member through the reference path so stored
    # objectives are exactly reproducible, then re-filter: non-dominated only,
    # one entry per objective triple (lexicographically smallest thresholds),
    # sorted by (objectives, thresholds).
    rows = []
    for thresholds in archive.thresholds:
        vector = tuple(float(t) for t in thresholds)
        rows.append((evaluate_thresholds(dataset, vector), vector))
    rows.sort(key=lambda item: (item[0], item[1]))
    ranks = fast_nondominated_sort([objectives for objectives, _ in rows])
    kept: list[tuple[Objectives, tuple[float, ...]]] = []
    for i, row in enumerate(rows):
        if ranks[i] == 0 and (not kept or kept[-1][0] != row[0]):
            kept.append(row)
    crowding = crowding_distance([objectives for objectives, _ in kept])
    return tuple(
        ParetoSolution(thresholds=vector, objectives=objectives, rank=0, crowding=crowding[i])
        for i, (objectives, vector) in enumerate(kept)
    )
