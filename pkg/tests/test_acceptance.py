"""Acceptance suite: one test per release criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion lines.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from threshtune import (
    OptimizerSettings,
    confusion,
    crowding_distance,
    decide,
    evaluate_dataset,
    export_profile,
    fast_nondominated_sort,
    global_profile,
    hypervolume,
    make_baseline,
    monitor_compare,
    optimize,
    parse_dataset,
    parse_profile,
    profile_for,
    total_cost,
)
from threshtune.cli import EXIT_OK, EXIT_REGRESS, main
from threshtune.fixtures import fixture_by_name
from threshtune.profiles import ProfileProvenance

from helpers import random_dataset, random_profile
from oracles import grid_front, naive_confusion, naive_decide, naive_rank_peel


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"\n[FAIL] {name}")
        raise
    print(f"\n[PASS] {name}")


def _run_cli_optimize(capsys, csv_path, out_path, extra=()):
    args = ["optimize", str(csv_path), "--task", "binary", "--positive-label", "spam",
            "--seed", "42", "--timestamp", "2026-08-10T00:00:00Z",
            "--out", str(out_path), "--format", "json", *extra]
    code = main(args)
    out = capsys.readouterr().out
    assert code == EXIT_OK
    return json.loads(out)


def test_fig2_scenario_model_dependent_thresholds(capsys, fixtures_dir, tmp_path):
    """Two spam classifiers with safe-mail clusters at 0.12 and 0.65 need
    different thresholds; optimization must find an exact zero-error solution
    inside each model's separating gap in under 10 s per fixture."""
    with criterion("Fig. 2 scenario: zero-error fronts with model-dependent in-gap thresholds"):
        recommended = {}
        for name in ("spam_model_1", "spam_model_2"):
            spec = fixture_by_name(name)
            expected = spec.expected
            started = time.monotonic()
            payload = _run_cli_optimize(capsys, fixtures_dir / spec.filename, tmp_path / f"{name}.threshy.json")
            elapsed = time.monotonic() - started
            assert elapsed < 10.0, f"{name} optimization took {elapsed:.1f}s"

            objective_set = {
                (s["objectives"]["neg_tp"], s["objectives"]["fp"], s["objectives"]["mp"])
                for s in payload["front"]
            }
            assert (-float(expected["positives"]), 0.0, 0.0) in objective_set, "no zero-error solution on the front"

            threshold = payload["front"][payload["recommended_index"]]["thresholds"]["spam"]
            assert expected["gap_low"] < threshold <= expected["gap_high"], \
                f"{name} recommended threshold {threshold} outside gap ({expected['gap_low']}, {expected['gap_high']}]"
            recommended[name] = threshold
        # The two models genuinely require different cutoffs.
        assert recommended["spam_model_2"] - recommended["spam_model_1"] > 0.3


def test_front_equals_exhaustive_grid_oracle():
    """On 20 seeded small datasets the final front's objective-triple set equals
    the non-dominated set of the 1001-thresholds-per-label grid oracle, exactly,
    within a 60 s budget for the whole sweep."""
    with criterion("Oracle equivalence: NSGA-II front == exhaustive grid front on 20 seeded datasets"):
        started = time.monotonic()
        tasks = ["binary", "multiclass", "multilabel"]
        for i in range(20):
            rng = np.random.default_rng(1000 + i)
            task = tasks[i % 3]
            n_records = int(rng.integers(5, 51))
            ds = random_dataset(rng, task, n_records, ["a", "b"], decimals=2)
            oracle = grid_front(ds)
            settings = OptimizerSettings(population_size=100, generations=300, rng_seed=2000 + i)
            result = optimize(ds, settings)
            got = {tuple(int(v) for v in s.objectives) for s in result.front}
            assert got == oracle, (
                f"dataset {i} ({task}, {n_records} records): "
                f"missing={sorted(oracle - got)} extra={sorted(got - oracle)}"
            )
        elapsed = time.monotonic() - started
        assert elapsed < 60.0, f"oracle-equivalence sweep took {elapsed:.1f}s"


def test_confusion_matches_independent_oracle_1000_pairs():
    """1000 randomized (dataset, profile) pairs across all three task kinds must
    match a from-first-principles confusion implementation exactly."""
    with criterion("Confusion oracle: 1000 randomized pairs match brute force exactly"):
        tasks = ["binary", "multiclass", "multilabel"]
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            task = tasks[seed % 3]
            n_labels = 2 if task == "binary" else int(rng.integers(2, 5))
            labels = [chr(ord("a") + i) for i in range(n_labels)]
            ds = random_dataset(rng, task, int(rng.integers(1, 13)), labels)
            profile = random_profile(rng, ds)
            summary = confusion(ds, decide(ds, profile))
            got = {l: (c.tp, c.fp, c.mp) for l, c in summary.per_label.items()}
            assert got == naive_confusion(ds, naive_decide(ds, profile)), f"seed {seed}"


def test_monotonicity_1000_trials():
    """Raising one label's threshold never increases that label's FP nor
    decreases its MP; zero violations tolerated."""
    with criterion("Monotonicity: 1000 trials, zero FP/MP violations"):
        from threshtune import ThresholdProfile

        tasks = ["binary", "multiclass", "multilabel"]
        for seed in range(1000):
            rng = np.random.default_rng(10_000 + seed)
            task = tasks[seed % 3]
            labels = ["a", "b"] if task == "binary" else ["a", "b", "c"]
            ds = random_dataset(rng, task, int(rng.integers(1, 20)), labels)
            base = random_profile(rng, ds)
            label = ds.positive_label if task == "binary" else labels[int(rng.integers(0, len(labels)))]
            low = float(rng.uniform(0.0, 1.0))
            high = float(rng.uniform(low, 1.0))

            def counts_at(threshold):
                thresholds = dict(base.thresholds)
                thresholds[label] = threshold
                p = ThresholdProfile(thresholds=thresholds, default_threshold=base.default_threshold,
                                     task=ds.task, positive_label=ds.positive_label)
                return confusion(ds, decide(ds, p)).per_label[label]

            before, after = counts_at(low), counts_at(high)
            assert after.fp <= before.fp, f"seed {seed}: FP rose when threshold rose"
            assert after.mp >= before.mp, f"seed {seed}: MP fell when threshold rose"


def test_determinism_byte_identical_outputs(fixtures_dir, tmp_path):
    """Two optimize runs with identical inputs and seed produce byte-identical
    profile files (checked across separate processes); two exports of equal
    profiles are byte-identical."""
    with criterion("Determinism: byte-identical profiles across runs and exports"):
        csv_path = fixtures_dir / "spam_model_1.csv"
        paths = [tmp_path / "run_a.threshy.json", tmp_path / "run_b.threshy.json"]
        for out in paths:
            proc = subprocess.run(
                [sys.executable, "-m", "threshtune.cli", "optimize", str(csv_path),
                 "--task", "binary", "--positive-label", "spam",
                 "--seed", "42", "--population", "40", "--generations", "25",
                 "--timestamp", "2026-08-10T00:00:00Z", "--out", str(out)],
                capture_output=True, text=True,
            )
            assert proc.returncode == 0, proc.stderr
        assert paths[0].read_bytes() == paths[1].read_bytes()

        ds = parse_dataset(csv_path.read_bytes(), "binary", positive_label="spam")
        profile = profile_for(ds, {"spam": 0.25, "ham": 0.0})
        provenance = ProfileProvenance(dataset_digest=ds.content_digest, settings=None,
                                       created_at="2026-08-10T00:00:00Z")
        baseline = make_baseline(ds, profile)
        assert export_profile(profile, provenance=provenance, baseline=baseline) == \
            export_profile(profile, provenance=provenance, baseline=baseline)


def test_cost_pressure_raises_ripeness_threshold(tomatoes_ripeness, tomatoes_schedule):
    """With false positives 5x as expensive as misses, the cost-recommended
    ripeness threshold must sit strictly above the F1-recommended one, and both
    must agree with a 1001-point sweep oracle."""
    with criterion("Cost behavior: FP-heavy schedule pushes the ripeness threshold up"):
        ds, schedule = tomatoes_ripeness, tomatoes_schedule
        grid = np.linspace(0.0, 1.0, 1001)
        f1_curve, cost_curve = [], []
        for t in grid:
            outcome = evaluate_dataset(ds, global_profile(ds, float(t)), schedule)
            f1_curve.append(outcome.metrics.per_label["ripe"].f1)
            cost_curve.append(outcome.total_cost)
        f1_curve, cost_curve = np.asarray(f1_curve), np.asarray(cost_curve)
        oracle_f1_threshold = float(grid[int(np.argmax(f1_curve))])
        oracle_cost_threshold = float(grid[int(np.argmin(cost_curve))])
        assert oracle_cost_threshold > oracle_f1_threshold, "sweep oracle does not show the asymmetry"

        from threshtune import recommend

        result = optimize(ds, OptimizerSettings(population_size=100, generations=80, rng_seed=42))
        pos = ds.label_index["ripe"]
        t_cost = result.front[recommend(result.front, ds, schedule)].thresholds[pos]
        t_f1 = result.front[recommend(result.front, ds)].thresholds[pos]
        assert t_cost > t_f1, f"cost-recommended {t_cost} not above F1-recommended {t_f1}"

        # The recommended thresholds must be as good as the sweep optima.
        cost_at = total_cost(confusion(ds, decide(ds, profile_for(ds, list(result.front[recommend(result.front, ds, schedule)].thresholds)))), schedule)
        assert cost_at == float(cost_curve.min())
        f1_at = evaluate_dataset(ds, profile_for(ds, list(result.front[recommend(result.front, ds)].thresholds))).metrics.per_label["ripe"].f1
        assert f1_at == pytest.approx(float(f1_curve.max()), abs=1e-12)


def test_monitoring_gate(capsys, fixtures_dir, tmp_path):
    """Self-comparison passes with zero violations; the degraded fixture
    regresses with CLI exit code 3; the stored confusion payload is exactly
    three numbers per label."""
    with criterion("Monitoring: pass on baseline, regress (exit 3) on degraded data, 3-number payload"):
        profile_path = tmp_path / "gate.threshy.json"
        _run_cli_optimize(capsys, fixtures_dir / "spam_model_1.csv", profile_path,
                          extra=("--population", "40", "--generations", "25"))

        document = parse_profile(profile_path.read_bytes())
        baseline_dataset = parse_dataset((fixtures_dir / "spam_model_1.csv").read_bytes(),
                                         "binary", positive_label="spam")
        report = monitor_compare(document, baseline_dataset)
        assert report.verdict == "pass" and report.violations == ()

        code = main(["monitor", str(fixtures_dir / "spam_model_1.csv"), "--profile", str(profile_path)])
        capsys.readouterr()
        assert code == EXIT_OK

        code = main(["monitor", str(fixtures_dir / "spam_model_1_degraded.csv"), "--profile", str(profile_path)])
        out = capsys.readouterr().out
        assert code == EXIT_REGRESS
        assert json.loads(out)["verdict"] == "regress"

        stored = json.loads(profile_path.read_text())
        per_label = stored["baseline"]["confusion"]["per_label"]
        for label, cell in per_label.items():
            assert set(cell) == {"tp", "fp", "mp"}, f"{label} payload is not the three-construct reduction"
        assert len(per_label) == 2  # 3 numbers x |vocabulary|, not n*m*4


def test_nsga_internals(fixtures_dir):
    """Non-dominated sort matches the pairwise oracle on 200 random objective
    sets; crowding boundaries are infinite; the per-generation hypervolume trace
    is non-decreasing on every acceptance fixture."""
    with criterion("NSGA-II internals: sort oracle, boundary crowding, monotone hypervolume"):
        rng = np.random.default_rng(77)
        for case in range(200):
            size = int(rng.integers(2, 25))
            objectives = [tuple(int(v) for v in rng.integers(0, 8, size=3)) for _ in range(size)]
            assert fast_nondominated_sort(objectives) == naive_rank_peel(objectives), f"case {case}"

        rng = np.random.default_rng(78)
        for _ in range(50):
            size = int(rng.integers(3, 12))
            front = [tuple(float(v) for v in rng.integers(0, 10, size=3)) for _ in range(size)]
            distances = crowding_distance(front)
            for axis in range(3):
                order = sorted(range(size), key=lambda i: front[i][axis])
                assert distances[order[0]] == float("inf")
                assert distances[order[-1]] == float("inf")

        fixtures = (
            ("spam_model_1.csv", "binary", "spam"),
            ("spam_model_2.csv", "binary", "spam"),
            ("tomatoes_ripeness.csv", "binary", "ripe"),
            ("tomatoes_type.csv", "multiclass", None),
        )
        for filename, task, positive in fixtures:
            ds = parse_dataset((fixtures_dir / filename).read_bytes(), task, positive)
            bound = float(ds.record_count * len(ds.vocabulary))
            reference = (0.0, bound, bound)
            volumes = []
            optimize(
                ds,
                OptimizerSettings(population_size=40, generations=40, rng_seed=42),
                progress=lambda update: volumes.append(hypervolume(update.front_objectives, reference)),
            )
            assert len(volumes) == 40
            assert all(later >= earlier for earlier, later in zip(volumes, volumes[1:])), filename
