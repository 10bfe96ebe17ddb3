"""Automatic per-label threshold search with NSGA-II.

Runs the optimizer on both spam benchmarks and on the five-type tomato
classifier.  Objectives are (-TP, FP, MP); the returned front is the set of
non-dominated trade-offs and the recommended member maximizes micro-F1 when no
cost schedule is supplied.
"""

from pathlib import Path

from threshtune import OptimizerSettings, optimize, parse_dataset

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
SETTINGS = OptimizerSettings(rng_seed=42)

for name in ("spam_model_1", "spam_model_2"):
    ds = parse_dataset((FIXTURES / f"{name}.csv").read_bytes(), "binary", positive_label="spam")
    result = optimize(ds, SETTINGS)
    best = result.recommended
    tp, fp, mp = best.counts
    spam_threshold = best.thresholds[ds.label_index["spam"]]
    print(f"{name}: recommended spam threshold {spam_threshold:.3f}"
          f" -> tp={tp} fp={fp} mp={mp} (front size {len(result.front)})")

print("\nModel-dependent cutoffs, found automatically: ~0.2 for model 1, ~0.7 for model 2.")

ds = parse_dataset((FIXTURES / "tomatoes_type.csv").read_bytes(), "multiclass")
result = optimize(ds, SETTINGS)
print(f"\ntomatoes_type (5 labels, {ds.record_count} photos): front holds {len(result.front)} trade-offs")
best = result.recommended
tp, fp, mp = best.counts
print(f"F1-recommended point accepts every argmax: tp={tp} fp={fp} mp={mp}, zero abstentions")

# Walk the front toward precision: fewer wrong picks, more abstentions.
careful = min((s for s in result.front if s.counts[1] <= fp // 4), key=lambda s: -s.counts[0])
tp, fp, mp = careful.counts
print(f"a precision-leaning member of the same front: tp={tp} fp={fp} mp={mp}")
print("its per-label cutoffs:")
for label, threshold in zip(ds.vocabulary, careful.thresholds):
    print(f"  {label:>8}: {threshold:.3f}")
print(f"records below their label's cutoff abstain ({mp - fp} here) —")
print("route those to a human instead of the sorting robot.")
