"""Profiles as regression gates: catching a drifted service in CI.

Exports a threshold profile with its baseline metrics, then re-evaluates it
against fresh benchmark pulls.  Identical behaviour passes; the bundled
degraded fixture (every spam confidence down by 0.5) trips the gate.

The CLI equivalent exits 0 on pass and 3 on regression:

    threshtune monitor new_pull.csv --profile thresholds.threshy.json
"""

from pathlib import Path

from threshtune import (
    OptimizerSettings,
    export_profile,
    make_baseline,
    monitor_compare,
    optimize,
    parse_dataset,
    parse_profile,
    profile_for,
)
from threshtune.profiles import ProfileProvenance

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

baseline_ds = parse_dataset((FIXTURES / "spam_model_1.csv").read_bytes(), "binary", positive_label="spam")
settings = OptimizerSettings(rng_seed=42)
result = optimize(baseline_ds, settings)
profile = profile_for(baseline_ds, list(result.recommended.thresholds))

document = parse_profile(export_profile(
    profile,
    provenance=ProfileProvenance(
        dataset_digest=baseline_ds.content_digest,
        settings=settings,
        created_at="2026-08-10T00:00:00Z",
    ),
    baseline=make_baseline(baseline_ds, profile),
))
print(f"profile exported with baseline micro-F1 {document.baseline.metrics.micro.f1:.3f}")

for name in ("spam_model_1", "spam_model_1_degraded"):
    fresh = parse_dataset((FIXTURES / f"{name}.csv").read_bytes(), "binary", positive_label="spam")
    report = monitor_compare(document, fresh, tolerance=0.05)
    print(f"\n{name}: verdict {report.verdict.upper()}"
          f" (micro-F1 {report.current_metrics.micro.f1:.3f}"
          f" vs baseline {report.baseline_metrics.micro.f1:.3f})")
    for violation in report.violations:
        print(f"  {violation.scope}/{violation.metric}:"
              f" {violation.baseline:.3f} -> {violation.current:.3f}"
              f" ({violation.relative_drop:.0%} relative drop)")
