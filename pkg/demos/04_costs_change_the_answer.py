"""Business costs move the operating point: the tomato-picking example.

Missing a ripe tomato is cheap (the robot passes again in three days); picking
an unripe one destroys produce.  With false positives weighted 5x, the
cost-recommended ripeness threshold lands well above the F1-optimal one.
"""

from pathlib import Path

from threshtune import (
    OptimizerSettings,
    confusion,
    decide,
    optimize,
    parse_dataset,
    parse_schedule,
    profile_for,
    recommend,
    total_cost,
)

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"

ds = parse_dataset((FIXTURES / "tomatoes_ripeness.csv").read_bytes(), "binary", positive_label="ripe")
schedule = parse_schedule((FIXTURES / "tomatoes_costs.json").read_bytes())
print("cost schedule:", {l: (c.correct, c.false_positive, c.missed_positive)
                         for l, c in schedule.per_label.items()})

result = optimize(ds, OptimizerSettings(rng_seed=42, generations=80))
pos = ds.label_index["ripe"]


def describe(index, tag):
    solution = result.front[index]
    tp, fp, mp = solution.counts
    summary = confusion(ds, decide(ds, profile_for(ds, list(solution.thresholds))))
    cost = total_cost(summary, schedule)
    print(f"{tag}: threshold {solution.thresholds[pos]:.3f}"
          f" -> tp={tp} fp={fp} mp={mp}, harvest-run cost {cost:.0f} AUD")
    return solution.thresholds[pos]


t_f1 = describe(recommend(result.front, ds), "F1-recommended  ")
t_cost = describe(recommend(result.front, ds, schedule), "cost-recommended")

print(f"\nThe expensive-mistake weighting raises the cutoff by {t_cost - t_f1:.2f}:")
print("the robot skips borderline tomatoes rather than pick green ones.")
