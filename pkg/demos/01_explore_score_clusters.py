"""Why a single global threshold fails: two classifiers, two score clusters.

Loads the two bundled spam-classifier benchmarks and prints the confidence
histogram for the positive label.  Safe mail piles up around 0.12 for model 1
and around 0.65 for model 2, so any threshold that works for one model
misclassifies a chunk of the other's traffic.
"""

from pathlib import Path

from threshtune import parse_dataset, summarize

FIXTURES = Path(__file__).resolve().parents[1] / "fixtures"
BLOCKS = " ▁▂▃▄▅▆▇█"


def bar(count, top):
    return BLOCKS[min(8, (9 * count) // (top + 1) + (1 if count else 0))]


for name in ("spam_model_1", "spam_model_2"):
    ds = parse_dataset((FIXTURES / f"{name}.csv").read_bytes(), "binary", positive_label="spam")
    hist = summarize(ds).score_histogram["spam"]
    top = max(max(hist.positive), max(hist.negative))
    print(f"\n{name}: spam-confidence histogram over {ds.record_count} emails")
    print("  bin edges   0.0" + " " * 30 + "1.0")
    print("  spam mail   " + "".join(bar(c, top) for c in hist.positive))
    print("  safe mail   " + "".join(bar(c, top) for c in hist.negative))
    safe_bins = [i for i, c in enumerate(hist.negative) if c]
    spam_bins = [i for i, c in enumerate(hist.positive) if c]
    print(f"  safe mail occupies bins {safe_bins[0]}-{safe_bins[-1]}"
          f" (scores {safe_bins[0] / 20:.2f}-{(safe_bins[-1] + 1) / 20:.2f});"
          f" spam starts at bin {spam_bins[0]} (score {spam_bins[0] / 20:.2f})")

print("\nThe separating gaps sit in different places, so each model needs its own threshold.")
