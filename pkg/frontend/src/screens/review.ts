// Steps 6-7: review the Pareto front, fine-tune per-label thresholds, and
// download the threshold profile.

import type { AppContext } from "../app.js";
import { metricsPanel } from "../panels.js";
import { costSchedule, go, reviewThresholds } from "../state.js";
import { EVALUATE_DEBOUNCE_MS, debounce, el, fmtThreshold } from "../util.js";

export function renderReview(context: AppContext, main: HTMLElement): void {
  const { state, api } = context;
  const result = state.result;
  if (!result || !state.datasetId) {
    main.append(el("p", { class: "error" }, "no optimization result yet"));
    return;
  }
  const labels = Object.keys(result.front[0]?.thresholds ?? {}).sort();

  const metricsHost = el("div", { id: "review-metrics" });
  metricsHost.append(metricsPanel(state.reviewEvaluation, state.currencyTag));

  async function evaluateNow(): Promise<void> {
    const response = await context.reviewGate.run((signal) =>
      api.evaluate(state.datasetId!, {
        thresholds: reviewThresholds(state),
        default_threshold: 0.5,
        costs: costSchedule(state),
      }, signal),
    );
    if (response) {
      state.reviewEvaluation = response;
      metricsHost.replaceChildren(metricsPanel(response, state.currencyTag));
    }
  }
  const evaluateSoon = debounce(evaluateNow, EVALUATE_DEBOUNCE_MS);

  // Pareto front, already sorted by the engine; counts are shown as positive
  // numbers straight from the payload.
  const table = el("table", { class: "front" });
  table.append(el("thead", {}, el("tr", {},
    el("th", {}, "#"),
    el("th", {}, "true pos"),
    el("th", {}, "false pos"),
    el("th", {}, "missed pos"),
    ...labels.map((label) => el("th", {}, `t(${label})`)),
  )));
  const body = el("tbody");
  const sliders = new Map<string, { slider: HTMLInputElement; box: HTMLInputElement }>();

  function refreshSelection(): void {
    body.querySelectorAll("tr").forEach((row) => {
      row.classList.toggle("selected", Number(row.dataset.index) === state.selectedIndex);
    });
    const thresholds = reviewThresholds(state);
    for (const [label, pair] of sliders) {
      pair.slider.value = String(thresholds[label] ?? 0.5);
      pair.box.value = fmtThreshold(thresholds[label] ?? 0.5);
    }
  }

  result.front.forEach((solution, index) => {
    const row = el("tr", { "data-index": String(index) },
      el("td", {}, index === result.recommended_index ? `${index} ★` : String(index)),
      el("td", { class: "num" }, String(solution.counts.tp)),
      el("td", { class: "num" }, String(solution.counts.fp)),
      el("td", { class: "num" }, String(solution.counts.mp)),
      ...labels.map((label) => el("td", { class: "num" }, fmtThreshold(solution.thresholds[label]))),
    );
    if (index === result.recommended_index) {
      row.classList.add("recommended");
    }
    row.addEventListener("click", () => {
      state.selectedIndex = index;
      state.tunedThresholds = null;
      refreshSelection();
      evaluateSoon();
    });
    body.append(row);
  });
  table.append(body);

  const tuner = el("div", { class: "tuner" });
  for (const label of labels) {
    const slider = el("input", {
      type: "range", min: "0", max: "1", step: "0.001",
      class: "tune-slider", "data-label": label,
    });
    const box = el("input", {
      type: "number", min: "0", max: "1", step: "0.001",
      class: "tune-box", "data-label": label,
    });
    const commit = (raw: string) => {
      const value = Number(raw);
      if (!Number.isFinite(value) || value < 0 || value > 1) {
        return;
      }
      state.tunedThresholds = { ...reviewThresholds(state), [label]: value };
      slider.value = String(value);
      box.value = String(value);
      evaluateSoon();
    };
    slider.addEventListener("input", () => commit(slider.value));
    box.addEventListener("input", () => commit(box.value));
    sliders.set(label, { slider, box });
    tuner.append(el("label", { class: "field" }, `t(${label}) `, slider, box));
  }

  const downloadButton = el("button", { id: "download-profile" }, "Download threshold profile");
  downloadButton.addEventListener("click", async () => {
    const body = state.tunedThresholds
      ? {
          dataset_id: state.datasetId!,
          thresholds: reviewThresholds(state),
          default_threshold: 0.5,
          costs: costSchedule(state),
        }
      : {
          dataset_id: state.datasetId!,
          job_id: state.jobId ?? undefined,
          solution_index: state.selectedIndex,
          costs: costSchedule(state),
        };
    const profile = await api.exportProfile(body);
    context.onDownload(profile);
  });

  const backButton = el("button", { class: "secondary" }, "← Optimization settings");
  backButton.addEventListener("click", () => {
    go(state, "optimize");
    context.rerender();
  });

  main.append(
    el("section", { class: "card" },
      el("h2", {}, "Pareto front"),
      el("p", { class: "muted" },
        "★ marks the recommendation (lowest cost with your grid, best micro-F1 without). ",
        "Click a row to inspect it."),
      table,
    ),
    el("section", { class: "card" },
      el("h2", {}, "Fine-tune and export"),
      tuner,
      metricsHost,
      el("p", { class: "muted" },
        "The profile embeds these thresholds, your costs, baseline metrics, and provenance; ",
        "integrate it in your client and re-check it in CI with the monitor command."),
      el("div", { class: "actions" }, backButton, downloadButton),
    ),
  );

  refreshSelection();
  if (!state.reviewEvaluation) {
    void evaluateNow();
  }
}
