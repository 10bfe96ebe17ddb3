// Step 3: experiment with a single global threshold; exit here with a
// profile download, or continue to costs and optimization.

import type { AppContext } from "../app.js";
import { histogram, metricsPanel } from "../panels.js";
import { costSchedule, go } from "../state.js";
import { EVALUATE_DEBOUNCE_MS, debounce, el } from "../util.js";

export function renderExplore(context: AppContext, main: HTMLElement): void {
  const { state, api } = context;
  if (!state.summary || !state.datasetId) {
    main.append(el("p", { class: "error" }, "no dataset uploaded yet"));
    return;
  }
  const summary = state.summary.summary;

  const metricsHost = el("div", { id: "explore-metrics" });
  metricsHost.append(metricsPanel(state.lastEvaluation, state.currencyTag));

  async function evaluateNow(): Promise<void> {
    const response = await context.evaluateGate.run((signal) =>
      api.evaluate(state.datasetId!, {
        default_threshold: state.globalThreshold,
        costs: costSchedule(state),
      }, signal),
    );
    if (response) {
      state.lastEvaluation = response;
      metricsHost.replaceChildren(metricsPanel(response, state.currencyTag));
    }
  }
  const evaluateSoon = debounce(evaluateNow, EVALUATE_DEBOUNCE_MS);

  const slider = el("input", {
    id: "global-threshold",
    type: "range", min: "0", max: "1", step: "0.001",
    value: String(state.globalThreshold),
  });
  const sliderValue = el("input", {
    id: "global-threshold-value",
    type: "number", min: "0", max: "1", step: "0.001",
    value: String(state.globalThreshold),
  });
  const commit = (raw: string) => {
    const value = Number(raw);
    if (!Number.isFinite(value) || value < 0 || value > 1) {
      return;
    }
    state.globalThreshold = value;
    slider.value = String(value);
    sliderValue.value = String(value);
    evaluateSoon();
  };
  slider.addEventListener("input", () => commit(slider.value));
  sliderValue.addEventListener("input", () => commit(sliderValue.value));

  const downloadButton = el("button", { id: "download-global", class: "secondary" },
    "Download profile with this threshold");
  downloadButton.addEventListener("click", async () => {
    const profile = await api.exportProfile({
      dataset_id: state.datasetId!,
      thresholds: {},
      default_threshold: state.globalThreshold,
      costs: costSchedule(state),
    });
    context.onDownload(profile);
  });

  const nextButton = el("button", { id: "to-costs" }, "Define costs →");
  nextButton.addEventListener("click", () => {
    go(state, "costs");
    context.rerender();
  });

  const histograms = el("div", { class: "histograms" });
  for (const label of Object.keys(summary.score_histogram).sort()) {
    histograms.append(histogram(label, summary.score_histogram[label]));
  }

  main.append(
    el("section", { class: "card" },
      el("h2", {}, "Score distribution"),
      el("p", { class: "muted" },
        `${summary.record_count} records · ${summary.label_count} labels · `,
        "look for separated clusters: a good threshold lives in the gap between them"),
      histograms,
    ),
    el("section", { class: "card" },
      el("h2", {}, "Global threshold"),
      el("div", { class: "slider-row" }, slider, sliderValue),
      metricsHost,
      el("div", { class: "actions" }, downloadButton, nextButton),
    ),
  );

  if (!state.lastEvaluation) {
    void evaluateNow();
  }
}
