// Step 5: run the per-label threshold search as a background job with live
// progress, then advance to the review screen.

import type { AppContext } from "../app.js";
import { stopPolling } from "../app.js";
import { ApiRequestError } from "../api.js";
import { costSchedule, go } from "../state.js";
import { JOB_POLL_MS, el } from "../util.js";

export function renderOptimize(context: AppContext, main: HTMLElement): void {
  const { state, api } = context;

  const fields: [keyof typeof state.settings, string][] = [
    ["population_size", "population size (even, ≥ 4)"],
    ["generations", "generations"],
    ["rng_seed", "random seed"],
  ];
  const form = el("div", { class: "settings" });
  for (const [key, title] of fields) {
    const input = el("input", {
      type: "number", id: `setting-${key}`,
      value: String(state.settings[key]),
    });
    input.addEventListener("input", () => {
      const value = Number(input.value);
      if (Number.isFinite(value)) {
        state.settings[key] = Math.trunc(value);
      }
    });
    form.append(el("label", { class: "field" }, `${title} `, input));
  }

  const statusBox = el("div", { id: "job-status" });
  const progressBar = el("progress", { id: "job-progress", max: "1", value: "0" });
  const errorBox = el("div", { id: "optimize-error", class: "error" });

  function showProgress(): void {
    const progress = state.jobProgress;
    statusBox.textContent = state.jobStatus
      ? `job ${state.jobStatus}` + (progress ? ` · generation ${progress.generation}/${progress.generations_total}` : "")
      : "";
    if (progress && progress.generations_total > 0) {
      progressBar.value = progress.generation / progress.generations_total;
    }
  }

  function pollUntilDone(): void {
    stopPolling(context);
    context.poller.handle = setInterval(async () => {
      if (!state.jobId) {
        stopPolling(context);
        return;
      }
      try {
        const job = await api.job(state.jobId);
        state.jobStatus = job.status;
        state.jobProgress = job.progress;
        showProgress();
        if (job.status === "done" && job.result) {
          stopPolling(context);
          state.result = job.result;
          state.selectedIndex = job.result.recommended_index;
          state.tunedThresholds = null;
          state.reviewEvaluation = null;
          go(state, "review");
          context.rerender();
        } else if (job.status === "failed" || job.status === "cancelled") {
          stopPolling(context);
          state.jobError = job.error ?? `job ${job.status}`;
          errorBox.textContent = state.jobError;
        }
      } catch (error) {
        stopPolling(context);
        errorBox.textContent = String(error);
      }
    }, JOB_POLL_MS);
  }

  const runButton = el("button", { id: "run-optimize" }, "Run optimization");
  runButton.addEventListener("click", async () => {
    errorBox.textContent = "";
    state.jobError = null;
    try {
      state.jobId = await api.optimize(state.datasetId!, state.settings, costSchedule(state));
      state.jobStatus = "queued";
      state.jobProgress = null;
      showProgress();
      pollUntilDone();
    } catch (error) {
      errorBox.textContent = error instanceof ApiRequestError ? error.message : String(error);
    }
  });

  const cancelButton = el("button", { id: "cancel-optimize", class: "secondary" }, "Cancel");
  cancelButton.addEventListener("click", async () => {
    if (state.jobId) {
      await api.cancel(state.jobId);
    }
  });

  const backButton = el("button", { class: "secondary" }, "← Costs");
  backButton.addEventListener("click", () => {
    stopPolling(context);
    go(state, "costs");
    context.rerender();
  });

  main.append(
    el("section", { class: "card" },
      el("h2", {}, "Search per-label thresholds"),
      el("p", { class: "muted" },
        "NSGA-II maximizes true positives while minimizing false and missed positives, ",
        "one threshold per label. Your cost grid picks the recommended trade-off."),
      form,
      el("div", { class: "actions" }, backButton, runButton, cancelButton),
      statusBox,
      progressBar,
      errorBox,
    ),
  );
  showProgress();

  // Resume polling when navigating back to a still-running job.
  if (state.jobId && (state.jobStatus === "queued" || state.jobStatus === "running")) {
    pollUntilDone();
  }
}
