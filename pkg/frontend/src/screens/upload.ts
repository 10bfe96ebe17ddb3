// Step 2: upload the benchmark CSV for initial exploration.

import type { AppContext } from "../app.js";
import { ApiRequestError } from "../api.js";
import { go, vocabulary } from "../state.js";
import type { TaskKind } from "../types.js";
import { el } from "../util.js";

/** Upload CSV text and advance to the explore step. Shared by the file-input
 * handler and by scripted tests. */
export async function submitCsv(context: AppContext, csv: string): Promise<void> {
  const { state, api } = context;
  state.uploadError = null;
  try {
    const response = await api.upload(csv, state.task, state.task === "binary" ? state.positiveLabel : null);
    const changed = state.datasetId !== response.dataset_id;
    state.datasetId = response.dataset_id;
    state.summary = response;
    if (changed) {
      // New data invalidates optimization output but keeps cost rows for
      // labels that still exist.
      state.jobId = null;
      state.jobStatus = null;
      state.jobProgress = null;
      state.result = null;
      state.selectedIndex = 0;
      state.tunedThresholds = null;
      state.lastEvaluation = null;
      state.reviewEvaluation = null;
      const labels = new Set(vocabulary(state));
      for (const label of Object.keys(state.costRows)) {
        if (!labels.has(label)) {
          delete state.costRows[label];
        }
      }
    }
    go(state, "explore");
  } catch (error) {
    if (error instanceof ApiRequestError) {
      state.uploadError = error.message;
    } else {
      state.uploadError = String(error);
    }
  }
  context.rerender();
}

export function renderUpload(context: AppContext, main: HTMLElement): void {
  const { state } = context;

  const taskSelect = el("select", { id: "task-select" });
  for (const task of ["binary", "multiclass", "multilabel"] as TaskKind[]) {
    const option = el("option", { value: task }, task);
    if (task === state.task) {
      option.setAttribute("selected", "");
    }
    taskSelect.append(option);
  }

  const positiveField = el("input", {
    id: "positive-label",
    type: "text",
    placeholder: "positive label, e.g. spam",
    value: state.positiveLabel,
  });
  const positiveWrap = el("label", { class: "field" }, "positive label ", positiveField);
  positiveWrap.style.display = state.task === "binary" ? "" : "none";

  taskSelect.addEventListener("change", () => {
    state.task = taskSelect.value as TaskKind;
    positiveWrap.style.display = state.task === "binary" ? "" : "none";
  });
  positiveField.addEventListener("input", () => {
    state.positiveLabel = positiveField.value.trim();
  });

  const fileInput = el("input", { id: "csv-file", type: "file", accept: ".csv,text/csv" });
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (file) {
      await submitCsv(context, await file.text());
    }
  });

  const errorBox = el("div", { id: "upload-error", class: "error" });
  if (state.uploadError) {
    errorBox.append(state.uploadError);
  } else {
    errorBox.style.display = "none";
  }

  main.append(
    el("section", { class: "card" },
      el("h2", {}, "Upload your benchmark"),
      el("p", { class: "muted" },
        "Run your labelled benchmark through the prediction service first, then upload the ",
        "resulting CSV: one header row ", el("code", {}, "[id,]truth,score:<label>,…"),
        " and one row per instance with confidences in [0, 1]."),
      el("label", { class: "field" }, "task kind ", taskSelect),
      positiveWrap,
      el("label", { class: "field" }, "benchmark CSV ", fileInput),
      errorBox,
    ),
  );
}
