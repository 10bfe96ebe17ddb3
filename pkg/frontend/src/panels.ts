// Shared render-only widgets: metrics tables and score histograms.

import type { EvaluationResponse, LabelHistogram } from "./types.js";
import { el, fmtCost, fmtMetric } from "./util.js";

export function metricsPanel(evaluation: EvaluationResponse | null, currency: string): HTMLElement {
  const panel = el("div", { class: "metrics-panel" });
  if (!evaluation) {
    panel.append(el("p", { class: "muted" }, "evaluating…"));
    return panel;
  }
  const labels = Object.keys(evaluation.confusion.per_label).sort();
  const table = el("table", { class: "metrics" });
  table.append(el("thead", {}, el("tr", {},
    el("th", {}, "label"),
    el("th", {}, "true pos"),
    el("th", {}, "false pos"),
    el("th", {}, "missed pos"),
    el("th", {}, "precision"),
    el("th", {}, "recall"),
    el("th", {}, "f1"),
  )));
  const body = el("tbody");
  for (const label of labels) {
    const counts = evaluation.confusion.per_label[label];
    const metric = evaluation.metrics.per_label[label];
    body.append(el("tr", { "data-label": label },
      el("td", {}, label),
      el("td", { class: "num" }, String(counts.tp)),
      el("td", { class: "num" }, String(counts.fp)),
      el("td", { class: "num" }, String(counts.mp)),
      el("td", { class: "num" }, fmtMetric(metric.precision) + (metric.degenerate ? "*" : "")),
      el("td", { class: "num" }, fmtMetric(metric.recall)),
      el("td", { class: "num" }, fmtMetric(metric.f1)),
    ));
  }
  const micro = evaluation.metrics.micro;
  const macro = evaluation.metrics.macro;
  body.append(el("tr", { class: "aggregate", "data-label": "micro" },
    el("td", {}, "micro"), el("td", {}, ""), el("td", {}, ""), el("td", {}, ""),
    el("td", { class: "num" }, fmtMetric(micro.precision)),
    el("td", { class: "num" }, fmtMetric(micro.recall)),
    el("td", { class: "num", id: "micro-f1" }, fmtMetric(micro.f1)),
  ));
  body.append(el("tr", { class: "aggregate", "data-label": "macro" },
    el("td", {}, "macro"), el("td", {}, ""), el("td", {}, ""), el("td", {}, ""),
    el("td", { class: "num" }, fmtMetric(macro.precision)),
    el("td", { class: "num" }, fmtMetric(macro.recall)),
    el("td", { class: "num" }, fmtMetric(macro.f1)),
  ));
  table.append(body);
  panel.append(table);

  const notes = el("p", { class: "muted" });
  if (evaluation.metrics.abstain_count !== null) {
    notes.append(`abstentions: ${evaluation.metrics.abstain_count}`);
  }
  if (evaluation.total_cost !== null) {
    if (notes.textContent) {
      notes.append(" · ");
    }
    notes.append("total cost: ");
    notes.append(el("strong", { id: "cost-readout" }, fmtCost(evaluation.total_cost, currency)));
  }
  if (notes.textContent) {
    panel.append(notes);
  }
  return panel;
}

export function histogram(label: string, bins: LabelHistogram): HTMLElement {
  const peak = Math.max(1, ...bins.positive, ...bins.negative);
  const chart = el("div", { class: "histogram" });
  const rows: [string, number[]][] = [
    ["in truth", bins.positive],
    ["not in truth", bins.negative],
  ];
  for (const [name, counts] of rows) {
    const bar = el("div", { class: "hist-row" }, el("span", { class: "hist-name" }, name));
    const track = el("div", { class: "hist-track" });
    counts.forEach((count, i) => {
      const column = el("div", { class: "hist-bin", title: `${(i / 20).toFixed(2)}–${((i + 1) / 20).toFixed(2)}: ${count}` });
      column.style.height = `${Math.round((count / peak) * 100)}%`;
      if (count > 0) {
        column.classList.add(name === "in truth" ? "pos" : "neg");
      }
      track.append(column);
    });
    bar.append(track);
    chart.append(bar);
  }
  return el("div", { class: "hist-block" }, el("h4", {}, label), chart);
}
