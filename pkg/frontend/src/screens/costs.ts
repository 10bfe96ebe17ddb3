// Step 4: per-label money weights for correct, false, and missed predictions.

import type { AppContext } from "../app.js";
import { costRow, costRowError, go, vocabulary } from "../state.js";
import { el } from "../util.js";

const COLUMNS = [
  ["correct", "correct", "0"],
  ["false_positive", "false positive", "1"],
  ["missed_positive", "missed positive", "1"],
] as const;

export function renderCosts(context: AppContext, main: HTMLElement): void {
  const { state } = context;
  const labels = vocabulary(state);

  const nextButton = el("button", { id: "to-optimize" }, "Optimization settings →");
  const refreshNext = () => {
    nextButton.disabled = Object.keys(state.costErrors).length > 0;
  };

  const table = el("table", { class: "cost-grid" });
  table.append(el("thead", {}, el("tr", {},
    el("th", {}, "label"),
    ...COLUMNS.map(([, title]) => el("th", {}, `${title} cost`)),
  )));
  const body = el("tbody");
  for (const label of labels) {
    const row = el("tr", { "data-label": label }, el("td", {}, label));
    const errorCell = el("td", { class: "error", "data-error-for": label });
    for (const [key, , placeholder] of COLUMNS) {
      const input = el("input", {
        type: "number", step: "any",
        class: "cost-cell",
        "data-label": label, "data-kind": key,
        placeholder,
        value: costRow(state, label)[key],
      });
      input.addEventListener("input", () => {
        const current = { ...costRow(state, label), [key]: input.value };
        state.costRows[label] = current;
        const problem = costRowError(current);
        if (problem) {
          state.costErrors[label] = problem;
          errorCell.textContent = problem;
        } else {
          delete state.costErrors[label];
          errorCell.textContent = "";
        }
        refreshNext();
      });
      row.append(el("td", {}, input));
    }
    row.append(errorCell);
    body.append(row);
  }
  table.append(body);

  const currency = el("input", {
    id: "currency-tag", type: "text", placeholder: "currency tag, e.g. AUD",
    value: state.currencyTag,
  });
  currency.addEventListener("input", () => {
    state.currencyTag = currency.value.trim();
  });

  const backButton = el("button", { class: "secondary" }, "← Explore");
  backButton.addEventListener("click", () => {
    go(state, "explore");
    context.rerender();
  });
  nextButton.addEventListener("click", () => {
    go(state, "optimize");
    context.rerender();
  });
  refreshNext();

  main.append(
    el("section", { class: "card" },
      el("h2", {}, "What does a mistake cost you?"),
      el("p", { class: "muted" },
        "Blank cells keep the defaults (correct 0, false positive 1, missed positive 1). ",
        "Error costs cannot be negative; a negative correct cost is a reward."),
      table,
      el("label", { class: "field" }, "currency ", currency),
      el("div", { class: "actions" }, backButton, nextButton),
    ),
  );
}
