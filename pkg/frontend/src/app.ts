// Application shell: one context object, one render pass per navigation.

import { ApiClient, LatestWins } from "./api.js";
import type { ExportedProfile } from "./api.js";
import { STEP_INFO, Step, WorkflowState, canGo, createState } from "./state.js";
import { renderCosts } from "./screens/costs.js";
import { renderExplore } from "./screens/explore.js";
import { renderOptimize } from "./screens/optimize.js";
import { renderReview } from "./screens/review.js";
import { renderUpload } from "./screens/upload.js";
import { el } from "./util.js";

export interface AppContext {
  state: WorkflowState;
  api: ApiClient;
  root: HTMLElement;
  evaluateGate: LatestWins;
  reviewGate: LatestWins;
  poller: { handle: ReturnType<typeof setInterval> | null };
  rerender: () => void;
  /** Test seam; the default implementation triggers a browser download. */
  onDownload: (profile: ExportedProfile) => void;
}

function browserDownload(profile: ExportedProfile): void {
  const blob = new Blob([profile.text], { type: "application/json" });
  const url = URL.createObjectURL(blob);
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = profile.filename;
  anchor.click();
  URL.revokeObjectURL(url);
}

export function createAppContext(
  root: HTMLElement,
  api: ApiClient = new ApiClient(""),
  onDownload: (profile: ExportedProfile) => void = browserDownload,
): AppContext {
  const context: AppContext = {
    state: createState(),
    api,
    root,
    evaluateGate: new LatestWins(),
    reviewGate: new LatestWins(),
    poller: { handle: null },
    rerender: () => renderApp(context),
    onDownload,
  };
  return context;
}

export function stopPolling(context: AppContext): void {
  if (context.poller.handle !== null) {
    clearInterval(context.poller.handle);
    context.poller.handle = null;
  }
}

function stepNav(context: AppContext): HTMLElement {
  const nav = el("nav", { class: "steps" });
  (Object.keys(STEP_INFO) as Step[]).forEach((step) => {
    const info = STEP_INFO[step];
    const button = el("button", { class: "step", "data-step": step },
      el("span", { class: "badge" }, info.badge), info.title);
    if (step === context.state.step) {
      button.classList.add("current");
      button.disabled = true;
    } else if (canGo(context.state, step)) {
      button.addEventListener("click", () => {
        stopPolling(context);
        context.state.step = step;
        context.rerender();
      });
    } else {
      button.disabled = true;
    }
    nav.append(button);
  });
  return nav;
}

export function renderApp(context: AppContext): void {
  stopPolling(context);
  const { root, state } = context;
  root.replaceChildren();
  root.append(el("header", {},
    el("h1", {}, "threshtune"),
    el("p", { class: "tagline" }, "tune decision thresholds for your prediction service, with your costs"),
    stepNav(context),
  ));
  const main = el("main", { id: "screen", "data-step": state.step });
  root.append(main);
  switch (state.step) {
    case "upload":
      renderUpload(context, main);
      break;
    case "explore":
      renderExplore(context, main);
      break;
    case "costs":
      renderCosts(context, main);
      break;
    case "optimize":
      renderOptimize(context, main);
      break;
    case "review":
      renderReview(context, main);
      break;
  }
}
