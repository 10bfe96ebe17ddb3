// Workflow state machine. One mutable state object lives for the whole
// session, so navigating back never loses entered costs or tuned thresholds.

import type {
  CostSchedulePayload,
  EvaluationResponse,
  OptimizerSettingsPayload,
  ResultPayload,
  SummaryResponse,
  TaskKind,
} from "./types.js";

export type Step = "upload" | "explore" | "costs" | "optimize" | "review";

export const STEP_INFO: Record<Step, { badge: string; title: string }> = {
  upload: { badge: "2", title: "Upload benchmark" },
  explore: { badge: "3", title: "Explore global threshold" },
  costs: { badge: "4", title: "Define costs" },
  optimize: { badge: "5", title: "Optimize" },
  review: { badge: "6–7", title: "Review & download" },
};

// Step 1 (run the benchmark through the service) and step 8 (integrate the
// profile) happen outside the tool; the dotted early exits are the download
// buttons on the explore and review screens.
const EDGES: Record<Step, Step[]> = {
  upload: ["explore"],
  explore: ["upload", "costs"],
  costs: ["explore", "optimize"],
  optimize: ["costs", "review"],
  review: ["optimize"],
};

export interface CostRow {
  correct: string;
  false_positive: string;
  missed_positive: string;
}

export interface WorkflowState {
  step: Step;
  datasetId: string | null;
  task: TaskKind;
  positiveLabel: string;
  uploadError: string | null;
  summary: SummaryResponse | null;
  globalThreshold: number;
  lastEvaluation: EvaluationResponse | null;
  costRows: Record<string, CostRow>;
  currencyTag: string;
  costErrors: Record<string, string>;
  settings: OptimizerSettingsPayload;
  jobId: string | null;
  jobStatus: string | null;
  jobProgress: { generation: number; generations_total: number } | null;
  jobError: string | null;
  result: ResultPayload | null;
  selectedIndex: number;
  tunedThresholds: Record<string, number> | null;
  reviewEvaluation: EvaluationResponse | null;
}

export function createState(): WorkflowState {
  return {
    step: "upload",
    datasetId: null,
    task: "binary",
    positiveLabel: "",
    uploadError: null,
    summary: null,
    globalThreshold: 0.5,
    lastEvaluation: null,
    costRows: {},
    currencyTag: "",
    costErrors: {},
    settings: { population_size: 100, generations: 50, rng_seed: 42 },
    jobId: null,
    jobStatus: null,
    jobProgress: null,
    jobError: null,
    result: null,
    selectedIndex: 0,
    tunedThresholds: null,
    reviewEvaluation: null,
  };
}

export function canGo(state: WorkflowState, to: Step): boolean {
  if (!EDGES[state.step].includes(to)) {
    return false;
  }
  if (to !== "upload" && state.datasetId === null) {
    return false;
  }
  if (to === "review" && state.result === null) {
    return false;
  }
  return true;
}

export function go(state: WorkflowState, to: Step): void {
  if (!canGo(state, to)) {
    throw new Error(`cannot move from ${state.step} to ${to}`);
  }
  state.step = to;
}

export function vocabulary(state: WorkflowState): string[] {
  return state.summary ? Object.keys(state.summary.summary.per_label_positive_count) : [];
}

const DEFAULT_ROW: CostRow = { correct: "", false_positive: "", missed_positive: "" };

export function costRow(state: WorkflowState, label: string): CostRow {
  return state.costRows[label] ?? DEFAULT_ROW;
}

function parseCell(raw: string, fallback: number): number | null {
  if (raw.trim() === "") {
    return fallback;
  }
  const value = Number(raw);
  return Number.isFinite(value) ? value : null;
}

/** Validates one grid row; error costs must be non-negative. */
export function costRowError(row: CostRow): string | null {
  const fp = parseCell(row.false_positive, 1);
  const mp = parseCell(row.missed_positive, 1);
  const correct = parseCell(row.correct, 0);
  if (fp === null || mp === null || correct === null) {
    return "costs must be numbers";
  }
  if (fp < 0 || mp < 0) {
    return "error costs must be ≥ 0";
  }
  return null;
}

/**
 * The grid in engine wire format. Untouched rows keep the engine defaults
 * (0, 1, 1) and are omitted; returns null when nothing was customized.
 */
export function costSchedule(state: WorkflowState): CostSchedulePayload | null {
  const perLabel: Record<string, { correct: number; false_positive: number; missed_positive: number }> = {};
  for (const label of Object.keys(state.costRows).sort()) {
    const row = state.costRows[label];
    if (costRowError(row) !== null) {
      continue;
    }
    const cell = {
      correct: parseCell(row.correct, 0)!,
      false_positive: parseCell(row.false_positive, 1)!,
      missed_positive: parseCell(row.missed_positive, 1)!,
    };
    if (cell.correct === 0 && cell.false_positive === 1 && cell.missed_positive === 1) {
      continue;
    }
    perLabel[label] = cell;
  }
  if (Object.keys(perLabel).length === 0 && state.currencyTag === "") {
    return null;
  }
  return { currency_tag: state.currencyTag, per_label: perLabel };
}

/** Thresholds shown on the review screen: slider tweaks win over the selected solution. */
export function reviewThresholds(state: WorkflowState): Record<string, number> {
  if (state.tunedThresholds) {
    return { ...state.tunedThresholds };
  }
  const solution = state.result?.front[state.selectedIndex];
  return solution ? { ...solution.thresholds } : {};
}
