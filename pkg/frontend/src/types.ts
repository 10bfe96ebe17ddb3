// Wire types mirroring the engine's JSON payloads.

export type TaskKind = "binary" | "multiclass" | "multilabel";

export interface LabelHistogram {
  positive: number[];
  negative: number[];
}

export interface SummaryResponse {
  dataset_id: string;
  task: TaskKind;
  positive_label: string | null;
  summary: {
    record_count: number;
    label_count: number;
    per_label_positive_count: Record<string, number>;
    score_histogram: Record<string, LabelHistogram>;
  };
}

export interface CountsCell {
  tp: number;
  fp: number;
  mp: number;
}

export interface ConfusionPayload {
  per_label: Record<string, CountsCell>;
  n_labels: number;
  m_classes: number;
  task: TaskKind;
}

export interface MetricTriple {
  precision: number;
  recall: number;
  f1: number;
}

export interface LabelMetricCell extends MetricTriple {
  degenerate: boolean;
}

export interface MetricsPayload {
  per_label: Record<string, LabelMetricCell>;
  micro: MetricTriple;
  macro: MetricTriple;
  abstain_count: number | null;
}

export interface EvaluationResponse {
  confusion: ConfusionPayload;
  metrics: MetricsPayload;
  total_cost: number | null;
}

export interface CostCell {
  correct: number;
  false_positive: number;
  missed_positive: number;
}

export interface CostSchedulePayload {
  currency_tag: string;
  per_label: Record<string, CostCell>;
}

export interface OptimizerSettingsPayload {
  population_size: number;
  generations: number;
  rng_seed: number;
}

export interface SolutionPayload {
  thresholds: Record<string, number>;
  objectives: { neg_tp: number; fp: number; mp: number };
  counts: CountsCell;
  rank: number;
  crowding: number | null;
}

export interface ResultPayload {
  front: SolutionPayload[];
  recommended_index: number;
  provenance: {
    dataset_digest: string;
    settings: Record<string, unknown>;
    rng_seed: number;
    schedule_digest: string | null;
    engine_version: string;
  };
}

export type JobStatus = "queued" | "running" | "done" | "failed" | "cancelled";

export interface JobResponse {
  job_id: string;
  status: JobStatus;
  progress: {
    generation: number;
    generations_total: number;
    best_objectives: number[] | null;
  };
  result: ResultPayload | null;
  error: string | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail: unknown;
}
