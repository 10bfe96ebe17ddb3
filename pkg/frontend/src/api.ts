// HTTP client for the engine. Every number the UI shows comes from these
// responses; the client never derives metrics of its own.

import type {
  CostSchedulePayload,
  EvaluationResponse,
  JobResponse,
  OptimizerSettingsPayload,
  SummaryResponse,
  TaskKind,
} from "./types.js";

export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: unknown;

  constructor(status: number, code: string, message: string, detail: unknown = null) {
    super(message);
    this.status = status;
    this.code = code;
    this.detail = detail;
  }
}

async function errorFrom(response: Response): Promise<ApiRequestError> {
  try {
    const body = await response.json();
    return new ApiRequestError(response.status, body.code ?? "error", body.message ?? response.statusText, body.detail);
  } catch {
    return new ApiRequestError(response.status, "error", response.statusText);
  }
}

export interface ExportedProfile {
  text: string;
  filename: string;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private url(path: string): string {
    return this.base + path;
  }

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.url(path), init);
    if (!response.ok) {
      throw await errorFrom(response);
    }
    return (await response.json()) as T;
  }

  async health(): Promise<{ status: string; engine_version: string }> {
    return this.json("/api/health");
  }

  async upload(csv: string, task: TaskKind, positiveLabel: string | null): Promise<SummaryResponse> {
    const params = new URLSearchParams({ task });
    if (positiveLabel) {
      params.set("positive_label", positiveLabel);
    }
    return this.json(`/api/datasets?${params}`, {
      method: "POST",
      headers: { "content-type": "text/csv" },
      body: csv,
    });
  }

  async summary(datasetId: string): Promise<SummaryResponse> {
    return this.json(`/api/datasets/${datasetId}/summary`);
  }

  async evaluate(
    datasetId: string,
    body: {
      thresholds?: Record<string, number>;
      default_threshold?: number;
      costs?: CostSchedulePayload | null;
    },
    signal?: AbortSignal,
  ): Promise<EvaluationResponse> {
    return this.json(`/api/datasets/${datasetId}/evaluate`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
      signal,
    });
  }

  /** Submits an optimization job; a duplicate active job resolves to its id. */
  async optimize(
    datasetId: string,
    settings: OptimizerSettingsPayload,
    costs: CostSchedulePayload | null,
  ): Promise<string> {
    const response = await fetch(this.url(`/api/datasets/${datasetId}/optimize`), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ settings, costs }),
    });
    if (response.status === 409) {
      const body = await response.json();
      const existing = (body.detail as { job_id?: string } | null)?.job_id;
      if (existing) {
        return existing;
      }
    }
    if (!response.ok) {
      throw await errorFrom(response);
    }
    const body = await response.json();
    return body.job_id as string;
  }

  async job(jobId: string): Promise<JobResponse> {
    return this.json(`/api/jobs/${jobId}`);
  }

  async cancel(jobId: string): Promise<JobResponse> {
    return this.json(`/api/jobs/${jobId}`, { method: "DELETE" });
  }

  async exportProfile(body: {
    dataset_id: string;
    job_id?: string;
    solution_index?: number;
    thresholds?: Record<string, number>;
    default_threshold?: number;
    costs?: CostSchedulePayload | null;
  }): Promise<ExportedProfile> {
    const response = await fetch(this.url("/api/export"), {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw await errorFrom(response);
    }
    const disposition = response.headers.get("content-disposition") ?? "";
    const match = /filename="([^"]+)"/.exec(disposition);
    return {
      text: await response.text(),
      filename: match ? match[1] : "thresholds.threshy.json",
    };
  }
}

/**
 * Latest-wins guard for in-flight evaluations: starting a new request aborts
 * the previous one, and an aborted request resolves to null instead of
 * throwing, so stale responses can never overwrite fresh panels.
 */
export class LatestWins {
  private controller: AbortController | null = null;

  async run<T>(request: (signal: AbortSignal) => Promise<T>): Promise<T | null> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    try {
      const value = await request(controller.signal);
      return controller.signal.aborted ? null : value;
    } catch (error) {
      if (controller.signal.aborted) {
        return null;
      }
      throw error;
    } finally {
      if (this.controller === controller) {
        this.controller = null;
      }
    }
  }
}
