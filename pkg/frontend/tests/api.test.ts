import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiRequestError, LatestWins } from "../src/api.js";

function jsonResponse(body: unknown, status = 200, headers: Record<string, string> = {}) {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json", ...headers },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("ApiClient", () => {
  it("uploads raw CSV with task parameters", async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse({ dataset_id: "d1" }, 201));
    vi.stubGlobal("fetch", fetchMock);
    const client = new ApiClient("http://x");
    await client.upload("truth,score:a,score:b\na,1,0\n", "binary", "a");
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("http://x/api/datasets?task=binary&positive_label=a");
    expect(init.method).toBe("POST");
    expect(init.headers["content-type"]).toBe("text/csv");
  });

  it("surfaces structured errors", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(
      jsonResponse({ code: "parse_error", message: "line 3: bad row", detail: { line: 3 } }, 400),
    ));
    const client = new ApiClient();
    const failure = await client.upload("x", "binary", "a").catch((e) => e);
    expect(failure).toBeInstanceOf(ApiRequestError);
    expect(failure.code).toBe("parse_error");
    expect(failure.message).toContain("line 3");
    expect(failure.detail).toEqual({ line: 3 });
  });

  it("resolves duplicate job submissions to the existing job id", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(
      jsonResponse({ code: "duplicate_job", message: "already running", detail: { job_id: "j42" } }, 409),
    ));
    const client = new ApiClient();
    const jobId = await client.optimize("d1", { population_size: 20, generations: 10, rng_seed: 1 }, null);
    expect(jobId).toBe("j42");
  });

  it("extracts the download filename from content-disposition", async () => {
    vi.stubGlobal("fetch", vi.fn().mockResolvedValue(new Response("{}", {
      status: 200,
      headers: { "content-disposition": 'attachment; filename="thresholds-abc.threshy.json"' },
    })));
    const client = new ApiClient();
    const profile = await client.exportProfile({ dataset_id: "d1", thresholds: {} });
    expect(profile.filename).toBe("thresholds-abc.threshy.json");
  });
});

describe("LatestWins", () => {
  it("aborts the previous request and reports null for stale ones", async () => {
    const gate = new LatestWins();
    const first = gate.run(
      (signal) =>
        new Promise<string>((resolve, reject) => {
          signal.addEventListener("abort", () => reject(new DOMException("aborted", "AbortError")));
        }),
    );
    const second = gate.run(async () => "fresh");
    expect(await second).toBe("fresh");
    expect(await first).toBeNull();
  });

  it("propagates real failures of the newest request", async () => {
    const gate = new LatestWins();
    await expect(gate.run(async () => {
      throw new Error("boom");
    })).rejects.toThrow("boom");
  });
});
