/**
 * Typed client for the run-serving HTTP API.
 *
 * Every fetch carries a per-view sequence number; a response that arrives
 * after a newer request for the same view has started resolves to `null`
 * instead of its body, so stale data can never overwrite fresh data.
 */

import type {
  GlyphResponse,
  HistoryResponse,
  JobsResponse,
  RunsResponse,
  TimelineResponse,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

export interface TimeRange {
  from?: number | string;
  to?: number | string;
}

/** Query-string timestamps must be ISO-8601; epoch numbers are converted. */
export function toApiTimestamp(t: number | string): string {
  return typeof t === "number" ? new Date(t * 1000).toISOString() : t;
}

function rangeParams(range?: TimeRange): string[] {
  const parts: string[] = [];
  if (range?.from !== undefined) {
    parts.push(`from=${encodeURIComponent(toApiTimestamp(range.from))}`);
  }
  if (range?.to !== undefined) {
    parts.push(`to=${encodeURIComponent(toApiTimestamp(range.to))}`);
  }
  return parts;
}

export class ApiClient {
  private seqs = new Map<string, number>();

  constructor(
    private readonly base = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  /**
   * GET `url`, tagged with `key`. Returns the parsed body, or `null` if a
   * newer request with the same key started while this one was in flight.
   */
  async get<T>(key: string, url: string): Promise<T | null> {
    const seq = (this.seqs.get(key) ?? 0) + 1;
    this.seqs.set(key, seq);
    const res = await this.fetchFn(this.base + url);
    if (this.seqs.get(key) !== seq) return null;
    if (!res.ok) {
      let detail = res.statusText;
      try {
        const body = (await res.json()) as { detail?: string };
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        /* non-JSON error body; keep the status text */
      }
      throw new ApiError(res.status, detail);
    }
    const body = (await res.json()) as T;
    if (this.seqs.get(key) !== seq) return null;
    return body;
  }

  runs(): Promise<RunsResponse | null> {
    return this.get("runs", "/runs");
  }

  jobs(runId: string): Promise<JobsResponse | null> {
    return this.get("jobs", `/runs/${encodeURIComponent(runId)}/jobs`);
  }

  glyph(runId: string, jobId?: string | null): Promise<GlyphResponse | null> {
    const query = jobId ? `?job=${encodeURIComponent(jobId)}` : "";
    const key = `glyph:${jobId ?? ""}`;
    return this.get(key, `/runs/${encodeURIComponent(runId)}/glyph${query}`);
  }

  history(
    runId: string,
    nodeId: number,
    range?: TimeRange,
  ): Promise<HistoryResponse | null> {
    const parts = rangeParams(range);
    const query = parts.length ? `?${parts.join("&")}` : "";
    return this.get(
      `history:${nodeId}`,
      `/runs/${encodeURIComponent(runId)}/nodes/${nodeId}/history${query}`,
    );
  }

  timeline(
    runId: string,
    series: string,
    range?: TimeRange,
    maxPoints?: number,
  ): Promise<TimelineResponse | null> {
    const parts = [`series=${encodeURIComponent(series)}`, ...rangeParams(range)];
    if (maxPoints !== undefined) parts.push(`max_points=${maxPoints}`);
    return this.get(
      "timeline",
      `/runs/${encodeURIComponent(runId)}/timeline?${parts.join("&")}`,
    );
  }
}
