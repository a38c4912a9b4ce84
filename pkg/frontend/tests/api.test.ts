import { describe, expect, it } from "vitest";

import { ApiClient, ApiError, toApiTimestamp } from "../src/api";
import { RUN_ID, fixtureFetch, jsonResponse } from "./helpers";

describe("ApiClient", () => {
  it("fetches typed payloads from the service endpoints", async () => {
    const { fetchFn, calls } = fixtureFetch();
    const api = new ApiClient("", fetchFn);
    const runs = await api.runs();
    expect(runs!.runs[0].run_id).toBe(RUN_ID);
    const jobs = await api.jobs(RUN_ID);
    expect(jobs!.jobs.length).toBeGreaterThan(0);
    const glyph = await api.glyph(RUN_ID);
    expect(glyph!.nodes.length).toBeGreaterThan(0);
    expect(calls.some((u) => u.includes("/glyph"))).toBe(true);
  });

  it("serializes numeric time ranges as ISO-8601 query params", async () => {
    const { fetchFn, calls } = fixtureFetch();
    const api = new ApiClient("", fetchFn);
    await api.history(RUN_ID, 3, { from: 1578268800, to: 1578283200 });
    const url = calls.find((u) => u.includes("/history"))!;
    expect(url).toContain("from=2020-01-06T00%3A00%3A00.000Z");
    expect(url).toContain("to=2020-01-06T04%3A00%3A00.000Z");
    expect(url).not.toMatch(/from=1578/);
  });

  it("raises ApiError with the served detail on non-2xx", async () => {
    const fetchFn = async () => jsonResponse({ detail: "run not found" }, 404);
    const api = new ApiClient("", fetchFn as typeof fetch);
    await expect(api.jobs("nope")).rejects.toMatchObject({
      status: 404,
      detail: "run not found",
    });
    await expect(api.jobs("nope")).rejects.toBeInstanceOf(ApiError);
  });

  it("discards stale responses when a newer request for the same key starts", async () => {
    const gates: Array<() => void> = [];
    let n = 0;
    const fetchFn = (async () => {
      const mine = ++n;
      await new Promise<void>((resolve) => gates.push(resolve));
      return jsonResponse({ order: mine });
    }) as unknown as typeof fetch;

    const api = new ApiClient("", fetchFn);
    const first = api.history(RUN_ID, 3);
    const second = api.history(RUN_ID, 3);
    // release out of order: the late (second) response resolves first
    gates[1]();
    const fresh = await second;
    gates[0]();
    const stale = await first;

    expect((fresh as unknown as { order: number }).order).toBe(2);
    expect(stale).toBeNull();
  });

  it("keeps requests with different keys independent", async () => {
    const gates: Array<() => void> = [];
    const fetchFn = (async (url: RequestInfo | URL) => {
      const u = String(url);
      await new Promise<void>((resolve) => gates.push(resolve));
      return jsonResponse({ url: u });
    }) as unknown as typeof fetch;

    const api = new ApiClient("", fetchFn);
    const a = api.history(RUN_ID, 3);
    const b = api.history(RUN_ID, 9);
    gates[1]();
    gates[0]();
    expect(await a).not.toBeNull();
    expect(await b).not.toBeNull();
  });
});

describe("toApiTimestamp", () => {
  it("converts epoch seconds to ISO-8601", () => {
    expect(toApiTimestamp(1578268800)).toBe("2020-01-06T00:00:00.000Z");
  });

  it("passes strings through untouched", () => {
    expect(toApiTimestamp("2020-01-06T00:00:00+00:00")).toBe(
      "2020-01-06T00:00:00+00:00",
    );
  });
});
