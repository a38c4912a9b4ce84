/** Shared test utilities: fixture loading and a canned-response fetch. */

import type { GlyphResponse } from "../src/types";

import glyphJob from "./fixtures/glyph_job.json";
import glyphOverall from "./fixtures/glyph_overall.json";
import historyNode0 from "./fixtures/history_node0.json";
import historyNode1 from "./fixtures/history_node1.json";
import historyNode3 from "./fixtures/history_node3.json";
import historyNode9 from "./fixtures/history_node9.json";
import jobs from "./fixtures/jobs.json";
import runs from "./fixtures/runs.json";
import timeline from "./fixtures/timeline.json";

export const FIXTURES = {
  runs,
  jobs,
  glyphOverall: glyphOverall as GlyphResponse,
  glyphJob: glyphJob as GlyphResponse,
  histories: {
    0: historyNode0,
    1: historyNode1,
    3: historyNode3,
    9: historyNode9,
  } as Record<number, typeof historyNode3>,
  timeline,
};

export const RUN_ID: string = runs.runs[0].run_id;

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

/**
 * fetch stand-in replaying the fixture run directory. Records every URL it
 * serves. Unknown nodes get an empty history; unknown paths 404.
 */
export function fixtureFetch(): { fetchFn: typeof fetch; calls: string[] } {
  const calls: string[] = [];
  const fetchFn = (async (input: RequestInfo | URL) => {
    const url = String(input);
    calls.push(url);
    if (url === "/runs") return jsonResponse(FIXTURES.runs);
    if (url === `/runs/${RUN_ID}/jobs`) return jsonResponse(FIXTURES.jobs);
    if (url === `/runs/${RUN_ID}/glyph`) return jsonResponse(FIXTURES.glyphOverall);
    const jobMatch = url.match(new RegExp(`^/runs/${RUN_ID}/glyph\\?job=(.+)$`));
    if (jobMatch) {
      return jsonResponse({
        ...FIXTURES.glyphJob,
        job_id: decodeURIComponent(jobMatch[1]),
      });
    }
    const nodeMatch = url.match(
      new RegExp(`^/runs/${RUN_ID}/nodes/(\\d+)/history(\\?.*)?$`),
    );
    if (nodeMatch) {
      const node = Number(nodeMatch[1]);
      const fixture = FIXTURES.histories[node];
      if (fixture) return jsonResponse(fixture);
      return jsonResponse({
        ...FIXTURES.histories[0],
        node_id: node,
        events: [],
        jobs: [],
      });
    }
    if (url.startsWith(`/runs/${RUN_ID}/timeline?`)) {
      return jsonResponse(FIXTURES.timeline);
    }
    return jsonResponse({ detail: `no fixture for ${url}` }, 404);
  }) as typeof fetch;
  return { fetchFn, calls };
}

/**
 * Fresh mount point. Clears the document first: leftover mounts from earlier
 * tests would otherwise shadow id lookups (duplicate ids across the document
 * break scoped `#id` queries under jsdom).
 */
export function container(): HTMLElement {
  document.body.innerHTML = "";
  const el = document.createElement("div");
  document.body.appendChild(el);
  return el;
}

/** Deterministic synthetic glyph payload with `n` nodes, ids shuffled. */
export function bigGlyph(n: number, status = "pass"): GlyphResponse {
  const nodes = Array.from({ length: n }, (_, i) => ({
    node_id: i,
    z: 3 * Math.sin(i / 7),
    fatal_count: i % 97 === 0 ? 3 : 0,
  }));
  // deterministic LCG shuffle so payload order differs from id order
  let state = 12345;
  const rand = () => {
    state = (state * 1103515245 + 12345) % 2147483648;
    return state / 2147483648;
  };
  for (let i = nodes.length - 1; i > 0; i--) {
    const j = Math.floor(rand() * (i + 1));
    [nodes[i], nodes[j]] = [nodes[j], nodes[i]];
  }
  return {
    config_hash: "cafe01234567",
    job_id: null,
    status,
    error_counts: { MCE: 5, ECC: 2 },
    z_histogram: [
      { lo: -2, hi: -1, count: 10 },
      { lo: -1, hi: 0, count: n - 30 },
      { lo: 0, hi: 1, count: 15 },
      { lo: 1, hi: 2, count: 5 },
    ],
    nodes,
  };
}

export function mouse(
  type: string,
  clientX: number,
  clientY: number,
): MouseEvent {
  return new MouseEvent(type, { clientX, clientY, bubbles: true });
}
