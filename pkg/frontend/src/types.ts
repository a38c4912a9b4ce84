/** Shapes of the JSON served by the analysis-run HTTP API. */

export interface RunWindow {
  start: number;
  end: number;
  [extra: string]: unknown;
}

export interface RunRow {
  run_id: string;
  created: string;
  config_hash: string;
  window: RunWindow;
  summary: Record<string, unknown>;
}

export interface RunsResponse {
  runs: RunRow[];
}

export interface JobRow {
  job_id: string;
  user: string;
  project: string;
  nodes: number[];
  n_nodes: number;
  start: number;
  end: number;
  wall_time: number;
  run_time: number;
  exit_status: string;
  fatal_events: number;
  median_abs_z: number | null;
}

export interface JobsResponse {
  config_hash: string;
  jobs: JobRow[];
}

export interface HistogramBin {
  lo: number;
  hi: number;
  count: number;
}

export interface GlyphNode {
  node_id: number;
  z: number;
  fatal_count: number;
}

export interface GlyphResponse {
  config_hash: string;
  job_id: string | null;
  status: string;
  error_counts: Record<string, number>;
  z_histogram: HistogramBin[];
  nodes: GlyphNode[];
}

export interface HistoryEvent {
  timestamp: number;
  severity: string;
  category: string;
  message: string;
}

export interface HistoryJob {
  job_id: string;
  user: string;
  start: number;
  end: number;
  exit_status: string;
}

export interface HistoryResponse {
  config_hash: string;
  node_id: number;
  from: number;
  to: number;
  events: HistoryEvent[];
  jobs: HistoryJob[];
}

export interface TimelineSeries {
  node_id: number;
  sensor_name: string;
  unit: string;
}

export interface TimelineResponse {
  config_hash: string;
  series: TimelineSeries;
  n_total: number;
  points: [number, number][];
}

/** Nodes in ascending id order — the only order the radial axis may use. */
export function nodesByAscendingId(glyph: GlyphResponse): GlyphNode[] {
  return [...glyph.nodes].sort((a, b) => a.node_id - b.node_id);
}

/**
 * Check the payload against the glyph's structural rules; returns a list of
 * human-readable findings (empty when the payload is sound).
 */
export function glyphFindings(
  glyph: GlyphResponse,
  expectedSeriesCount?: number,
): string[] {
  const findings: string[] = [];
  const binSum = glyph.z_histogram.reduce((acc, b) => acc + b.count, 0);
  if (expectedSeriesCount !== undefined && binSum !== expectedSeriesCount) {
    findings.push(
      `z histogram bins sum to ${binSum}, expected ${expectedSeriesCount} series`,
    );
  }
  for (let i = 1; i < glyph.z_histogram.length; i++) {
    if (glyph.z_histogram[i].lo !== glyph.z_histogram[i - 1].hi) {
      findings.push(`z histogram bins not contiguous at index ${i}`);
    }
  }
  const ids = glyph.nodes.map((n) => n.node_id);
  if (new Set(ids).size !== ids.length) {
    findings.push("duplicate node ids in glyph payload");
  }
  for (const n of glyph.nodes) {
    if (n.fatal_count < 0) findings.push(`node ${n.node_id}: negative fatal_count`);
  }
  return findings;
}
