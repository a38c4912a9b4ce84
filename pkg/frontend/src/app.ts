/**
 * Single-page app wiring the five coordinated views together.
 *
 * State lives here: the selected run, the glyph grouping granularity, the
 * job selected in the parallel-coordinates view, the lassoed node set, and
 * the timeline brush. Everything rendered comes from the HTTP API; this
 * module only regroups and filters what the server computed. The brush and
 * selections are mirrored into the URL hash so a view can be shared.
 */

import { select } from "d3";

import { ApiClient, ApiError } from "./api";
import { renderAbstract } from "./abstract";
import { renderGlyph } from "./glyph";
import { renderHistory, type HistoryPanelData, type Range } from "./history";
import { renderJobs, type JobsHandle } from "./jobs";
import { renderTimeline, type TimelineHandle } from "./timeline";
import type { GlyphResponse, JobRow, RunRow } from "./types";

export type Granularity = "job" | "user" | "project" | "exit-code" | "node-group";

export const GRANULARITIES: Granularity[] = [
  "job",
  "user",
  "project",
  "exit-code",
  "node-group",
];

const NODE_GROUP_SIZE = 16;
const JOB_FOCUS_PANELS = 4;

/** Group label for one job row under a granularity. */
export function groupKey(row: JobRow, granularity: Granularity): string {
  switch (granularity) {
    case "job":
      return row.job_id;
    case "user":
      return row.user;
    case "project":
      return row.project;
    case "exit-code":
      return row.exit_status;
    case "node-group": {
      const block = Math.floor(Math.min(...row.nodes) / NODE_GROUP_SIZE);
      return `nodes ${block * NODE_GROUP_SIZE}–${block * NODE_GROUP_SIZE + NODE_GROUP_SIZE - 1}`;
    }
  }
}

/**
 * Combine per-job glyph payloads into one group glyph: any failure fails the
 * group, count rings add up, and each node keeps its most anomalous served
 * z (with fatal counts summed) — aggregation of served values only.
 */
export function mergeGlyphs(members: GlyphResponse[], label: string): GlyphResponse {
  if (!members.length) throw new Error("mergeGlyphs: empty group");
  const errorCounts: Record<string, number> = {};
  const hist = members[0].z_histogram.map((b) => ({ ...b, count: 0 }));
  const nodes = new Map<number, { z: number; fatal: number }>();
  let status = "pass";
  for (const g of members) {
    if (g.status !== "pass") status = "fail";
    for (const [cat, count] of Object.entries(g.error_counts)) {
      errorCounts[cat] = (errorCounts[cat] ?? 0) + count;
    }
    g.z_histogram.forEach((b, i) => {
      if (i < hist.length) hist[i].count += b.count;
    });
    for (const n of g.nodes) {
      const prev = nodes.get(n.node_id);
      nodes.set(n.node_id, {
        z: prev === undefined || Math.abs(n.z) > Math.abs(prev.z) ? n.z : prev.z,
        fatal: (prev?.fatal ?? 0) + n.fatal_count,
      });
    }
  }
  return {
    config_hash: members[0].config_hash,
    job_id: label,
    status,
    error_counts: errorCounts,
    z_histogram: hist,
    nodes: [...nodes.entries()]
      .sort(([a], [b]) => a - b)
      .map(([node_id, v]) => ({ node_id, z: v.z, fatal_count: v.fatal })),
  };
}

interface HashState {
  run: string | null;
  job: string | null;
  brush: Range;
}

export function readHash(hash: string): HashState {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const from = Number(params.get("from"));
  const to = Number(params.get("to"));
  const brush: Range =
    params.has("from") &&
    params.has("to") &&
    Number.isFinite(from) &&
    Number.isFinite(to) &&
    from < to
      ? [from, to]
      : null;
  return { run: params.get("run"), job: params.get("job"), brush };
}

export function writeHash(state: HashState): string {
  const params = new URLSearchParams();
  if (state.run) params.set("run", state.run);
  if (state.job) params.set("job", state.job);
  if (state.brush) {
    params.set("from", String(state.brush[0]));
    params.set("to", String(state.brush[1]));
  }
  const out = params.toString();
  return out ? `#${out}` : "";
}

export class App {
  private runs: RunRow[] = [];
  private runId: string | null = null;
  private jobId: string | null = null;
  private granularity: Granularity = "job";
  private selectedNodes: number[] = [];
  private brush: Range = null;
  private jobRows: JobRow[] = [];
  private overall: GlyphResponse | null = null;
  private glyphCache = new Map<string, GlyphResponse>();
  private panels: HistoryPanelData[] = [];
  private jobsHandle: JobsHandle | null = null;
  private timelineHandle: TimelineHandle | null = null;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly win: { location: { hash: string } } = window,
  ) {}

  async init(): Promise<void> {
    this.buildSkeleton();
    const fromHash = readHash(this.win.location.hash);
    this.brush = fromHash.brush;
    const runs = await this.api.runs();
    if (runs === null) return;
    this.runs = runs.runs;
    if (!this.runs.length) {
      this.section("abstract").innerHTML =
        '<p class="empty-state">no stored runs — analyze a dataset first</p>';
      return;
    }
    const runSelect = this.root.querySelector("#run-select") as HTMLSelectElement;
    select(runSelect)
      .selectAll("option")
      .data(this.runs)
      .join("option")
      .attr("value", (r) => r.run_id)
      .text((r) => `${r.run_id} (${r.created})`);
    runSelect.addEventListener("change", () => {
      void this.selectRun(runSelect.value);
    });
    const wanted = fromHash.run;
    const initial =
      wanted && this.runs.some((r) => r.run_id === wanted)
        ? wanted
        : this.runs[0].run_id;
    runSelect.value = initial;
    await this.selectRun(initial, fromHash.job);
  }

  async selectRun(runId: string, jobFromHash: string | null = null): Promise<void> {
    this.runId = runId;
    this.jobId = null;
    this.glyphCache.clear();
    this.panels = [];
    const [jobs, overall] = await Promise.all([
      this.api.jobs(runId),
      this.api.glyph(runId, null),
    ]);
    if (jobs === null || overall === null) return;
    this.jobRows = jobs.jobs;
    this.overall = overall;

    const run = this.runs.find((r) => r.run_id === runId)!;
    renderAbstract(this.section("abstract"), run, overall);
    this.jobsHandle = renderJobs(this.section("jobs"), this.jobRows, (jobId) => {
      void this.selectJob(jobId);
    });
    await this.renderGlyphGrid();
    this.renderHistoryView();
    this.syncHash();
    if (jobFromHash && this.jobRows.some((j) => j.job_id === jobFromHash)) {
      await this.selectJob(jobFromHash);
      this.jobsHandle.setSelected(jobFromHash);
    }
  }

  async setGranularity(granularity: Granularity): Promise<void> {
    this.granularity = granularity;
    await this.renderGlyphGrid();
  }

  /**
   * Parallel-coordinates click: highlight the glyph and refocus history on
   * the job's most affected nodes. A job click supersedes any lasso set;
   * deselecting leaves the current panels in place.
   */
  async selectJob(jobId: string | null): Promise<void> {
    this.jobId = jobId;
    this.highlightSelectedGlyph();
    this.jobsHandle?.setSelected(jobId);
    if (jobId !== null) {
      const row = this.jobRows.find((j) => j.job_id === jobId);
      if (row) {
        this.selectedNodes = [];
        const glyph = await this.groupGlyph(jobId);
        const byFatal = glyph
          ? [...glyph.nodes].sort(
              (a, b) => b.fatal_count - a.fatal_count || a.node_id - b.node_id,
            )
          : row.nodes.map((node_id) => ({ node_id, z: 0, fatal_count: 0 }));
        await this.showHistories(
          byFatal.slice(0, JOB_FOCUS_PANELS).map((n) => n.node_id),
          false,
        );
      }
    }
    this.syncHash();
  }

  /** Lasso on any glyph: one history panel per selected node. */
  async lassoSelect(nodeIds: number[]): Promise<void> {
    const unique = [...new Set(nodeIds)].sort((a, b) => a - b);
    if (!unique.length) return; // empty lasso changes nothing
    await this.showHistories(unique, true);
  }

  private async showHistories(nodeIds: number[], persist: boolean): Promise<void> {
    if (this.runId === null) return;
    if (persist) this.selectedNodes = nodeIds;
    const results = await Promise.all(
      nodeIds.map((node) => this.api.history(this.runId!, node)),
    );
    const panels: HistoryPanelData[] = [];
    nodeIds.forEach((nodeId, i) => {
      const history = results[i];
      if (history !== null) panels.push({ nodeId, history });
    });
    this.panels = panels;
    this.renderHistoryView();
  }

  setBrush(range: Range): void {
    this.brush = range;
    this.timelineHandle?.setBrush(range);
    this.renderHistoryView();
    this.syncHash();
  }

  async loadTimeline(series: string): Promise<void> {
    if (this.runId === null) return;
    const container = this.section("timeline-chart");
    try {
      const data = await this.api.timeline(this.runId, series);
      if (data === null) return;
      this.timelineHandle = renderTimeline(container, data, (range) => {
        this.brush = range;
        this.renderHistoryView();
        this.syncHash();
      });
      if (this.brush) this.timelineHandle.setBrush(this.brush);
    } catch (err) {
      container.innerHTML = `<p class="error-note">${
        err instanceof ApiError ? err.message : "failed to load series"
      }</p>`;
    }
  }

  state(): {
    runId: string | null;
    jobId: string | null;
    granularity: Granularity;
    selectedNodes: number[];
    brush: Range;
  } {
    return {
      runId: this.runId,
      jobId: this.jobId,
      granularity: this.granularity,
      selectedNodes: [...this.selectedNodes],
      brush: this.brush === null ? null : [...this.brush] as [number, number],
    };
  }

  private async groupGlyph(jobId: string): Promise<GlyphResponse | null> {
    if (this.runId === null) return null;
    const cached = this.glyphCache.get(jobId);
    if (cached) return cached;
    const glyph = await this.api.glyph(this.runId, jobId);
    if (glyph !== null) this.glyphCache.set(jobId, glyph);
    return glyph;
  }

  private async renderGlyphGrid(): Promise<void> {
    const container = this.section("glyph");
    container.innerHTML = "";
    if (!this.jobRows.length) {
      container.innerHTML = '<p class="empty-state">no jobs in this run</p>';
      return;
    }
    const groups = new Map<string, JobRow[]>();
    for (const row of [...this.jobRows].sort((a, b) => a.start - b.start)) {
      const key = groupKey(row, this.granularity);
      const members = groups.get(key);
      if (members) members.push(row);
      else groups.set(key, [row]);
    }
    const ordered = [...groups.entries()].sort(
      ([, a], [, b]) => a[0].start - b[0].start,
    );
    for (const [label, members] of ordered) {
      const cell = document.createElement("div");
      cell.className = "glyph-cell";
      cell.dataset.groupId = label;
      container.appendChild(cell);
      const glyphs = (
        await Promise.all(members.map((m) => this.groupGlyph(m.job_id)))
      ).filter((g): g is GlyphResponse => g !== null);
      if (!glyphs.length) continue;
      const merged =
        this.granularity === "job" ? glyphs[0] : mergeGlyphs(glyphs, label);
      renderGlyph(cell, merged, {
        size: 240,
        label,
        onLasso: (ids) => void this.lassoSelect(ids),
      });
      cell.addEventListener("dblclick", () => {
        if (this.granularity === "job") void this.selectJob(members[0].job_id);
      });
    }
    this.highlightSelectedGlyph();
  }

  private highlightSelectedGlyph(): void {
    for (const cell of this.section("glyph").querySelectorAll<HTMLElement>(
      ".glyph-cell",
    )) {
      cell.classList.toggle(
        "selected",
        this.jobId !== null && cell.dataset.groupId === this.jobId,
      );
    }
  }

  private renderHistoryView(): void {
    renderHistory(this.section("history"), this.panels, this.brush);
  }

  private syncHash(): void {
    this.win.location.hash = writeHash({
      run: this.runId,
      job: this.jobId,
      brush: this.brush,
    });
  }

  private section(name: string): HTMLElement {
    return this.root.querySelector(`#${name}-view`) as HTMLElement;
  }

  private buildSkeleton(): void {
    this.root.innerHTML = `
      <header class="topbar">
        <h1>modescope</h1>
        <label>run <select id="run-select"></select></label>
        <label>glyphs per <select id="granularity-select"></select></label>
      </header>
      <main class="layout">
        <section id="abstract-view" class="pane"></section>
        <section id="glyph-view" class="pane"></section>
        <section id="jobs-view" class="pane"></section>
        <section id="history-view" class="pane"></section>
        <section id="timeline-view" class="pane">
          <form id="timeline-form">
            <input id="timeline-series" placeholder="node:sensor (e.g. 3:temp0)" />
            <button type="submit">load</button>
          </form>
          <div id="timeline-chart-view"></div>
        </section>
      </main>`;
    const gsel = this.root.querySelector("#granularity-select") as HTMLSelectElement;
    select(gsel)
      .selectAll("option")
      .data(GRANULARITIES)
      .join("option")
      .attr("value", (g) => g)
      .text((g) => g);
    gsel.addEventListener("change", () => {
      void this.setGranularity(gsel.value as Granularity);
    });
    const form = this.root.querySelector("#timeline-form") as HTMLFormElement;
    form.addEventListener("submit", (ev) => {
      ev.preventDefault();
      const input = this.root.querySelector("#timeline-series") as HTMLInputElement;
      if (input.value.trim()) void this.loadTimeline(input.value.trim());
    });
  }
}
