/**
 * Parallel-coordinates job view.
 *
 * One polyline per job across the numeric axes (start, nodes, wall time,
 * run time, median |z|), colored by exit status. Hover shows the exact
 * values; clicking a line selects the job (driving the glyph and history
 * views), clicking it again deselects.
 */

import { scaleLinear, scalePoint, select } from "d3";

import { statusColor } from "./color";
import type { JobRow } from "./types";

export interface JobsHandle {
  svg: SVGSVGElement;
  /** Set (or clear) the highlighted job without emitting the callback. */
  setSelected(jobId: string | null): void;
}

interface Axis {
  key: string;
  label: string;
  value(row: JobRow): number;
}

const AXES: Axis[] = [
  { key: "start", label: "start", value: (r) => r.start },
  { key: "n_nodes", label: "nodes", value: (r) => r.n_nodes },
  { key: "wall_time", label: "wall time [s]", value: (r) => r.wall_time },
  { key: "run_time", label: "run time [s]", value: (r) => r.run_time },
  { key: "median_abs_z", label: "median |z|", value: (r) => r.median_abs_z ?? 0 },
];

const MARGIN = { left: 28, right: 28, top: 24, bottom: 12 };

export function renderJobs(
  container: HTMLElement,
  rows: JobRow[],
  onSelect: (jobId: string | null) => void,
  width = 640,
  height = 220,
): JobsHandle {
  container.innerHTML = "";
  const root = select(container)
    .append("svg")
    .attr("class", "jobs")
    .attr("width", width)
    .attr("height", height)
    .attr("viewBox", `0 0 ${width} ${height}`);
  const svg = root.node() as SVGSVGElement;
  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const plot = root
    .append("g")
    .attr("transform", `translate(${MARGIN.left},${MARGIN.top})`);

  const xAxis = scalePoint<string>()
    .domain(AXES.map((a) => a.key))
    .range([0, innerW]);
  const yScales = new Map(
    AXES.map((axis) => {
      const values = rows.map((r) => axis.value(r));
      const lo = values.length ? Math.min(...values) : 0;
      const hi = values.length ? Math.max(...values) : 1;
      const pad = lo === hi ? Math.max(1, Math.abs(lo) * 0.05) : 0;
      return [
        axis.key,
        scaleLinear().domain([lo - pad, hi + pad]).range([innerH, 0]),
      ] as const;
    }),
  );

  const axisGroups = plot
    .selectAll("g.jobs-axis")
    .data(AXES)
    .join("g")
    .attr("class", "jobs-axis")
    .attr("data-axis", (a) => a.key)
    .attr("transform", (a) => `translate(${xAxis(a.key)},0)`);
  axisGroups
    .append("line")
    .attr("y1", 0)
    .attr("y2", innerH)
    .attr("stroke", "#b0bec5");
  axisGroups
    .append("text")
    .attr("class", "jobs-axis-label")
    .attr("y", -8)
    .attr("text-anchor", "middle")
    .text((a) => a.label)
    .append("title")
    .text((a) => {
      const scale = yScales.get(a.key)!;
      const [lo, hi] = scale.domain();
      return `${a.label}: ${lo.toFixed(2)} … ${hi.toFixed(2)}`;
    });

  let selected: string | null = null;

  function applyHighlight(): void {
    plot
      .selectAll<SVGPathElement, JobRow>(".job-line")
      .classed("selected", (d) => d.job_id === selected)
      .attr("stroke-width", (d) => (d.job_id === selected ? 3 : 1.4))
      .attr("stroke-opacity", (d) =>
        selected === null ? 0.75 : d.job_id === selected ? 1 : 0.25,
      );
  }

  plot
    .selectAll("path.job-line")
    .data(rows)
    .join("path")
    .attr("class", "job-line")
    .attr("data-job-id", (d) => d.job_id)
    .attr("fill", "none")
    .attr("stroke", (d) => statusColor(d.exit_status))
    .attr("d", (d) =>
      AXES.map((axis, i) => {
        const px = xAxis(axis.key) ?? 0;
        const py = yScales.get(axis.key)!(axis.value(d));
        return `${i === 0 ? "M" : "L"}${px},${py}`;
      }).join(""),
    )
    .on("click", (_event, d) => {
      selected = selected === d.job_id ? null : d.job_id;
      applyHighlight();
      onSelect(selected);
    })
    .append("title")
    .text((d) =>
      [
        `${d.job_id} (${d.user}, ${d.project})`,
        `status: ${d.exit_status}`,
        `start: ${d.start}`,
        `nodes: ${d.n_nodes}`,
        `wall time: ${d.wall_time}`,
        `run time: ${d.run_time}`,
        `median |z|: ${d.median_abs_z ?? "n/a"}`,
        `fatal events: ${d.fatal_events}`,
      ].join("\n"),
    );

  applyHighlight();

  return {
    svg,
    setSelected(jobId: string | null): void {
      selected = jobId;
      applyHighlight();
    },
  };
}
