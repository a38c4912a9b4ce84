/**
 * Brushable series timeline.
 *
 * Draws the downsampled points as a line; horizontal dragging brushes a time
 * range that is reported to the app (and mirrored into the URL hash so views
 * are shareable). Brushing the full extent, or clicking without dragging,
 * clears the filter.
 */

import { extent, line, scaleLinear, select } from "d3";

import type { TimelineResponse } from "./types";

export type Range = [number, number] | null;

export interface TimelineHandle {
  svg: SVGSVGElement;
  /** Programmatic brush in data (time) coordinates; null clears. */
  setBrush(range: Range): void;
  brushRange(): Range;
}

const MARGIN = { left: 44, right: 12, top: 8, bottom: 20 };

export function renderTimeline(
  container: HTMLElement,
  data: TimelineResponse,
  onBrush: (range: Range) => void,
  width = 640,
  height = 140,
): TimelineHandle {
  container.innerHTML = "";
  const root = select(container)
    .append("svg")
    .attr("class", "timeline")
    .attr("width", width)
    .attr("height", height)
    .attr("viewBox", `0 0 ${width} ${height}`);
  const svg = root.node() as SVGSVGElement;

  const innerW = width - MARGIN.left - MARGIN.right;
  const innerH = height - MARGIN.top - MARGIN.bottom;
  const times = data.points.map((p) => p[0]);
  const values = data.points.map((p) => p[1]);
  const [t0, t1] = times.length ? [times[0], times[times.length - 1]] : [0, 1];
  const [v0, v1] = (extent(values) as [number, number]) ?? [0, 1];
  const x = scaleLinear().domain([t0, t1]).range([0, innerW]);
  const y = scaleLinear()
    .domain(v0 === v1 ? [v0 - 1, v1 + 1] : [v0, v1])
    .range([innerH, 0])
    .nice();

  const plot = root
    .append("g")
    .attr("class", "timeline-plot")
    .attr("transform", `translate(${MARGIN.left},${MARGIN.top})`);

  plot
    .append("text")
    .attr("class", "timeline-title")
    .attr("x", 0)
    .attr("y", -1)
    .text(
      `${data.series.node_id}:${data.series.sensor_name} [${data.series.unit}] · ` +
        `${data.points.length} of ${data.n_total} samples`,
    );

  const path = line<[number, number]>()
    .x((p) => x(p[0]))
    .y((p) => y(p[1]));
  plot
    .append("path")
    .attr("class", "timeline-line")
    .attr("fill", "none")
    .attr("stroke", "#546e7a")
    .attr("stroke-width", 1.2)
    .attr("d", path(data.points) ?? "");

  const brushRect = plot
    .append("rect")
    .attr("class", "timeline-brush")
    .attr("y", 0)
    .attr("height", innerH)
    .attr("width", 0)
    .attr("x", 0)
    .attr("fill", "rgba(33, 150, 243, 0.15)")
    .attr("stroke", "#2196f3")
    .attr("visibility", "hidden");

  let current: Range = null;

  function showBrush(range: Range): void {
    current = range;
    if (range === null) {
      brushRect.attr("visibility", "hidden").attr("width", 0);
      return;
    }
    const px0 = Math.max(0, x(range[0]));
    const px1 = Math.min(innerW, x(range[1]));
    brushRect
      .attr("visibility", "visible")
      .attr("x", px0)
      .attr("width", Math.max(0, px1 - px0));
  }

  function commit(range: Range): void {
    // brushing (essentially) the whole window is the same as no filter
    if (range !== null && range[0] <= t0 && range[1] >= t1) range = null;
    showBrush(range);
    onBrush(range);
  }

  let dragStart: number | null = null;
  const pxOf = (ev: MouseEvent): number => {
    const rect = svg.getBoundingClientRect();
    return ev.clientX - rect.left - MARGIN.left;
  };
  svg.addEventListener("pointerdown", (ev: Event) => {
    dragStart = pxOf(ev as MouseEvent);
  });
  svg.addEventListener("pointermove", (ev: Event) => {
    if (dragStart === null) return;
    const now = pxOf(ev as MouseEvent);
    showBrush([
      x.invert(Math.min(dragStart, now)),
      x.invert(Math.max(dragStart, now)),
    ]);
  });
  svg.addEventListener("pointerup", (ev: Event) => {
    if (dragStart === null) return;
    const end = pxOf(ev as MouseEvent);
    const lo = Math.min(dragStart, end);
    const hi = Math.max(dragStart, end);
    dragStart = null;
    if (hi - lo < 2) {
      commit(null); // a click clears the brush
    } else {
      commit([x.invert(lo), x.invert(hi)]);
    }
  });

  return {
    svg,
    setBrush(range: Range): void {
      commit(range);
    },
    brushRange: () => (current === null ? null : [...current] as [number, number]),
  };
}

/** Merge a brush range into a URL hash string, preserving other params. */
export function encodeBrush(hash: string, range: Range): string {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  if (range === null) {
    params.delete("from");
    params.delete("to");
  } else {
    params.set("from", String(range[0]));
    params.set("to", String(range[1]));
  }
  const out = params.toString();
  return out ? `#${out}` : "";
}

export function decodeBrush(hash: string): Range {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const from = Number(params.get("from"));
  const to = Number(params.get("to"));
  if (!params.has("from") || !params.has("to")) return null;
  if (!Number.isFinite(from) || !Number.isFinite(to) || from >= to) return null;
  return [from, to];
}
