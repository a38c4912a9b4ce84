/**
 * Radial job/group glyph.
 *
 * From the inside out: a center circle colored by pass/fail status, a pie
 * ring of hardware-error category counts, a pie ring of the z-score
 * histogram bins, and a radial scatter with one dot per node — node ids
 * strictly ascending clockwise from 12 o'clock, dot radius growing with the
 * node's fatal-error count, dot color and radial position encoding its z.
 *
 * Scrolling zooms into a sector of the node axis; zooming only narrows the
 * visible id window, it never reorders ids. Double-click resets.
 */

import { arc, pie, select } from "d3";
import type { PieArcDatum } from "d3";

import { statusColor, zColor } from "./color";
import type { GlyphNode, GlyphResponse, HistogramBin } from "./types";
import { nodesByAscendingId } from "./types";
import { attachLasso } from "./lasso";

export interface GlyphOptions {
  size?: number;
  onLasso?: (nodeIds: number[]) => void;
  label?: string;
}

export interface NodePosition {
  nodeId: number;
  x: number;
  y: number;
  angle: number;
}

export interface GlyphHandle {
  svg: SVGSVGElement;
  /** Currently displayed dots, in draw order (ascending node id). */
  positions(): NodePosition[];
  /** Zoom the node axis to a fraction window [f0, f1] ⊂ [0, 1]. */
  zoomTo(window: [number, number]): void;
  resetZoom(): void;
  zoomWindow(): [number, number];
}

const Z_SPAN = 3; // radial extent of the scatter band in z units

function clamp(v: number, lo: number, hi: number): number {
  return Math.min(hi, Math.max(lo, v));
}

/** Clockwise-from-top polar to SVG coordinates around center c. */
function polar(c: number, radius: number, angle: number): [number, number] {
  return [c + radius * Math.sin(angle), c - radius * Math.cos(angle)];
}

export function dotRadius(fatalCount: number): number {
  return Math.min(8, 1.6 + 1.2 * Math.sqrt(Math.max(0, fatalCount)));
}

export function renderGlyph(
  container: HTMLElement,
  glyph: GlyphResponse,
  opts: GlyphOptions = {},
): GlyphHandle {
  const size = opts.size ?? 320;
  const c = size / 2;
  const rCenter = 0.1 * size;
  const rError: [number, number] = [0.12 * size, 0.18 * size];
  const rHist: [number, number] = [0.2 * size, 0.26 * size];
  const rScatter: [number, number] = [0.3 * size, 0.46 * size];

  container.innerHTML = "";
  const root = select(container)
    .append("svg")
    .attr("class", "glyph")
    .attr("width", size)
    .attr("height", size)
    .attr("viewBox", `0 0 ${size} ${size}`);
  const svg = root.node() as SVGSVGElement;

  if (opts.label !== undefined) {
    root
      .append("text")
      .attr("class", "glyph-label")
      .attr("x", c)
      .attr("y", 12)
      .attr("text-anchor", "middle")
      .text(opts.label);
  }

  root
    .append("circle")
    .attr("class", "glyph-center")
    .attr("cx", c)
    .attr("cy", c)
    .attr("r", rCenter)
    .attr("fill", statusColor(glyph.status))
    .attr("data-status", glyph.status)
    .append("title")
    .text(`${glyph.job_id ?? "all jobs"}: ${glyph.status}`);

  const errorEntries = Object.entries(glyph.error_counts).sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  const errorArc = arc<PieArcDatum<[string, number]>>()
    .innerRadius(rError[0])
    .outerRadius(rError[1]);
  const errorPie = pie<[string, number]>()
    .sort(null)
    .value(([, count]) => count);
  const errorData = errorEntries.length ? errorEntries : [["none", 1] as [string, number]];
  root
    .append("g")
    .attr("class", "glyph-error-ring")
    .attr("transform", `translate(${c},${c})`)
    .selectAll("path")
    .data(errorPie(errorData))
    .join("path")
    .attr("class", "glyph-error-arc")
    .attr("d", errorArc)
    .attr("data-category", (d) => d.data[0])
    .attr("data-count", (d) => (errorEntries.length ? d.data[1] : 0))
    .attr("fill", (_, i) => (errorEntries.length ? ERROR_PALETTE[i % ERROR_PALETTE.length] : "#eceff1"))
    .append("title")
    .text((d) => (errorEntries.length ? `${d.data[0]}: ${d.data[1]}` : "no errors"));

  const histTotal = glyph.z_histogram.reduce((acc, b) => acc + b.count, 0);
  const histArc = arc<PieArcDatum<HistogramBin>>()
    .innerRadius(rHist[0])
    .outerRadius(rHist[1]);
  const histPie = pie<HistogramBin>()
    .sort(null)
    .value((b) => (histTotal ? b.count : 1));
  root
    .append("g")
    .attr("class", "glyph-z-ring")
    .attr("transform", `translate(${c},${c})`)
    .selectAll("path")
    .data(histPie(glyph.z_histogram))
    .join("path")
    .attr("class", "glyph-z-arc")
    .attr("d", histArc)
    .attr("data-lo", (d) => d.data.lo)
    .attr("data-hi", (d) => d.data.hi)
    .attr("data-count", (d) => d.data.count)
    .attr("fill", (d) => zColor((d.data.lo + d.data.hi) / 2))
    .append("title")
    .text((d) => `z in [${d.data.lo}, ${d.data.hi}): ${d.data.count}`);

  root
    .append("circle")
    .attr("class", "glyph-zero-circle")
    .attr("cx", c)
    .attr("cy", c)
    .attr("r", (rScatter[0] + rScatter[1]) / 2)
    .attr("fill", "none")
    .attr("stroke", "#cfd8dc")
    .attr("stroke-dasharray", "2,3");

  const scatterLayer = root.append("g").attr("class", "glyph-scatter");
  const ordered = nodesByAscendingId(glyph);
  let window: [number, number] = [0, 1];
  let shown: NodePosition[] = [];

  function drawScatter(): void {
    const [w0, w1] = window;
    const span = Math.max(w1 - w0, 1e-9);
    const n = ordered.length;
    const visible: { node: GlyphNode; frac: number }[] = [];
    ordered.forEach((node, i) => {
      const frac = n > 1 ? i / n : 0;
      if (frac >= w0 && frac < w1) visible.push({ node, frac });
    });
    shown = visible.map(({ node, frac }) => {
      const angle = ((frac - w0) / span) * 2 * Math.PI;
      const radial =
        rScatter[0] +
        ((clamp(node.z, -Z_SPAN, Z_SPAN) + Z_SPAN) / (2 * Z_SPAN)) *
          (rScatter[1] - rScatter[0]);
      const [x, y] = polar(c, radial, angle);
      return { nodeId: node.node_id, x, y, angle };
    });
    scatterLayer
      .selectAll("circle")
      .data(shown.map((p, i) => ({ p, node: visible[i].node })))
      .join("circle")
      .attr("class", "glyph-node")
      .attr("cx", (d) => d.p.x)
      .attr("cy", (d) => d.p.y)
      .attr("r", (d) => dotRadius(d.node.fatal_count))
      .attr("fill", (d) => zColor(d.node.z))
      .attr("data-node-id", (d) => d.p.nodeId)
      .attr("data-angle", (d) => d.p.angle.toFixed(6))
      .attr("data-z", (d) => d.node.z.toFixed(4))
      .selectAll("title")
      .data((d) => [d])
      .join("title")
      .text(
        (d) =>
          `node ${d.p.nodeId} · z ${d.node.z.toFixed(2)} · ${d.node.fatal_count} fatal`,
      );
  }

  drawScatter();

  const handle: GlyphHandle = {
    svg,
    positions: () => [...shown],
    zoomTo(win: [number, number]): void {
      const w0 = clamp(Math.min(win[0], win[1]), 0, 1);
      const w1 = clamp(Math.max(win[0], win[1]), 0, 1);
      window = w1 - w0 < 1e-4 ? window : [w0, w1];
      drawScatter();
    },
    resetZoom(): void {
      window = [0, 1];
      drawScatter();
    },
    zoomWindow: () => [...window] as [number, number],
  };

  svg.addEventListener("wheel", (ev: WheelEvent) => {
    ev.preventDefault();
    const rect = svg.getBoundingClientRect();
    const dx = ev.clientX - rect.left - c;
    const dy = ev.clientY - rect.top - c;
    // pointer angle, clockwise from top, back to a fraction of the window
    const angle = (Math.atan2(dx, -dy) + 2 * Math.PI) % (2 * Math.PI);
    const [w0, w1] = window;
    const focus = w0 + (angle / (2 * Math.PI)) * (w1 - w0);
    const factor = ev.deltaY < 0 ? 0.8 : 1.25;
    const half = ((w1 - w0) * factor) / 2;
    handle.zoomTo([focus - half, focus + half]);
  });
  svg.addEventListener("dblclick", () => handle.resetZoom());

  if (opts.onLasso) {
    attachLasso(svg, () => handle.positions(), opts.onLasso);
  }

  return handle;
}

const ERROR_PALETTE = [
  "#8e24aa",
  "#5c6bc0",
  "#26a69a",
  "#ef6c00",
  "#6d4c41",
  "#c2185b",
  "#7cb342",
  "#455a64",
];
