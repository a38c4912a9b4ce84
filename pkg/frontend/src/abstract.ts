/**
 * Abstract view: the whole-run aggregate — error totals by category and the
 * z histogram over every scored series, labeled as the union across jobs.
 */

import { select } from "d3";

import { zColor } from "./color";
import type { GlyphResponse, RunRow } from "./types";

export function renderAbstract(
  container: HTMLElement,
  run: RunRow,
  overall: GlyphResponse,
): void {
  container.innerHTML = "";
  const root = select(container);

  const header = root.append("div").attr("class", "abstract-header");
  header.append("h2").text(`run ${run.run_id}`);
  header
    .append("p")
    .attr("class", "abstract-meta")
    .text(
      `config ${overall.config_hash} · status ${overall.status} · ` +
        `window ${new Date(run.window.start * 1000).toISOString()} – ` +
        `${new Date(run.window.end * 1000).toISOString()}`,
    );

  const errors = root.append("div").attr("class", "abstract-errors");
  errors.append("h4").text("hardware errors by category (all jobs)");
  const entries = Object.entries(overall.error_counts).sort(([a], [b]) =>
    a < b ? -1 : a > b ? 1 : 0,
  );
  if (!entries.length) {
    errors.append("p").attr("class", "abstract-no-errors").text("none recorded");
  } else {
    const maxCount = Math.max(...entries.map(([, c]) => c));
    const rows = errors
      .append("ul")
      .selectAll("li")
      .data(entries)
      .join("li")
      .attr("class", "abstract-total")
      .attr("data-category", ([cat]) => cat)
      .attr("data-count", ([, count]) => count);
    rows.append("span").attr("class", "abstract-cat").text(([cat]) => cat);
    rows
      .append("span")
      .attr("class", "abstract-bar")
      .style("display", "inline-block")
      .style("background", "#90a4ae")
      .style("height", "0.7em")
      .style("width", ([, count]) => `${(120 * count) / maxCount}px`);
    rows.append("span").attr("class", "abstract-count").text(([, count]) => ` ${count}`);
  }

  const hist = root.append("div").attr("class", "abstract-hist");
  hist.append("h4").text("z histogram, union of all series");
  const total = overall.z_histogram.reduce((acc, b) => acc + b.count, 0) || 1;
  const bins = hist
    .append("div")
    .attr("class", "abstract-zbins")
    .selectAll("span")
    .data(overall.z_histogram)
    .join("span")
    .attr("class", "abstract-zbin")
    .attr("data-lo", (b) => b.lo)
    .attr("data-hi", (b) => b.hi)
    .attr("data-count", (b) => b.count)
    .attr("title", (b) => `[${b.lo}, ${b.hi}): ${b.count}`);
  bins
    .append("span")
    .attr("class", "abstract-zbar")
    .style("display", "inline-block")
    .style("width", "28px")
    .style("background", (b) => zColor((b.lo + b.hi) / 2))
    .style("height", (b) => `${4 + (40 * b.count) / total}px`);
  bins
    .append("span")
    .attr("class", "abstract-zlabel")
    .text((b) => `[${b.lo},${b.hi})`);
}
