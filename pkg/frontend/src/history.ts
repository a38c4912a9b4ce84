/**
 * Node-history panels: one panel per lasso-selected node listing its
 * hardware events (messages shown verbatim) and the jobs that touched it.
 *
 * A time range — usually the timeline brush — narrows both lists; a panel
 * whose events all fall outside the range shows an explicit notice instead
 * of rendering empty.
 */

import { select } from "d3";

import { SEVERITY_COLORS } from "./color";
import type { HistoryResponse } from "./types";

export interface HistoryPanelData {
  nodeId: number;
  history: HistoryResponse;
}

export type Range = [number, number] | null;

function formatTime(t: number): string {
  return new Date(t * 1000).toISOString().replace(".000Z", "Z");
}

export function renderHistory(
  container: HTMLElement,
  panels: HistoryPanelData[],
  range: Range = null,
): void {
  container.innerHTML = "";
  const root = select(container);
  if (!panels.length) {
    root.append("p").attr("class", "history-none").text("lasso nodes on a glyph to inspect their history");
    return;
  }
  for (const { nodeId, history } of panels) {
    const panel = root
      .append("section")
      .attr("class", "history-panel")
      .attr("data-node-id", nodeId);
    panel.append("h3").text(`node ${nodeId}`);

    const inRange = (t: number): boolean =>
      range === null || (t >= range[0] && t < range[1]);
    const events = history.events.filter((ev) => inRange(ev.timestamp));
    const jobs = history.jobs.filter(
      (j) => range === null || (j.start < range[1] && j.end > range[0]),
    );

    if (!events.length) {
      panel
        .append("p")
        .attr("class", "history-empty")
        .text(
          range === null
            ? "no hardware events for this node"
            : "no hardware events in the brushed range",
        );
    } else {
      const items = panel
        .append("ul")
        .attr("class", "history-events")
        .selectAll("li")
        .data(events)
        .join("li")
        .attr("class", "history-event")
        .attr("data-severity", (d) => d.severity)
        .attr("data-timestamp", (d) => d.timestamp);
      items
        .append("span")
        .attr("class", "history-time")
        .text((d) => formatTime(d.timestamp));
      items
        .append("span")
        .attr("class", "history-severity")
        .style("color", (d) => SEVERITY_COLORS[d.severity] ?? "inherit")
        .text((d) => d.severity);
      items
        .append("span")
        .attr("class", "history-category")
        .text((d) => d.category);
      items
        .append("span")
        .attr("class", "history-message")
        .text((d) => d.message);
    }

    panel
      .append("ul")
      .attr("class", "history-jobs")
      .selectAll("li")
      .data(jobs)
      .join("li")
      .attr("class", "history-job")
      .attr("data-job-id", (d) => d.job_id)
      .attr("data-exit-status", (d) => d.exit_status)
      .text(
        (d) =>
          `${d.job_id} (${d.user}) ${formatTime(d.start)} – ${formatTime(d.end)}: ${d.exit_status}`,
      );
  }
}
