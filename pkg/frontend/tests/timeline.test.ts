import { describe, expect, it } from "vitest";

import { decodeBrush, encodeBrush, renderTimeline } from "../src/timeline";
import type { Range } from "../src/timeline";
import type { TimelineResponse } from "../src/types";
import { FIXTURES, container, mouse } from "./helpers";

const data = FIXTURES.timeline as TimelineResponse;
const T0 = data.points[0][0];
const T1 = data.points[data.points.length - 1][0];

describe("timeline rendering", () => {
  it("draws the downsampled series and labels it", () => {
    const el = container();
    renderTimeline(el, data, () => {});
    expect(el.querySelector(".timeline-line")!.getAttribute("d")).toContain("M");
    expect(el.querySelector(".timeline-title")!.textContent).toContain(
      `${data.series.node_id}:${data.series.sensor_name}`,
    );
    expect(el.querySelector(".timeline-title")!.textContent).toContain(
      String(data.n_total),
    );
  });

  it("programmatic brush reports the range and shows the overlay", () => {
    const el = container();
    let got: Range | undefined;
    const handle = renderTimeline(el, data, (r) => (got = r));
    const mid = (T0 + T1) / 2;
    handle.setBrush([T0, mid]);
    expect(got).toEqual([T0, mid]);
    expect(handle.brushRange()).toEqual([T0, mid]);
    expect(
      el.querySelector(".timeline-brush")!.getAttribute("visibility"),
    ).toBe("visible");
  });

  it("brushing the full extent clears the filter", () => {
    const el = container();
    let got: Range | undefined = [1, 2];
    const handle = renderTimeline(el, data, (r) => (got = r));
    handle.setBrush([T0 - 100, T1 + 100]);
    expect(got).toBeNull();
    expect(handle.brushRange()).toBeNull();
  });

  it("dragging brushes a time range; clicking clears it", () => {
    const el = container();
    const seen: (Range | undefined)[] = [];
    renderTimeline(el, data, (r) => seen.push(r), 640, 140);
    const svg = el.querySelector("svg")!;
    // drag across part of the plot (margin.left = 44)
    svg.dispatchEvent(mouse("pointerdown", 100, 60));
    svg.dispatchEvent(mouse("pointermove", 300, 60));
    svg.dispatchEvent(mouse("pointerup", 300, 60));
    expect(seen).toHaveLength(1);
    const range = seen[0] as [number, number];
    expect(range[0]).toBeGreaterThan(T0);
    expect(range[1]).toBeLessThan(T1);
    expect(range[0]).toBeLessThan(range[1]);

    svg.dispatchEvent(mouse("pointerdown", 200, 60));
    svg.dispatchEvent(mouse("pointerup", 200, 60));
    expect(seen).toHaveLength(2);
    expect(seen[1]).toBeNull();
  });
});

describe("brush state in the URL hash", () => {
  it("round-trips a range", () => {
    const hash = encodeBrush("", [123.5, 456.25]);
    expect(decodeBrush(hash)).toEqual([123.5, 456.25]);
  });

  it("clearing removes the params but keeps others", () => {
    const hash = encodeBrush("#run=abc&from=1&to=2", null);
    expect(hash).toBe("#run=abc");
    expect(decodeBrush(hash)).toBeNull();
  });

  it("rejects malformed or inverted ranges", () => {
    expect(decodeBrush("#from=9&to=3")).toBeNull();
    expect(decodeBrush("#from=x&to=3")).toBeNull();
    expect(decodeBrush("")).toBeNull();
  });
});
