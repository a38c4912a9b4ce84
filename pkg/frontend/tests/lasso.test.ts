import { describe, expect, it } from "vitest";

import { attachLasso, nodesInPolygon, pointInPolygon } from "../src/lasso";
import type { Point } from "../src/lasso";
import { mouse } from "./helpers";

const square: Point[] = [
  [0, 0],
  [10, 0],
  [10, 10],
  [0, 10],
];

describe("pointInPolygon", () => {
  it("accepts interior points and rejects exterior points", () => {
    expect(pointInPolygon([5, 5], square)).toBe(true);
    expect(pointInPolygon([15, 5], square)).toBe(false);
    expect(pointInPolygon([-1, -1], square)).toBe(false);
  });

  it("counts boundary points as inside", () => {
    expect(pointInPolygon([0, 5], square)).toBe(true);
    expect(pointInPolygon([5, 0], square)).toBe(true);
  });

  it("handles concave polygons", () => {
    const lShape: Point[] = [
      [0, 0],
      [10, 0],
      [10, 4],
      [4, 4],
      [4, 10],
      [0, 10],
    ];
    expect(pointInPolygon([2, 8], lShape)).toBe(true);
    expect(pointInPolygon([8, 8], lShape)).toBe(false);
  });

  it("rejects everything for degenerate polygons", () => {
    expect(pointInPolygon([5, 5], [[0, 0], [10, 10]])).toBe(false);
  });
});

describe("nodesInPolygon", () => {
  it("returns exactly the enclosed node ids", () => {
    const dots = [
      { nodeId: 1, x: 2, y: 2 },
      { nodeId: 2, x: 8, y: 8 },
      { nodeId: 3, x: 20, y: 20 },
    ];
    expect(nodesInPolygon(dots, square)).toEqual([1, 2]);
  });
});

describe("attachLasso", () => {
  function svgEl(): SVGSVGElement {
    const svg = document.createElementNS("http://www.w3.org/2000/svg", "svg");
    document.body.appendChild(svg);
    return svg;
  }

  it("reports nodes enclosed by a drawn polygon", () => {
    const svg = svgEl();
    const dots = [
      { nodeId: 7, x: 5, y: 5 },
      { nodeId: 8, x: 50, y: 50 },
    ];
    let got: number[] | null = null;
    attachLasso(svg, () => dots, (ids) => (got = ids));
    svg.dispatchEvent(mouse("pointerdown", 0, 0));
    svg.dispatchEvent(mouse("pointermove", 20, 0));
    svg.dispatchEvent(mouse("pointermove", 20, 20));
    svg.dispatchEvent(mouse("pointermove", 0, 20));
    svg.dispatchEvent(mouse("pointerup", 0, 20));
    expect(got).toEqual([7]);
    // the lasso overlay is cleared after release
    expect(svg.querySelector(".lasso-path")!.getAttribute("d")).toBe("");
  });

  it("a plain click selects nothing", () => {
    const svg = svgEl();
    let fired = 0;
    attachLasso(svg, () => [{ nodeId: 1, x: 0, y: 0 }], () => fired++);
    svg.dispatchEvent(mouse("pointerdown", 0, 0));
    svg.dispatchEvent(mouse("pointerup", 0, 0));
    expect(fired).toBe(0);
  });

  it("detaches cleanly", () => {
    const svg = svgEl();
    let fired = 0;
    const detach = attachLasso(
      svg,
      () => [{ nodeId: 1, x: 5, y: 5 }],
      () => fired++,
    );
    detach();
    svg.dispatchEvent(mouse("pointerdown", 0, 0));
    svg.dispatchEvent(mouse("pointermove", 20, 0));
    svg.dispatchEvent(mouse("pointermove", 20, 20));
    svg.dispatchEvent(mouse("pointerup", 20, 20));
    expect(fired).toBe(0);
  });
});
