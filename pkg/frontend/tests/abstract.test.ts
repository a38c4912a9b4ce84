import { describe, expect, it } from "vitest";

import { renderAbstract } from "../src/abstract";
import type { GlyphResponse, RunRow, RunsResponse } from "../src/types";
import { FIXTURES, container } from "./helpers";

const run = (FIXTURES.runs as RunsResponse).runs[0] as RunRow;
const overall = FIXTURES.glyphOverall as GlyphResponse;

describe("run abstract panel", () => {
  it("shows run identity, status, and the snapshot window", () => {
    const el = container();
    renderAbstract(el, run, overall);
    expect(el.querySelector("h2")!.textContent).toContain(run.run_id);
    const meta = el.querySelector(".abstract-meta")!.textContent!;
    expect(meta).toContain(overall.status);
    expect(meta).toContain(run.config_hash);
    expect(meta).toContain("2020-01-06");
  });

  it("lists error totals per category with the served counts", () => {
    const el = container();
    renderAbstract(el, run, overall);
    const items = [...el.querySelectorAll(".abstract-total")];
    expect(items.length).toBe(Object.keys(overall.error_counts).length);
    for (const item of items) {
      const cat = item.getAttribute("data-category")!;
      expect(Number(item.getAttribute("data-count"))).toBe(
        overall.error_counts[cat],
      );
      expect(item.textContent).toContain(cat);
    }
  });

  it("draws the four z-histogram bins with served counts", () => {
    const el = container();
    renderAbstract(el, run, overall);
    const bins = [...el.querySelectorAll(".abstract-zbin")];
    expect(bins).toHaveLength(overall.z_histogram.length);
    bins.forEach((bin, i) => {
      expect(Number(bin.getAttribute("data-lo"))).toBeCloseTo(
        overall.z_histogram[i].lo,
      );
      expect(Number(bin.getAttribute("data-count"))).toBe(
        overall.z_histogram[i].count,
      );
    });
  });

  it("handles a run with no hardware errors", () => {
    const el = container();
    const clean: GlyphResponse = {
      ...overall,
      error_counts: {},
      status: "pass",
    };
    renderAbstract(el, run, clean);
    expect(el.querySelector(".abstract-no-errors")).not.toBeNull();
    expect(el.querySelectorAll(".abstract-total")).toHaveLength(0);
  });
});
