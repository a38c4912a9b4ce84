import { describe, expect, it } from "vitest";

import { renderJobs } from "../src/jobs";
import type { JobsResponse } from "../src/types";
import { FIXTURES, container } from "./helpers";

const jobs = (FIXTURES.jobs as JobsResponse).jobs;

describe("parallel-coordinates job view", () => {
  it("draws one polyline per job plus the labeled axes", () => {
    const el = container();
    renderJobs(el, jobs, () => {});
    expect(el.querySelectorAll(".job-line")).toHaveLength(jobs.length);
    const axes = [...el.querySelectorAll(".jobs-axis")].map((a) =>
      a.getAttribute("data-axis"),
    );
    expect(axes).toEqual([
      "start",
      "n_nodes",
      "wall_time",
      "run_time",
      "median_abs_z",
    ]);
  });

  it("colors lines by exit status", () => {
    const el = container();
    renderJobs(el, jobs, () => {});
    const byId = new Map(
      [...el.querySelectorAll<SVGPathElement>(".job-line")].map((p) => [
        p.getAttribute("data-job-id"),
        p.getAttribute("stroke"),
      ]),
    );
    const passId = jobs.find((j) => j.exit_status === "pass")!.job_id;
    const failId = jobs.find((j) => j.exit_status === "fail")!.job_id;
    expect(byId.get(passId)).toBe("#9e9e9e");
    expect(byId.get(failId)).toBe("#d32f2f");
  });

  it("click selects (callback + emphasis), second click deselects", () => {
    const el = container();
    const seen: (string | null)[] = [];
    renderJobs(el, jobs, (id) => seen.push(id));
    const line = el.querySelector<SVGPathElement>(
      `.job-line[data-job-id="${jobs[1].job_id}"]`,
    )!;
    line.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(seen).toEqual([jobs[1].job_id]);
    expect(line.getAttribute("stroke-width")).toBe("3");
    const other = el.querySelector<SVGPathElement>(
      `.job-line[data-job-id="${jobs[0].job_id}"]`,
    )!;
    expect(Number(other.getAttribute("opacity"))).toBeLessThan(1);

    line.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(seen).toEqual([jobs[1].job_id, null]);
    expect(line.getAttribute("stroke-width")).not.toBe("3");
  });

  it("hover tooltip carries the exact served values", () => {
    const el = container();
    renderJobs(el, jobs, () => {});
    const j = jobs[0];
    const title = el
      .querySelector(`.job-line[data-job-id="${j.job_id}"] title`)!
      .textContent!;
    expect(title).toContain(j.job_id);
    expect(title).toContain(j.user);
    expect(title).toContain(j.project);
    expect(title).toContain(j.exit_status);
    expect(title).toContain(String(j.n_nodes));
    expect(title).toContain(String(j.wall_time));
  });

  it("setSelected mirrors an external selection without emitting", () => {
    const el = container();
    const seen: (string | null)[] = [];
    const handle = renderJobs(el, jobs, (id) => seen.push(id));
    handle.setSelected(jobs[2].job_id);
    expect(seen).toHaveLength(0);
    const line = el.querySelector<SVGPathElement>(
      `.job-line[data-job-id="${jobs[2].job_id}"]`,
    )!;
    expect(line.getAttribute("stroke-width")).toBe("3");
    handle.setSelected(null);
    expect(line.getAttribute("stroke-width")).not.toBe("3");
  });
});
