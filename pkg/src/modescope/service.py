"""Read-only JSON endpoints serving stored runs to the browser UI.

Run directories are immutable once their manifest exists, so every
response is a pure function of the run directory and is cached in process.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException, Query

from modescope import store
from modescope.baseline import group_zscores
from modescope.downsample import downsample_minmax
from modescope.ingest import parse_timestamp
from modescope.model import RunNotFoundError, ZScoreReport


def _parse_bound(raw: str | None, name: str) -> float | None:
    if raw is None or raw == "":
        return None
    try:
        return parse_timestamp(raw)
    except (ValueError, TypeError):
        raise HTTPException(status_code=400, detail=f"bad {name!r} timestamp: {raw}")


def _histogram_json(report: ZScoreReport) -> list[dict]:
    edges, counts = group_zscores(report)
    return [
        {"lo": float(edges[i]), "hi": float(edges[i + 1]), "count": int(counts[i])}
        for i in range(len(counts))
    ]


class _RunCache:
    """Loads each run's artifacts once; safe because runs never change."""

    def __init__(self, root: Path):
        self.root = root
        self._runs: dict[str, dict] = {}

    def get(self, run_id: str) -> dict:
        if run_id not in self._runs:
            try:
                manifest = store.load_manifest(self.root, run_id)
            except RunNotFoundError:
                raise HTTPException(status_code=404, detail=f"unknown run {run_id!r}")
            self._runs[run_id] = {
                "manifest": manifest,
                "reports": store.load_reports(self.root, run_id),
                "jobs": store.load_jobs(self.root, run_id),
                "events": store.load_events(self.root, run_id),
                "series": store.load_series(self.root, run_id),
            }
        return self._runs[run_id]


def create_app(runs_root: str | Path) -> FastAPI:
    root = Path(runs_root)
    app = FastAPI(title="modescope", docs_url=None, redoc_url=None)
    cache = _RunCache(root)

    def report_for(run: dict, job_id: str | None) -> ZScoreReport:
        for report in run["reports"]:
            if report.job_id == job_id:
                return report
        raise HTTPException(
            status_code=404, detail=f"no z-score report for job {job_id!r}"
        )

    @app.get("/runs")
    def runs_index() -> dict:
        out = []
        for manifest in store.list_runs(root):
            out.append(
                {
                    "run_id": manifest["run_id"],
                    "created": manifest["created"],
                    "config_hash": manifest["config_hash"],
                    "window": manifest["window"],
                    "summary": manifest["summary"],
                }
            )
        return {"runs": out}

    @app.get("/runs/{run_id}/jobs")
    def jobs_view(run_id: str) -> dict:
        run = cache.get(run_id)
        by_job = {r.job_id: r for r in run["reports"] if r.job_id}
        rows = []
        for job in sorted(run["jobs"], key=lambda j: (j.start, j.job_id)):
            fatal = sum(
                1
                for ev in run["events"]
                if ev.severity == "fatal"
                and ev.node_id in job.node_ids
                and job.start <= ev.timestamp < job.end
            )
            report = by_job.get(job.job_id)
            median_abs_z = (
                float(np.median(np.abs(report.zs()))) if report and report.entries else None
            )
            rows.append(
                {
                    "job_id": job.job_id,
                    "user": job.user,
                    "project": job.project,
                    "nodes": sorted(job.node_ids),
                    "n_nodes": len(job.node_ids),
                    "start": job.start,
                    "end": job.end,
                    "wall_time": job.wall_time,
                    "run_time": job.run_time,
                    "exit_status": job.exit_status,
                    "fatal_events": fatal,
                    "median_abs_z": median_abs_z,
                }
            )
        return {"config_hash": run["manifest"]["config_hash"], "jobs": rows}

    @app.get("/runs/{run_id}/glyph")
    def glyph_view(run_id: str, job: str | None = Query(default=None)) -> dict:
        run = cache.get(run_id)
        jobs = {j.job_id: j for j in run["jobs"]}
        if job is not None and job not in jobs:
            raise HTTPException(status_code=404, detail=f"unknown job {job!r}")
        report = report_for(run, job)

        if job is not None:
            rec = jobs[job]
            status = rec.exit_status
            window = (rec.start, rec.end)
            scope_nodes = rec.node_ids
        else:
            status = "pass" if all(j.exit_status == "pass" for j in run["jobs"]) else "fail"
            window = (run["manifest"]["window"]["start"], run["manifest"]["window"]["end"])
            scope_nodes = None

        error_counts: dict[str, int] = {}
        fatal_by_node: dict[int, int] = {}
        for ev in run["events"]:
            if not (window[0] <= ev.timestamp < window[1]):
                continue
            if scope_nodes is not None and ev.node_id not in scope_nodes:
                continue
            error_counts[ev.category] = error_counts.get(ev.category, 0) + 1
            if ev.severity == "fatal":
                fatal_by_node[ev.node_id] = fatal_by_node.get(ev.node_id, 0) + 1

        per_node: dict[int, list[float]] = {}
        for entry in report.entries:
            per_node.setdefault(entry.series.node_id, []).append(entry.z)
        nodes = [
            {
                "node_id": node,
                "z": float(np.mean(zs)),
                "fatal_count": fatal_by_node.get(node, 0),
            }
            for node, zs in sorted(per_node.items())
        ]
        return {
            "config_hash": run["manifest"]["config_hash"],
            "job_id": job,
            "status": status,
            "error_counts": error_counts,
            "z_histogram": _histogram_json(report),
            "nodes": nodes,
        }

    @app.get("/runs/{run_id}/nodes/{node_id}/history")
    def node_history(
        run_id: str,
        node_id: int,
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = Query(default=None),
    ) -> dict:
        run = cache.get(run_id)
        env = run["series"]
        if node_id not in env.node_ids():
            raise HTTPException(status_code=404, detail=f"unknown node {node_id}")
        lo = _parse_bound(from_, "from")
        hi = _parse_bound(to, "to")
        if lo is not None and hi is not None and lo > hi:
            raise HTTPException(status_code=400, detail="from must not exceed to")
        w0, w1 = env.time_window()
        lo = w0 if lo is None else lo
        hi = w1 if hi is None else hi

        events = [
            {
                "timestamp": ev.timestamp,
                "severity": ev.severity,
                "category": ev.category,
                "message": ev.message,
            }
            for ev in sorted(run["events"], key=lambda e: e.timestamp)
            if ev.node_id == node_id and lo <= ev.timestamp < hi
        ]
        jobs = [
            {
                "job_id": j.job_id,
                "user": j.user,
                "start": j.start,
                "end": j.end,
                "exit_status": j.exit_status,
            }
            for j in sorted(run["jobs"], key=lambda j: j.start)
            if node_id in j.node_ids and j.overlaps(lo, hi)
        ]
        return {
            "config_hash": run["manifest"]["config_hash"],
            "node_id": node_id,
            "from": lo,
            "to": hi,
            "events": events,
            "jobs": jobs,
        }

    @app.get("/runs/{run_id}/timeline")
    def timeline(
        run_id: str,
        series: str,
        from_: str | None = Query(default=None, alias="from"),
        to: str | None = Query(default=None),
        max_points: int = Query(default=500),
    ) -> dict:
        run = cache.get(run_id)
        env = run["series"]
        node_str, sep, sensor = series.partition(":")
        try:
            node = int(node_str)
        except ValueError:
            node = None
        if not sep or node is None or not sensor:
            raise HTTPException(
                status_code=400, detail="series must look like '<node>:<sensor>'"
            )
        row = next(
            (
                i
                for i, k in enumerate(env.series_ids)
                if k.node_id == node and k.sensor_name == sensor
            ),
            None,
        )
        if row is None:
            raise HTTPException(status_code=404, detail=f"unknown series {series!r}")
        if max_points < 2:
            raise HTTPException(status_code=400, detail="max_points must be >= 2")
        lo = _parse_bound(from_, "from")
        hi = _parse_bound(to, "to")
        if lo is not None and hi is not None and lo > hi:
            raise HTTPException(status_code=400, detail="from must not exceed to")

        times = env.times()
        mask = np.ones(times.size, dtype=bool)
        if lo is not None:
            mask &= times >= lo
        if hi is not None:
            mask &= times < hi
        idx_all = np.flatnonzero(mask)
        vals = env.values[row, idx_all]
        keep = downsample_minmax(vals, max_points) if idx_all.size else np.array([], int)
        points = [
            [float(times[idx_all[i]]), float(vals[i])] for i in keep
        ]
        key = env.series_ids[row]
        return {
            "config_hash": run["manifest"]["config_hash"],
            "series": {"node_id": key.node_id, "sensor_name": key.sensor_name, "unit": key.unit},
            "n_total": int(idx_all.size),
            "points": points,
        }

    return app
