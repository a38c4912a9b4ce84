"""File-backed run store: one immutable directory per analysis run.

Layout under <root>/<run_id>/:
  series.npz     snapshot matrix (values, grid, series identity, gaps)
  tree.json      decomposition tree
  bands.json     whole-window band magnitudes
  zscores.jsonl  one z-score report per line (overall first, then per job)
  jobs.jsonl     job records (epoch seconds)
  hwevents.jsonl hardware events
  manifest.json  written last; a directory without it is not a run yet

Single writer per run directory, any number of concurrent readers.
"""

from __future__ import annotations

import hashlib
import json
import time
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from modescope.model import (
    BandMagnitudes,
    GapRecord,
    HardwareEvent,
    JobRecord,
    MrDmdTree,
    RunNotFoundError,
    SeriesKey,
    SnapshotMatrix,
    ZScoreReport,
)

MANIFEST = "manifest.json"


def config_hash(config: dict) -> str:
    payload = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def dataset_hash(paths: Iterable[str | Path]) -> str:
    h = hashlib.sha256()
    for p in sorted(str(p) for p in paths):
        h.update(Path(p).read_bytes())
    return h.hexdigest()[:12]


def run_id_for(config: dict, data_hash: str) -> str:
    return config_hash({"config": config, "dataset": data_hash})


def _save_series(path: Path, env: SnapshotMatrix) -> None:
    np.savez_compressed(
        path,
        values=env.values,
        dt=np.float64(env.dt),
        t0=np.float64(env.t0),
        node_ids=np.array([k.node_id for k in env.series_ids], dtype=np.int64),
        sensor_names=np.array([k.sensor_name for k in env.series_ids]),
        units=np.array([k.unit for k in env.series_ids]),
        gaps=np.array(
            [[g.series_index, g.start, g.end] for g in env.gaps], dtype=np.float64
        ).reshape(-1, 3),
    )


def _load_series(path: Path) -> SnapshotMatrix:
    with np.load(path, allow_pickle=False) as z:
        keys = tuple(
            SeriesKey(int(n), str(s), str(u))
            for n, s, u in zip(z["node_ids"], z["sensor_names"], z["units"])
        )
        gaps = tuple(
            GapRecord(int(row[0]), float(row[1]), float(row[2])) for row in z["gaps"]
        )
        return SnapshotMatrix(
            values=z["values"],
            dt=float(z["dt"]),
            t0=float(z["t0"]),
            series_ids=keys,
            gaps=gaps,
        )


def write_run(
    root: str | Path,
    *,
    config: dict,
    data_hash: str,
    env: SnapshotMatrix,
    jobs: Sequence[JobRecord],
    events: Sequence[HardwareEvent],
    tree: MrDmdTree,
    bands: BandMagnitudes,
    reports: Sequence[ZScoreReport],
    summary: dict,
    run_id: str | None = None,
) -> tuple[str, Path]:
    """Persist one run; the manifest lands last as the commit point."""
    root = Path(root)
    if run_id is None:
        run_id = run_id_for(config, data_hash)
    run_dir = root / run_id
    run_dir.mkdir(parents=True, exist_ok=True)

    _save_series(run_dir / "series.npz", env)
    (run_dir / "tree.json").write_text(json.dumps(tree.to_dict()))
    (run_dir / "bands.json").write_text(json.dumps(bands.to_dict()))
    with (run_dir / "zscores.jsonl").open("w") as fh:
        for report in reports:
            fh.write(json.dumps(report.to_dict(), sort_keys=True) + "\n")
    with (run_dir / "jobs.jsonl").open("w") as fh:
        for job in jobs:
            fh.write(json.dumps(job.to_dict(), sort_keys=True) + "\n")
    with (run_dir / "hwevents.jsonl").open("w") as fh:
        for ev in events:
            fh.write(json.dumps(ev.to_dict(), sort_keys=True) + "\n")

    start, end = env.time_window()
    manifest = {
        "run_id": run_id,
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": config,
        "config_hash": config_hash(config),
        "dataset_hash": data_hash,
        "band_hash": bands.band_hash(),
        "window": {
            "start": start,
            "end": end,
            "dt": env.dt,
            "n_series": env.n_series,
            "n_snapshots": env.n_snapshots,
        },
        "summary": summary,
        "files": [
            "series.npz",
            "tree.json",
            "bands.json",
            "zscores.jsonl",
            "jobs.jsonl",
            "hwevents.jsonl",
        ],
    }
    (run_dir / MANIFEST).write_text(json.dumps(manifest, indent=2, sort_keys=True))
    return run_id, run_dir


def _run_dir(root: str | Path, run_id: str) -> Path:
    run_dir = Path(root) / run_id
    if not (run_dir / MANIFEST).exists():
        raise RunNotFoundError(f"no run {run_id!r} under {root}")
    return run_dir


def list_runs(root: str | Path) -> list[dict]:
    root = Path(root)
    if not root.exists():
        return []
    manifests = []
    for child in sorted(root.iterdir()):
        mpath = child / MANIFEST
        if child.is_dir() and mpath.exists():
            manifests.append(json.loads(mpath.read_text()))
    manifests.sort(key=lambda m: (m.get("created", ""), m.get("run_id", "")))
    return manifests


def load_manifest(root: str | Path, run_id: str) -> dict:
    return json.loads((_run_dir(root, run_id) / MANIFEST).read_text())


def load_series(root: str | Path, run_id: str) -> SnapshotMatrix:
    return _load_series(_run_dir(root, run_id) / "series.npz")


def load_tree(root: str | Path, run_id: str) -> MrDmdTree:
    return MrDmdTree.from_dict(
        json.loads((_run_dir(root, run_id) / "tree.json").read_text())
    )


def load_bands(root: str | Path, run_id: str) -> BandMagnitudes:
    return BandMagnitudes.from_dict(
        json.loads((_run_dir(root, run_id) / "bands.json").read_text())
    )


def load_reports(root: str | Path, run_id: str) -> list[ZScoreReport]:
    path = _run_dir(root, run_id) / "zscores.jsonl"
    return [
        ZScoreReport.from_dict(json.loads(line))
        for line in path.read_text().splitlines()
        if line.strip()
    ]


def load_jobs(root: str | Path, run_id: str) -> list[JobRecord]:
    path = _run_dir(root, run_id) / "jobs.jsonl"
    return [
        JobRecord.from_dict(json.loads(line))
        for line in path.read_text().splitlines()
        if line.strip()
    ]


def load_events(root: str | Path, run_id: str) -> list[HardwareEvent]:
    path = _run_dir(root, run_id) / "hwevents.jsonl"
    return [
        HardwareEvent.from_dict(json.loads(line))
        for line in path.read_text().splitlines()
        if line.strip()
    ]


def query_report(
    root: str | Path,
    run_id: str,
    job_id: str | None = None,
    user: str | None = None,
    node_range: tuple[int, int] | None = None,
    time_range: tuple[float, float] | None = None,
    z_range: tuple[float, float] | None = None,
) -> list[ZScoreReport]:
    """Pure filter over stored reports.

    job_id / user / time_range choose which reports apply (the overall,
    job-less report counts as spanning the whole window); node_range and
    z_range then filter entries inside the surviving reports.
    """
    reports = load_reports(root, run_id)
    jobs = {j.job_id: j for j in load_jobs(root, run_id)}
    manifest = load_manifest(root, run_id)
    window = (manifest["window"]["start"], manifest["window"]["end"])

    selected = []
    for report in reports:
        job = jobs.get(report.job_id) if report.job_id else None
        if job_id is not None and report.job_id != job_id:
            continue
        if user is not None:
            if job is None or job.user != user:
                continue
        if time_range is not None:
            lo, hi = time_range
            span = (job.start, job.end) if job else window
            if not (span[0] < hi and lo < span[1]):
                continue
        selected.append(report)

    if node_range is None and z_range is None:
        return selected

    out = []
    for report in selected:
        entries = report.entries
        if node_range is not None:
            lo, hi = node_range
            entries = tuple(e for e in entries if lo <= e.series.node_id <= hi)
        if z_range is not None:
            lo, hi = z_range
            entries = tuple(e for e in entries if lo <= e.z <= hi)
        out.append(
            ZScoreReport(
                entries=entries,
                baseline_kind=report.baseline_kind,
                band_hash=report.band_hash,
                job_id=report.job_id,
            )
        )
    return out
