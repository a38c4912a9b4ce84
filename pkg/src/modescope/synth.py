"""Deterministic synthetic telemetry with injected, ground-truthed anomalies.

Scenarios:
  clean     nominal behavior only
  drift     rising temperature bumps on a few nodes, with fatal error bursts
  stall     current sag on a few nodes during one job
  mixed     drift + stall
  two-jobs  one node pool running two back-to-back jobs; the second job
            carries a decaying oscillation transient absent from the first
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from modescope.ingest import format_timestamp
from modescope.model import (
    ConfigError,
    HardwareEvent,
    JobRecord,
    SeriesKey,
    SnapshotMatrix,
)

SCENARIOS = ("clean", "drift", "stall", "mixed", "two-jobs")

TEMP_BASE = 50.0
TEMP_UNIT = "C"
CURRENT_BASE = 10.0
CURRENT_UNIT = "A"


@dataclass(frozen=True)
class SynthSpec:
    """Shape and injection plan of one synthetic dataset."""

    scenario: str = "drift"
    n_nodes: int = 64
    hours: float = 24.0
    dt: float = 10.0
    n_temp: int = 4
    n_current: int = 4
    start_epoch: float = 1578268800.0
    nodes_per_group: int = 8
    drift_nodes: tuple[int, ...] = ()
    n_drift_nodes: int = 3
    drift_delta: float = 12.0
    stall_nodes: tuple[int, ...] = ()
    n_stall_nodes: int = 2
    stall_drop: float = 4.0
    transient_amp: float = 6.0
    boundary_offset: float = 1320.0

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ConfigError(
                f"unknown scenario {self.scenario!r}; choose from {', '.join(SCENARIOS)}"
            )
        if self.n_nodes < 1 or self.n_temp + self.n_current < 1:
            raise ConfigError("need at least one node and one sensor")
        if self.hours <= 0 or self.dt <= 0:
            raise ConfigError("hours and dt must be positive")


@dataclass(frozen=True)
class Injection:
    node_id: int
    kind: str
    start: float
    end: float

    def to_dict(self) -> dict:
        return {
            "node": self.node_id,
            "kind": self.kind,
            "start": format_timestamp(self.start),
            "end": format_timestamp(self.end),
        }


@dataclass
class SynthDataset:
    env: SnapshotMatrix
    jobs: list[JobRecord]
    events: list[HardwareEvent]
    injections: list[Injection] = field(default_factory=list)

    def truth_dict(self, spec: SynthSpec, seed: int) -> dict:
        return {
            "scenario": spec.scenario,
            "seed": seed,
            "injected": [inj.to_dict() for inj in self.injections],
        }


def _smooth_bump(t: np.ndarray, start: float, end: float) -> np.ndarray:
    """Raised-cosine envelope: 0 outside [start, end], 1 at the center."""
    x = (t - start) / (end - start)
    inside = (x >= 0) & (x <= 1)
    out = np.zeros_like(t)
    out[inside] = 0.5 * (1.0 - np.cos(2.0 * np.pi * x[inside]))
    return out


def _job_schedule(spec: SynthSpec, t0: float, t_end: float) -> list[JobRecord]:
    jobs: list[JobRecord] = []
    n_groups = max(1, spec.n_nodes // spec.nodes_per_group)
    job_len = 6 * 3600.0
    counter = 0
    for g in range(n_groups):
        lo = g * spec.nodes_per_group
        hi = min(spec.n_nodes, lo + spec.nodes_per_group)
        nodes = frozenset(range(lo, hi))
        # stagger the first boundary per group so job edges spread out
        first_len = job_len * (0.6 + 0.08 * (g % 5))
        cursor = t0
        next_end = min(t0 + first_len, t_end)
        while cursor < t_end:
            end = min(next_end, t_end)
            if end - cursor < 900:
                break
            run = end - cursor
            jobs.append(
                JobRecord(
                    job_id=f"job_{counter:04d}",
                    user=f"user{(g + counter) % 7}",
                    project=f"proj{g % 3}",
                    node_ids=nodes,
                    start=cursor,
                    end=end,
                    wall_time=round(run * 1.15, 1),
                    run_time=round(run, 1),
                    exit_status="pass",
                )
            )
            counter += 1
            cursor = end
            next_end = cursor + job_len
    return jobs


def _two_job_schedule(spec: SynthSpec, t0: float, t_end: float) -> list[JobRecord]:
    t_root = t_end - t0
    # jobs run in back-to-back pairs, each pair filling one eighth of the
    # window with an internal boundary offset from the midpoint; only the
    # first pair carries distinct spectral content and is marked failed so
    # reference windows come from the background pairs, which alternate
    # long-first/short-first so every window shape the scored pair exhibits
    # is also represented among the reference windows
    tile = t_root / 8.0
    long_run = tile / 2.0 + spec.boundary_offset
    short_run = tile - long_run
    nodes = frozenset(range(spec.n_nodes))

    def mk(i: int, s: float, e: float, status: str) -> JobRecord:
        return JobRecord(
            job_id=f"job_{i:04d}",
            user="user0",
            project="proj0",
            node_ids=nodes,
            start=s,
            end=e,
            wall_time=round((e - s) * 1.15, 1),
            run_time=round(e - s, 1),
            exit_status=status,
        )

    jobs = []
    for k in range(1, 7):
        s = t0 + k * tile
        status = "fail" if k == 1 else "pass"
        first = long_run if k % 2 == 1 else short_run
        jobs.append(mk(2 * (k - 1), s, s + first, status))
        jobs.append(mk(2 * (k - 1) + 1, s + first, s + tile, status))
    return jobs


def _job_covering(jobs: list[JobRecord], node: int, when: float) -> JobRecord | None:
    for job in jobs:
        if node in job.node_ids and job.start <= when < job.end:
            return job
    return None


def build_dataset(spec: SynthSpec, seed: int = 0) -> SynthDataset:
    """Build the dataset in memory; generate_synthetic serializes it."""
    rng = np.random.default_rng(seed)
    n_cols = int(round(spec.hours * 3600.0 / spec.dt))
    if n_cols < 4:
        raise ConfigError("window too short")
    t0 = spec.start_epoch
    t = t0 + np.arange(n_cols) * spec.dt
    t_end = t0 + n_cols * spec.dt
    t_root = n_cols * spec.dt
    rel = t - t0

    if spec.scenario == "two-jobs":
        jobs = _two_job_schedule(spec, t0, t_end)
    else:
        jobs = _job_schedule(spec, t0, t_end)

    sensors = [(f"temp{i}", TEMP_UNIT) for i in range(spec.n_temp)] + [
        (f"curr{i}", CURRENT_UNIT) for i in range(spec.n_current)
    ]
    keys = [
        SeriesKey(node, name, unit)
        for node in range(spec.n_nodes)
        for name, unit in sensors
    ]

    f_slow, f_mid, f_fast = 2.0 / t_root, 8.0 / t_root, 26.0 / t_root
    values = np.empty((len(keys), n_cols))
    for i, key in enumerate(keys):
        ph = rng.uniform(0, 2 * np.pi, size=3)
        if key.unit == TEMP_UNIT:
            base, a1, a2, a3, noise = TEMP_BASE, 1.5, 1.0, 0.5, 0.25
        else:
            base, a1, a2, a3, noise = CURRENT_BASE, 0.8, 0.4, 0.2, 0.1
        values[i, :] = (
            base
            + a1 * np.sin(2 * np.pi * f_slow * rel + ph[0])
            + a2 * np.sin(2 * np.pi * f_mid * rel + ph[1])
            + a3 * np.sin(2 * np.pi * f_fast * rel + ph[2])
            + rng.normal(0.0, noise, size=n_cols)
        )

    injections: list[Injection] = []
    events: list[HardwareEvent] = []

    # low-rate background events on random nodes
    n_bg = max(1, int(spec.hours * 0.5))
    for _ in range(n_bg):
        events.append(
            HardwareEvent(
                timestamp=float(rng.uniform(t0, t_end - 1)),
                node_id=int(rng.integers(0, spec.n_nodes)),
                severity="informational",
                category=str(rng.choice(["ECC", "link", "thermal"])),
                message="corrected single-bit error",
            )
        )

    def pick_nodes(requested: tuple[int, ...], count: int, taken: set[int]) -> list[int]:
        if requested:
            return list(requested)
        pool = [n for n in range(spec.n_nodes) if n not in taken]
        return sorted(rng.choice(pool, size=min(count, len(pool)), replace=False).tolist())

    taken: set[int] = set()
    sensor_rows = {
        node: [i for i, k in enumerate(keys) if k.node_id == node]
        for node in range(spec.n_nodes)
    }

    if spec.scenario in ("drift", "mixed"):
        drift_nodes = pick_nodes(spec.drift_nodes, spec.n_drift_nodes, taken)
        taken |= set(drift_nodes)
        f_mod = 16.0 / t_root
        for node in drift_nodes:
            anchor = _job_covering(jobs, node, t0 + 0.55 * t_root)
            w0 = anchor.start if anchor else t0 + 0.45 * t_root
            w1 = anchor.end if anchor else t0 + 0.75 * t_root
            bump = _smooth_bump(t, w0, w1) * (
                1.0 + 0.25 * np.sin(2 * np.pi * f_mod * (t - w0))
            )
            for i in sensor_rows[node]:
                if keys[i].unit == TEMP_UNIT:
                    values[i, :] += spec.drift_delta * bump
            injections.append(Injection(node, "drift", w0, w1))
            for _ in range(int(rng.integers(4, 9))):
                events.append(
                    HardwareEvent(
                        timestamp=float(rng.uniform(w0, w1)),
                        node_id=node,
                        severity="fatal",
                        category=str(rng.choice(["MCE", "critical"])),
                        message=f"machine check exception on node {node}",
                    )
                )

    if spec.scenario in ("stall", "mixed"):
        stall_nodes = pick_nodes(spec.stall_nodes, spec.n_stall_nodes, taken)
        taken |= set(stall_nodes)
        for node in stall_nodes:
            anchor = _job_covering(jobs, node, t0 + 0.35 * t_root)
            w0 = anchor.start if anchor else t0 + 0.25 * t_root
            w1 = anchor.end if anchor else t0 + 0.55 * t_root
            sag = _smooth_bump(t, w0, w1)
            for i in sensor_rows[node]:
                if keys[i].unit == CURRENT_UNIT:
                    values[i, :] -= spec.stall_drop * sag
            injections.append(Injection(node, "stall", w0, w1))
            for _ in range(3):
                events.append(
                    HardwareEvent(
                        timestamp=float(rng.uniform(w0, w1)),
                        node_id=node,
                        severity="warning",
                        category="throttle",
                        message=f"frequency throttled on node {node}",
                    )
                )

    if spec.scenario == "two-jobs":
        job_a, job_b = jobs[0], jobs[1]
        # a persistent fast background rides on every series so short
        # windows carry genuine high-frequency content: one component with
        # slowly wandering amplitude (giving window-to-window spread) and a
        # steadier, faster one
        f_bg1, f_bg2, f_am = 48.0 / t_root, 76.0 / t_root, 3.0 / t_root
        # the second job of the first pair sustains a strong fast
        # oscillation of its own while the first job stays on the shared
        # background, so the pair's halves have distinct spectra
        f_b = 168.0 / t_root
        in_b = (t >= job_b.start) & (t < job_b.end)
        # response differs node to node, and phases differ per series so
        # the content spans more than one spatial direction
        node_scale = {
            node: float(rng.uniform(0.75, 1.25)) for node in range(spec.n_nodes)
        }
        amp_b = spec.transient_amp
        for i, key in enumerate(keys):
            unit_scale = 1.0 if key.unit == TEMP_UNIT else 0.4
            scale = unit_scale * node_scale[key.node_id]
            ph = rng.uniform(0.0, 2.0 * np.pi, size=4)
            envelope = 1.0 + 0.3 * np.sin(2 * np.pi * f_am * rel + ph[0])
            values[i, :] += scale * (
                1.0 * envelope * np.sin(2 * np.pi * f_bg1 * rel + ph[1])
                + 1.0 * np.sin(2 * np.pi * f_bg2 * rel + ph[2])
                + amp_b * np.where(in_b, np.sin(2 * np.pi * f_b * rel + ph[3]), 0.0)
            )
        injections.append(Injection(-1, "oscillation", job_a.start, job_b.end))

    # mark jobs whose nodes carry an injection inside their window as failed
    flagged = {
        (inj.node_id, job.job_id)
        for inj in injections
        for job in jobs
        if inj.node_id in job.node_ids and job.overlaps(inj.start, inj.end)
    }
    failed_ids = {job_id for _, job_id in flagged}
    jobs = [
        replace(job, exit_status="fail") if job.job_id in failed_ids else job
        for job in jobs
    ]

    events.sort(key=lambda e: e.timestamp)
    env = SnapshotMatrix(values=values, dt=spec.dt, t0=t0, series_ids=tuple(keys))
    return SynthDataset(env=env, jobs=jobs, events=events, injections=injections)


def write_dataset(ds: SynthDataset, out_dir: str | Path, truth: dict) -> dict[str, Path]:
    """Serialize a dataset to env.csv, jobs.jsonl, hw.jsonl, truth.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    env = ds.env
    n = env.n_snapshots
    ts = np.array([format_timestamp(x) for x in env.times()])
    frame = pd.DataFrame(
        {
            "timestamp": np.tile(ts, env.n_series),
            "node_id": np.repeat([k.node_id for k in env.series_ids], n),
            "sensor_name": np.repeat([k.sensor_name for k in env.series_ids], n),
            "value": env.values.reshape(-1),
            "unit": np.repeat([k.unit for k in env.series_ids], n),
        }
    )
    env_path = out / "env.csv"
    frame.to_csv(env_path, index=False, float_format="%.4f")

    jobs_path = out / "jobs.jsonl"
    with jobs_path.open("w") as fh:
        for job in ds.jobs:
            row = job.to_dict()
            row["nodes"] = _compress_nodes(job.node_ids)
            del row["node_ids"]
            row["start"] = format_timestamp(job.start)
            row["end"] = format_timestamp(job.end)
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    hw_path = out / "hw.jsonl"
    with hw_path.open("w") as fh:
        for ev in ds.events:
            row = ev.to_dict()
            del row["severity_inferred"]
            row["timestamp"] = format_timestamp(ev.timestamp)
            fh.write(json.dumps(row, sort_keys=True) + "\n")

    truth_path = out / "truth.json"
    truth_path.write_text(json.dumps(truth, indent=2, sort_keys=True) + "\n")
    return {"env": env_path, "jobs": jobs_path, "hw": hw_path, "truth": truth_path}


def _compress_nodes(nodes: frozenset[int]) -> str:
    """Inverse of ingest.expand_nodes: [1,2,3,7] -> "1-3,7"."""
    ordered = sorted(nodes)
    parts = []
    lo = prev = ordered[0]
    for n in ordered[1:]:
        if n == prev + 1:
            prev = n
            continue
        parts.append(f"{lo}-{prev}" if prev > lo else f"{lo}")
        lo = prev = n
    parts.append(f"{lo}-{prev}" if prev > lo else f"{lo}")
    return ",".join(parts)


def generate_synthetic(
    spec: SynthSpec, seed: int, out_dir: str | Path
) -> tuple[dict[str, Path], dict]:
    """Generate and write one dataset; returns (paths, ground truth)."""
    ds = build_dataset(spec, seed)
    truth = ds.truth_dict(spec, seed)
    paths = write_dataset(ds, out_dir, truth)
    return paths, truth
