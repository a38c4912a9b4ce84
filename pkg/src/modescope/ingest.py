"""Parsers for the three log families: telemetry CSV, jobs JSONL, events JSONL.

All timestamps in files are ISO-8601 UTC strings; in memory everything is
epoch seconds. Malformed records are counted and skipped with a warning;
the telemetry parser turns hard-broken files (>10% bad rows) into errors.
"""

from __future__ import annotations

import json
import warnings
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import pandas as pd

from modescope.model import (
    GapRecord,
    HardwareEvent,
    JobRecord,
    ParseError,
    SeriesKey,
    SnapshotMatrix,
)

ENV_COLUMNS = ["timestamp", "node_id", "sensor_name", "value", "unit"]
MALFORMED_LIMIT = 0.10


def parse_timestamp(value) -> float:
    """ISO-8601 string (Z or offset) or numeric epoch -> epoch seconds."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().replace("Z", "+00:00")
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.timestamp()


def format_timestamp(epoch: float) -> str:
    return (
        datetime.fromtimestamp(epoch, tz=timezone.utc)
        .isoformat()
        .replace("+00:00", "Z")
    )


def parse_env_log(path: str | Path) -> SnapshotMatrix:
    """Read the telemetry CSV into a uniform-grid snapshot matrix.

    Rows are grouped into one series per (node, sensor); jittered sample
    times are snapped to a uniform grid at the median sample spacing with
    linear interpolation. Gaps wider than 3x the spacing are recorded.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")

    with path.open() as fh:
        header = fh.readline().strip()
        n_data_lines = sum(1 for line in fh if line.strip())
    if [c.strip() for c in header.split(",")] != ENV_COLUMNS:
        raise ParseError(f"bad header {header!r}, expected {','.join(ENV_COLUMNS)}")
    if n_data_lines == 0:
        raise ParseError(f"{path}: no data rows")

    df = pd.read_csv(
        path,
        names=ENV_COLUMNS,
        skiprows=1,
        dtype=str,
        on_bad_lines="skip",
        keep_default_na=False,
        engine="c",
    )
    structurally_bad = n_data_lines - len(df)

    ts = pd.to_datetime(df["timestamp"], errors="coerce", utc=True, format="ISO8601")
    node = pd.to_numeric(df["node_id"], errors="coerce")
    value = pd.to_numeric(df["value"], errors="coerce")
    good = ts.notna() & node.notna() & value.notna() & (df["sensor_name"] != "")
    malformed = structurally_bad + int((~good).sum())
    total = n_data_lines
    if malformed > MALFORMED_LIMIT * total:
        raise ParseError(f"{path}: {malformed}/{total} malformed rows")
    if malformed:
        warnings.warn(f"{path}: skipped {malformed} malformed row(s)", stacklevel=2)
    if not bool(good.any()):
        raise ParseError(f"{path}: no valid rows")

    clean = pd.DataFrame(
        {
            "t": ts[good].astype("int64").to_numpy() / 1e9,
            "node": node[good].astype(int).to_numpy(),
            "sensor": df.loc[good, "sensor_name"].to_numpy(),
            "value": value[good].to_numpy(),
            "unit": df.loc[good, "unit"].to_numpy(),
        }
    )

    diffs = []
    series = []
    for (node_id, sensor), grp in sorted(
        clean.groupby(["node", "sensor"], sort=False), key=lambda kv: kv[0]
    ):
        grp = grp.sort_values("t")
        t = grp["t"].to_numpy()
        v = grp["value"].to_numpy()
        unit = str(grp["unit"].iloc[0])
        series.append((SeriesKey(int(node_id), str(sensor), unit), t, v))
        if t.size > 1:
            diffs.append(np.diff(t))
    if not diffs:
        raise ParseError(f"{path}: need at least 2 samples per series")
    dt = float(np.median(np.concatenate(diffs)))
    if dt <= 0:
        raise ParseError(f"{path}: non-increasing timestamps")

    t_min = min(t[0] for _, t, _ in series)
    t_max = max(t[-1] for _, t, _ in series)
    n_cols = int(round((t_max - t_min) / dt)) + 1
    if n_cols < 2:
        raise ParseError(f"{path}: window covers fewer than 2 grid points")
    grid = t_min + np.arange(n_cols) * dt

    values = np.empty((len(series), n_cols))
    gaps: list[GapRecord] = []
    keys = []
    for i, (key, t, v) in enumerate(series):
        values[i, :] = np.interp(grid, t, v)
        keys.append(key)
        step = np.diff(t)
        for j in np.flatnonzero(step > 3 * dt):
            gaps.append(GapRecord(i, float(t[j]), float(t[j + 1])))

    return SnapshotMatrix(
        values=values, dt=dt, t0=float(t_min), series_ids=tuple(keys), gaps=tuple(gaps)
    )


def expand_nodes(spec) -> frozenset[int]:
    """Node list in any log form: 7, "7", "2530-2533", "1,3-5", [1, "4-6"]."""
    if isinstance(spec, bool):
        raise ValueError(f"bad node spec: {spec!r}")
    if isinstance(spec, int):
        return frozenset({spec})
    if isinstance(spec, (list, tuple)):
        out: set[int] = set()
        for item in spec:
            out |= expand_nodes(item)
        return frozenset(out)
    if isinstance(spec, str):
        out = set()
        for token in spec.split(","):
            token = token.strip()
            if not token:
                continue
            lo, dash, hi = token.partition("-")
            if dash:
                a, b = int(lo), int(hi)
                if b < a:
                    raise ValueError(f"inverted node range {token!r}")
                out.update(range(a, b + 1))
            else:
                out.add(int(token))
        if not out:
            raise ValueError(f"empty node spec: {spec!r}")
        return frozenset(out)
    raise ValueError(f"bad node spec: {spec!r}")


def parse_job_log(path: str | Path) -> list[JobRecord]:
    """Read scheduler records from JSON lines, expanding node ranges."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    jobs: list[JobRecord] = []
    rejected = 0
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                start = parse_timestamp(obj["start"])
                end = parse_timestamp(obj["end"])
                if start >= end:
                    raise ValueError("start must precede end")
                status = str(obj["exit_status"]).strip().lower()
                jobs.append(
                    JobRecord(
                        job_id=str(obj["job_id"]),
                        user=str(obj["user"]),
                        project=str(obj.get("project", "")),
                        node_ids=expand_nodes(obj["nodes"]),
                        start=start,
                        end=end,
                        wall_time=float(obj["wall_time"]),
                        run_time=float(obj["run_time"]),
                        exit_status=status,
                    )
                )
            except (KeyError, ValueError, TypeError, json.JSONDecodeError):
                rejected += 1
    if rejected:
        warnings.warn(f"{path}: rejected {rejected} job record(s)", stacklevel=2)
    return jobs


def parse_hw_log(path: str | Path) -> list[HardwareEvent]:
    """Read hardware events from JSON lines.

    Severities are case-normalized; unknown ones become "warning" with the
    inferred flag set. Records without a timestamp or node are dropped.
    """
    path = Path(path)
    if not path.exists():
        raise ParseError(f"no such file: {path}")
    events: list[HardwareEvent] = []
    rejected = 0
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                ts = parse_timestamp(obj["timestamp"])
                node_id = int(obj["node_id"])
            except (KeyError, ValueError, TypeError, json.JSONDecodeError):
                rejected += 1
                continue
            raw = str(obj.get("severity", "")).strip().lower()
            if raw in ("informational", "warning", "fatal"):
                severity, inferred = raw, False
            else:
                severity, inferred = "warning", True
            events.append(
                HardwareEvent(
                    timestamp=ts,
                    node_id=node_id,
                    severity=severity,
                    category=str(obj.get("category", "")),
                    message=str(obj.get("message", "")),
                    severity_inferred=inferred,
                )
            )
    if rejected:
        warnings.warn(f"{path}: rejected {rejected} event record(s)", stacklevel=2)
    return events
