"""Domain types shared across the decomposition and scoring pipeline.

Everything here is immutable after construction and safe to share with
concurrent workers. Each type round-trips through a plain-JSON dict via
``to_dict`` / ``from_dict``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

SEVERITY_LEVELS = ("informational", "warning", "fatal")
EXIT_STATUSES = ("pass", "fail")


class AnalysisError(Exception):
    """Base class for failures that abort a pipeline stage."""


class InsufficientSnapshotsError(AnalysisError):
    pass


class ZeroDataError(AnalysisError):
    pass


class NoBaselineError(AnalysisError):
    pass


class ConfigError(AnalysisError):
    pass


class ParseError(AnalysisError):
    pass


class RunNotFoundError(AnalysisError):
    pass


def _as_readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _complex_to_dict(a: np.ndarray) -> dict:
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _complex_from_dict(d: Mapping) -> np.ndarray:
    return np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)


@dataclass(frozen=True, order=True)
class SeriesKey:
    """Identity of one telemetry stream: (node, sensor channel)."""

    node_id: int
    sensor_name: str
    unit: str = ""

    def label(self) -> str:
        return f"{self.node_id}:{self.sensor_name}"

    def to_dict(self) -> dict:
        return {"node_id": self.node_id, "sensor_name": self.sensor_name, "unit": self.unit}

    @classmethod
    def from_dict(cls, d: Mapping) -> "SeriesKey":
        return cls(int(d["node_id"]), str(d["sensor_name"]), str(d.get("unit", "")))


@dataclass(frozen=True)
class GapRecord:
    """A raw-sample gap wider than 3*dt, recorded at ingestion."""

    series_index: int
    start: float
    end: float

    def to_dict(self) -> dict:
        return {"series_index": self.series_index, "start": self.start, "end": self.end}

    @classmethod
    def from_dict(cls, d: Mapping) -> "GapRecord":
        return cls(int(d["series_index"]), float(d["start"]), float(d["end"]))


@dataclass(frozen=True, eq=False)
class SnapshotMatrix:
    """K series by M snapshots, on a uniform time grid.

    Column j holds the readings at ``t0 + j * dt`` (UTC epoch seconds).
    """

    values: np.ndarray
    dt: float
    t0: float
    series_ids: tuple[SeriesKey, ...]
    gaps: tuple[GapRecord, ...] = ()

    def __post_init__(self) -> None:
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 2:
            raise ValueError(f"values must be 2-D, got shape {vals.shape}")
        k, m = vals.shape
        if k < 1:
            raise ValueError("need at least one series")
        if m < 2:
            raise InsufficientSnapshotsError(f"need at least 2 snapshots, got {m}")
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("non-finite values in snapshot matrix")
        if len(self.series_ids) != k:
            raise ValueError(f"{len(self.series_ids)} series_ids for {k} rows")
        object.__setattr__(self, "values", _as_readonly(vals))
        object.__setattr__(self, "series_ids", tuple(self.series_ids))
        object.__setattr__(self, "gaps", tuple(self.gaps))

    @property
    def n_series(self) -> int:
        return self.values.shape[0]

    @property
    def n_snapshots(self) -> int:
        return self.values.shape[1]

    def times(self) -> np.ndarray:
        return self.t0 + np.arange(self.n_snapshots) * self.dt

    def time_window(self) -> tuple[float, float]:
        """Half-open [start, end) window covered by the grid."""
        return (self.t0, self.t0 + self.n_snapshots * self.dt)

    def node_ids(self) -> frozenset[int]:
        return frozenset(k.node_id for k in self.series_ids)

    def subset(self, rows: Sequence[int]) -> "SnapshotMatrix":
        rows = list(rows)
        return SnapshotMatrix(
            values=self.values[rows, :],
            dt=self.dt,
            t0=self.t0,
            series_ids=tuple(self.series_ids[i] for i in rows),
            gaps=tuple(g for g in self.gaps if g.series_index in set(rows)),
        )

    def window(self, start: float, end: float) -> "SnapshotMatrix":
        """Columns whose timestamps fall in [start, end)."""
        t = self.times()
        mask = (t >= start) & (t < end)
        idx = np.flatnonzero(mask)
        if idx.size < 2:
            raise InsufficientSnapshotsError(
                f"window [{start}, {end}) covers {idx.size} snapshots"
            )
        return SnapshotMatrix(
            values=self.values[:, idx],
            dt=self.dt,
            t0=float(t[idx[0]]),
            series_ids=self.series_ids,
            gaps=self.gaps,
        )

    def to_dict(self) -> dict:
        return {
            "values": self.values.tolist(),
            "dt": self.dt,
            "t0": self.t0,
            "series_ids": [k.to_dict() for k in self.series_ids],
            "gaps": [g.to_dict() for g in self.gaps],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "SnapshotMatrix":
        return cls(
            values=np.asarray(d["values"], dtype=float),
            dt=float(d["dt"]),
            t0=float(d["t0"]),
            series_ids=tuple(SeriesKey.from_dict(s) for s in d["series_ids"]),
            gaps=tuple(GapRecord.from_dict(g) for g in d.get("gaps", [])),
        )


@dataclass(frozen=True)
class TimeSegment:
    """One window of the recursion tree: half-open [start, end) at a level."""

    start: float
    end: float
    level: int = 0
    sample_stride: int = 1

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"segment start {self.start} must precede end {self.end}")
        if self.level < 0:
            raise ValueError("level must be >= 0")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")

    @property
    def duration(self) -> float:
        return self.end - self.start

    def overlaps(self, start: float, end: float) -> bool:
        return self.start < end and start < self.end

    def contained_in(self, start: float, end: float, tol: float = 1e-6) -> bool:
        return self.start >= start - tol and self.end <= end + tol

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "level": self.level,
            "sample_stride": self.sample_stride,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TimeSegment":
        return cls(float(d["start"]), float(d["end"]), int(d["level"]), int(d["sample_stride"]))


@dataclass(frozen=True, eq=False)
class DmdResult:
    """Modes and eigenvalues of one segment fit.

    ``modes`` is K x r complex; column i pairs with ``lambdas[i]`` (discrete),
    ``omegas[i] = log(lambdas[i]) / dt`` (continuous), and ``amplitudes[i]``.
    ``residual`` is the Frobenius norm of the one-step-ahead prediction error.
    """

    modes: np.ndarray
    lambdas: np.ndarray
    omegas: np.ndarray
    amplitudes: np.ndarray
    rank: int
    dt: float
    segment: TimeSegment
    residual: float = 0.0

    def __post_init__(self) -> None:
        modes = np.asarray(self.modes, dtype=complex)
        if modes.ndim != 2:
            raise ValueError("modes must be a 2-D matrix")
        r = modes.shape[1]
        lam = np.asarray(self.lambdas, dtype=complex).reshape(-1)
        om = np.asarray(self.omegas, dtype=complex).reshape(-1)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if not (self.rank == r == lam.size == om.size == amp.size):
            raise ValueError(
                f"inconsistent rank: rank={self.rank} modes={r} "
                f"lambdas={lam.size} omegas={om.size} amplitudes={amp.size}"
            )
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        object.__setattr__(self, "modes", _as_readonly(modes))
        object.__setattr__(self, "lambdas", _as_readonly(lam))
        object.__setattr__(self, "omegas", _as_readonly(om))
        object.__setattr__(self, "amplitudes", _as_readonly(amp))

    @property
    def n_series(self) -> int:
        return self.modes.shape[0]

    @classmethod
    def empty(cls, n_series: int, dt: float, segment: TimeSegment) -> "DmdResult":
        z = np.zeros((n_series, 0), dtype=complex)
        e = np.zeros(0, dtype=complex)
        return cls(z, e, e, e, rank=0, dt=dt, segment=segment, residual=0.0)

    def restrict(self, indices: Sequence[int]) -> "DmdResult":
        """Keep only the modes at ``indices`` (e.g. the slow subset)."""
        idx = list(indices)
        return DmdResult(
            modes=self.modes[:, idx],
            lambdas=self.lambdas[idx],
            omegas=self.omegas[idx],
            amplitudes=self.amplitudes[idx],
            rank=len(idx),
            dt=self.dt,
            segment=self.segment,
            residual=self.residual,
        )

    def to_dict(self) -> dict:
        return {
            "modes": _complex_to_dict(self.modes),
            "lambdas": _complex_to_dict(self.lambdas),
            "omegas": _complex_to_dict(self.omegas),
            "amplitudes": _complex_to_dict(self.amplitudes),
            "rank": self.rank,
            "dt": self.dt,
            "segment": self.segment.to_dict(),
            "residual": self.residual,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "DmdResult":
        return cls(
            modes=_complex_from_dict(d["modes"]).reshape(
                len(d["modes"]["re"]), -1
            ),
            lambdas=_complex_from_dict(d["lambdas"]),
            omegas=_complex_from_dict(d["omegas"]),
            amplitudes=_complex_from_dict(d["amplitudes"]),
            rank=int(d["rank"]),
            dt=float(d["dt"]),
            segment=TimeSegment.from_dict(d["segment"]),
            residual=float(d["residual"]),
        )


@dataclass(frozen=True)
class MrDmdConfig:
    """Tunables of the multiresolution recursion.

    ``max_oscillations`` is the per-window oscillation budget separating slow
    from fast modes; ``nyquist_factor`` scales how far above Nyquist each
    level samples; ``job_split_levels`` lists the levels whose splits snap to
    job boundaries (empty set disables job-aware splitting).
    """

    max_oscillations: float = 4.0
    max_level: int = 6
    min_snapshots: int = 32
    nyquist_factor: float = 4.0
    job_split_levels: frozenset[int] = frozenset({3})
    split_vicinity: float = 7200.0
    power_threshold: float = 0.5

    def __post_init__(self) -> None:
        if self.max_oscillations <= 0:
            raise ConfigError("max_oscillations must be positive")
        if self.max_level < 0:
            raise ConfigError("max_level must be >= 0")
        if self.min_snapshots < 2:
            raise ConfigError("min_snapshots must be >= 2")
        if self.nyquist_factor <= 0:
            raise ConfigError("nyquist_factor must be positive")
        if self.split_vicinity <= 0:
            raise ConfigError("split_vicinity must be positive")
        if not (0 < self.power_threshold <= 1):
            raise ConfigError("power_threshold must be in (0, 1]")
        object.__setattr__(self, "job_split_levels", frozenset(self.job_split_levels))

    def to_dict(self) -> dict:
        return {
            "max_oscillations": self.max_oscillations,
            "max_level": self.max_level,
            "min_snapshots": self.min_snapshots,
            "nyquist_factor": self.nyquist_factor,
            "job_split_levels": sorted(self.job_split_levels),
            "split_vicinity": self.split_vicinity,
            "power_threshold": self.power_threshold,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MrDmdConfig":
        return cls(
            max_oscillations=float(d["max_oscillations"]),
            max_level=int(d["max_level"]),
            min_snapshots=int(d["min_snapshots"]),
            nyquist_factor=float(d["nyquist_factor"]),
            job_split_levels=frozenset(int(x) for x in d["job_split_levels"]),
            split_vicinity=float(d["split_vicinity"]),
            power_threshold=float(d["power_threshold"]),
        )


@dataclass(frozen=True, eq=False)
class MrDmdNode:
    """One evaluated segment: its retained slow-mode fit plus column range."""

    segment: TimeSegment
    result: DmdResult
    slow_mode_count: int
    col_start: int
    col_end: int

    def to_dict(self) -> dict:
        return {
            "segment": self.segment.to_dict(),
            "result": self.result.to_dict(),
            "slow_mode_count": self.slow_mode_count,
            "col_start": self.col_start,
            "col_end": self.col_end,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MrDmdNode":
        return cls(
            segment=TimeSegment.from_dict(d["segment"]),
            result=DmdResult.from_dict(d["result"]),
            slow_mode_count=int(d["slow_mode_count"]),
            col_start=int(d["col_start"]),
            col_end=int(d["col_end"]),
        )


@dataclass(frozen=True, eq=False)
class MrDmdTree:
    """All retained per-segment results of one recursion, in BFS order."""

    nodes: tuple[MrDmdNode, ...]
    config: MrDmdConfig

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", tuple(self.nodes))

    def levels(self) -> list[int]:
        return sorted({n.segment.level for n in self.nodes})

    def at_level(self, level: int) -> list[MrDmdNode]:
        return [n for n in self.nodes if n.segment.level == level]

    @property
    def n_retained_modes(self) -> int:
        return sum(n.slow_mode_count for n in self.nodes)

    def to_dict(self) -> dict:
        return {
            "nodes": [n.to_dict() for n in self.nodes],
            "config": self.config.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "MrDmdTree":
        return cls(
            nodes=tuple(MrDmdNode.from_dict(n) for n in d["nodes"]),
            config=MrDmdConfig.from_dict(d["config"]),
        )


@dataclass(frozen=True, eq=False)
class JobRecord:
    """One scheduler job: who ran what, where, and how it exited."""

    job_id: str
    user: str
    project: str
    node_ids: frozenset[int]
    start: float
    end: float
    wall_time: float
    run_time: float
    exit_status: str

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"job {self.job_id}: start must precede end")
        if not self.node_ids:
            raise ValueError(f"job {self.job_id}: empty node set")
        if self.exit_status not in EXIT_STATUSES:
            raise ValueError(f"job {self.job_id}: bad exit_status {self.exit_status!r}")
        object.__setattr__(self, "node_ids", frozenset(self.node_ids))

    def overlaps(self, start: float, end: float) -> bool:
        return self.start < end and start < self.end

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "user": self.user,
            "project": self.project,
            "node_ids": sorted(self.node_ids),
            "start": self.start,
            "end": self.end,
            "wall_time": self.wall_time,
            "run_time": self.run_time,
            "exit_status": self.exit_status,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "JobRecord":
        return cls(
            job_id=str(d["job_id"]),
            user=str(d["user"]),
            project=str(d["project"]),
            node_ids=frozenset(int(n) for n in d["node_ids"]),
            start=float(d["start"]),
            end=float(d["end"]),
            wall_time=float(d["wall_time"]),
            run_time=float(d["run_time"]),
            exit_status=str(d["exit_status"]),
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, JobRecord):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self) -> int:
        return hash((self.job_id, self.start, self.end))


@dataclass(frozen=True)
class HardwareEvent:
    """One hardware-log event. ``severity_inferred`` marks normalized inputs."""

    timestamp: float
    node_id: int
    severity: str
    category: str
    message: str
    severity_inferred: bool = False

    def __post_init__(self) -> None:
        if self.severity not in SEVERITY_LEVELS:
            raise ValueError(f"bad severity {self.severity!r}")

    def to_dict(self) -> dict:
        return {
            "timestamp": self.timestamp,
            "node_id": self.node_id,
            "severity": self.severity,
            "category": self.category,
            "message": self.message,
            "severity_inferred": self.severity_inferred,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "HardwareEvent":
        return cls(
            timestamp=float(d["timestamp"]),
            node_id=int(d["node_id"]),
            severity=str(d["severity"]),
            category=str(d["category"]),
            message=str(d["message"]),
            severity_inferred=bool(d.get("severity_inferred", False)),
        )


@dataclass(frozen=True, eq=False)
class BandMagnitudes:
    """Per-series mean mode magnitudes inside ordered frequency bands."""

    bands: tuple[tuple[float, float], ...]
    magnitudes: np.ndarray
    mode_counts: tuple[int, ...]
    series_ids: tuple[SeriesKey, ...]

    def __post_init__(self) -> None:
        bands = tuple((float(lo), float(hi)) for lo, hi in self.bands)
        for lo, hi in bands:
            if not lo < hi:
                raise ConfigError(f"band ({lo}, {hi}) is empty or inverted")
        for (_, hi), (lo2, _) in zip(bands, bands[1:]):
            if lo2 < hi:
                raise ConfigError("bands must be ordered and non-overlapping")
        mags = np.asarray(self.magnitudes, dtype=float)
        if mags.shape != (len(self.series_ids), len(bands)):
            raise ValueError(
                f"magnitudes shape {mags.shape} != "
                f"({len(self.series_ids)}, {len(bands)})"
            )
        if mags.size and mags.min() < 0:
            raise ValueError("magnitudes must be non-negative")
        if len(self.mode_counts) != len(bands):
            raise ValueError("one mode count per band required")
        object.__setattr__(self, "bands", bands)
        object.__setattr__(self, "magnitudes", _as_readonly(mags))
        object.__setattr__(self, "mode_counts", tuple(int(c) for c in self.mode_counts))
        object.__setattr__(self, "series_ids", tuple(self.series_ids))

    def subset(self, rows: Sequence[int]) -> "BandMagnitudes":
        rows = list(rows)
        return BandMagnitudes(
            bands=self.bands,
            magnitudes=self.magnitudes[rows, :],
            mode_counts=self.mode_counts,
            series_ids=tuple(self.series_ids[i] for i in rows),
        )

    def band_hash(self) -> str:
        payload = json.dumps(self.bands, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()[:12]

    def to_dict(self) -> dict:
        return {
            "bands": [list(b) for b in self.bands],
            "magnitudes": self.magnitudes.tolist(),
            "mode_counts": list(self.mode_counts),
            "series_ids": [k.to_dict() for k in self.series_ids],
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BandMagnitudes":
        return cls(
            bands=tuple((float(lo), float(hi)) for lo, hi in d["bands"]),
            magnitudes=np.asarray(d["magnitudes"], dtype=float),
            mode_counts=tuple(int(c) for c in d["mode_counts"]),
            series_ids=tuple(SeriesKey.from_dict(s) for s in d["series_ids"]),
        )


@dataclass(frozen=True)
class ZScoreEntry:
    series: SeriesKey
    z: float
    sigma: float
    z_bands: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive (floored upstream)")
        if not np.isfinite(self.z):
            raise ValueError("z must be finite")

    def to_dict(self) -> dict:
        return {
            "series": self.series.to_dict(),
            "z": self.z,
            "sigma": self.sigma,
            "z_bands": list(self.z_bands),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ZScoreEntry":
        return cls(
            series=SeriesKey.from_dict(d["series"]),
            z=float(d["z"]),
            sigma=float(d["sigma"]),
            z_bands=tuple(float(z) for z in d.get("z_bands", [])),
        )


@dataclass(frozen=True, eq=False)
class ZScoreReport:
    """Per-series z-scores of one scoring window against a baseline."""

    entries: tuple[ZScoreEntry, ...]
    baseline_kind: str
    band_hash: str
    job_id: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(self.entries))

    def zs(self) -> np.ndarray:
        return np.array([e.z for e in self.entries], dtype=float)

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "baseline_kind": self.baseline_kind,
            "band_hash": self.band_hash,
            "job_id": self.job_id,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ZScoreReport":
        return cls(
            entries=tuple(ZScoreEntry.from_dict(e) for e in d["entries"]),
            baseline_kind=str(d["baseline_kind"]),
            band_hash=str(d["band_hash"]),
            job_id=d.get("job_id"),
        )


@dataclass(frozen=True)
class Finding:
    """One validation finding; ``kind`` is a stable machine-readable tag."""

    kind: str
    message: str
    series: SeriesKey | None = None
    job_id: str | None = None
    node_id: int | None = None
    timestamp: float | None = None


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.findings

    def by_kind(self, kind: str) -> list[Finding]:
        return [f for f in self.findings if f.kind == kind]


def validate_dataset(
    env: SnapshotMatrix,
    jobs: Iterable[JobRecord],
    hw: Iterable[HardwareEvent],
) -> ValidationReport:
    """Cross-check the three log families without mutating them.

    Flags sample gaps wider than 3*dt, jobs naming nodes absent from the
    telemetry, and hardware events outside the covered time window.
    """
    findings: list[Finding] = []
    known_nodes = env.node_ids()
    win_start, win_end = env.time_window()

    for gap in env.gaps:
        if gap.end - gap.start > 3 * env.dt:
            key = env.series_ids[gap.series_index]
            findings.append(
                Finding(
                    kind="gap",
                    message=(
                        f"series {key.label()} has a {gap.end - gap.start:.0f}s gap "
                        f"(> 3*dt = {3 * env.dt:.0f}s)"
                    ),
                    series=key,
                    timestamp=gap.start,
                )
            )

    for job in jobs:
        unknown = sorted(job.node_ids - known_nodes)
        if unknown:
            findings.append(
                Finding(
                    kind="unknown_node",
                    message=f"job {job.job_id} references unknown nodes {unknown}",
                    job_id=job.job_id,
                )
            )

    for ev in hw:
        if not (win_start <= ev.timestamp < win_end):
            findings.append(
                Finding(
                    kind="event_outside_window",
                    message=(
                        f"event on node {ev.node_id} at {ev.timestamp:.0f} lies "
                        f"outside [{win_start:.0f}, {win_end:.0f})"
                    ),
                    node_id=ev.node_id,
                    timestamp=ev.timestamp,
                )
            )

    return ValidationReport(tuple(findings))
