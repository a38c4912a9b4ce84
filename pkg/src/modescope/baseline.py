"""Baseline selection, bootstrap trial statistics, and per-series z-scores."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from modescope.model import (
    BandMagnitudes,
    ConfigError,
    JobRecord,
    NoBaselineError,
    SnapshotMatrix,
    ZScoreEntry,
    ZScoreReport,
)

SIGMA_FLOOR = 1e-9
Z_CLAMP = 10.0
# fraction of window samples a series must keep inside its range to count
# as system-baseline behavior
IN_RANGE_FRACTION = 0.99


@dataclass(frozen=True)
class BaselineSpec:
    """What counts as expected behavior.

    ``system`` declares per-sensor value ranges (sensor name prefixes are
    matched so one entry covers e.g. temp0..temp3); ``user`` points at a
    successfully finished reference job whose readings become the baseline.
    """

    kind: str
    ranges: Mapping[str, tuple[float, float]] = field(default_factory=dict)
    reference_job: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("system", "user"):
            raise ConfigError(f"baseline kind must be system or user, got {self.kind!r}")
        if self.kind == "system":
            if not self.ranges:
                raise ConfigError("system baseline needs at least one sensor range")
            for sensor, (lo, hi) in self.ranges.items():
                if not lo < hi:
                    raise ConfigError(f"range for {sensor!r} must have lo < hi")
        else:
            if not self.reference_job:
                raise ConfigError("user baseline needs a reference job id")
        object.__setattr__(self, "ranges", dict(self.ranges))

    def range_for(self, sensor_name: str) -> tuple[float, float] | None:
        if sensor_name in self.ranges:
            return self.ranges[sensor_name]
        best = None
        for prefix, rng in self.ranges.items():
            if sensor_name.startswith(prefix):
                if best is None or len(prefix) > len(best[0]):
                    best = (prefix, rng)
        return best[1] if best else None

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "ranges": {k: list(v) for k, v in self.ranges.items()},
            "reference_job": self.reference_job,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "BaselineSpec":
        return cls(
            kind=str(d["kind"]),
            ranges={k: (float(v[0]), float(v[1])) for k, v in d.get("ranges", {}).items()},
            reference_job=d.get("reference_job"),
        )


def select_baseline(
    env: SnapshotMatrix,
    spec: BaselineSpec,
    window: tuple[float, float] | None = None,
    jobs: Sequence[JobRecord] = (),
) -> SnapshotMatrix:
    """Extract the baseline reading set from the telemetry.

    System kind keeps series that stay inside their sensor's range for at
    least 99% of the window's samples. User kind takes every series on the
    reference job's nodes, restricted to the job's runtime.
    """
    if window is None:
        window = env.time_window()
    start, end = window
    if not start < end:
        raise ConfigError("baseline window must be non-empty")

    if spec.kind == "system":
        sub = env.window(start, end)
        rows = []
        for i, key in enumerate(env.series_ids):
            rng = spec.range_for(key.sensor_name)
            if rng is None:
                continue
            lo, hi = rng
            vals = sub.values[i, :]
            frac = float(np.mean((vals >= lo) & (vals <= hi)))
            if frac >= IN_RANGE_FRACTION:
                rows.append(i)
        if not rows:
            raise NoBaselineError(
                "no series stayed within the configured ranges; widen the "
                "ranges or the window"
            )
        return env.subset(rows).window(start, end)

    ref = next((j for j in jobs if j.job_id == spec.reference_job), None)
    if ref is None:
        raise ConfigError(f"reference job {spec.reference_job!r} not found")
    if ref.exit_status != "pass":
        raise ConfigError(f"reference job {ref.job_id} must pass")
    rows = [i for i, key in enumerate(env.series_ids) if key.node_id in ref.node_ids]
    if not rows:
        raise NoBaselineError(
            f"reference job {ref.job_id} has no telemetry series on its nodes"
        )
    return env.subset(rows).window(max(start, ref.start), min(end, ref.end))


def bootstrap_sigma(
    trial_diffs: Sequence[np.ndarray],
    n_resamples: int = 1000,
    seed: int = 0,
) -> np.ndarray:
    """Per-series spread of a single trial value, by resampling with
    replacement and averaging the resampled standard deviations.

    The result estimates how far one window typically lands from the
    reference mean — the yardstick for judging a new window — not the
    standard error of the mean itself, which shrinks with the number of
    windows and would flag ordinary windows as anomalous.

    Each series draws its own generator from ``seed + series index`` and its
    trial values are sorted first, so the result is deterministic and does
    not depend on trial ordering. Sigmas are floored at 1e-9.
    """
    if n_resamples < 100:
        raise ConfigError(f"n_resamples must be >= 100, got {n_resamples}")
    sigmas = np.empty(len(trial_diffs))
    for k, diffs in enumerate(trial_diffs):
        vals = np.sort(np.asarray(diffs, dtype=float))
        if vals.size < 2:
            raise ValueError(f"series {k}: need >= 2 trial diffs, got {vals.size}")
        rng = np.random.default_rng(seed + k)
        idx = rng.integers(0, vals.size, size=(n_resamples, vals.size))
        spreads = vals[idx].std(axis=1, ddof=1)
        sigmas[k] = max(float(spreads.mean()), SIGMA_FLOOR)
    return sigmas


def band_deviation(nonbase: BandMagnitudes, base_magnitudes: np.ndarray) -> np.ndarray:
    """Per-series mean magnitude difference over the bands where the scored
    set has modes.

    Restricting to the scored window's active bands keeps the statistic
    about the content the window exhibits; bands it has no evidence in are
    judged by whole-window comparisons instead of counting as deficits
    against every expectation.
    """
    present = np.asarray(nonbase.mode_counts) > 0
    if not present.any():
        return np.zeros(len(nonbase.series_ids))
    return (nonbase.magnitudes[:, present] - base_magnitudes[:, present]).mean(axis=1)


def zscores(
    nonbase: BandMagnitudes,
    base: BandMagnitudes,
    sigma: np.ndarray,
    baseline_kind: str = "system",
    job_id: str | None = None,
) -> ZScoreReport:
    """Per-series z of the mean magnitude difference over the scored set's
    active bands.

    Scores are clamped to [-10, 10]; per-band z values ride along for
    drill-down display.
    """
    if nonbase.bands != base.bands:
        raise ValueError("band layouts differ between the two magnitude sets")
    if nonbase.series_ids != base.series_ids:
        raise ValueError("series orderings differ between the two magnitude sets")
    sigma = np.asarray(sigma, dtype=float).reshape(-1)
    if sigma.size != len(nonbase.series_ids):
        raise ValueError(f"{sigma.size} sigmas for {len(nonbase.series_ids)} series")
    if np.any(sigma <= 0):
        raise ValueError("sigma must be positive")

    diff = band_deviation(nonbase, base.magnitudes)
    z = np.clip(diff / sigma, -Z_CLAMP, Z_CLAMP)
    band_z = np.clip(
        (nonbase.magnitudes - base.magnitudes) / sigma[:, None], -Z_CLAMP, Z_CLAMP
    )
    entries = tuple(
        ZScoreEntry(
            series=key,
            z=float(z[k]),
            sigma=float(sigma[k]),
            z_bands=tuple(float(v) for v in band_z[k]),
        )
        for k, key in enumerate(nonbase.series_ids)
    )
    return ZScoreReport(
        entries=entries,
        baseline_kind=baseline_kind,
        band_hash=nonbase.band_hash(),
        job_id=job_id,
    )


def group_zscores(
    report: ZScoreReport,
    bin_width: float = 1.0,
    lo: float = -2.0,
    hi: float = 2.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of z values; out-of-range scores land in the edge bins.

    Returns (edges, counts) with len(edges) = len(counts) + 1.
    """
    if bin_width <= 0:
        raise ConfigError("bin_width must be positive")
    if not lo < hi:
        raise ConfigError("histogram range must be non-empty")
    n_bins = max(1, int(round((hi - lo) / bin_width)))
    edges = lo + np.arange(n_bins + 1) * bin_width
    counts = np.zeros(n_bins, dtype=int)
    for z in report.zs():
        idx = int(np.floor((z - lo) / bin_width))
        counts[min(max(idx, 0), n_bins - 1)] += 1
    return edges, counts
