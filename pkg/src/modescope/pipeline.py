"""End-to-end orchestration: decompose, band, score, persist.

The matrix is decomposed once; baseline selection then marks a subset of
series (and for user baselines a window) as the expected-behavior reading
set. Every scored quantity is a segment-mean band profile — per band, the
mean over a window's segments of their per-segment mean magnitudes, with
zeros where a segment is quiet — so all magnitudes come from the same
decomposition and stay directly comparable.

The whole-window report compares the full profile against the baseline
reading set itself: a baseline series expects its own profile (stable
per-series traits cancel), any other series expects the mean over
baseline series of its sensor class. Per-job reports compare the job
window's profile against the profile of a typical window, estimated as
the mean over trial windows: passed jobs without fatal hardware events on
their nodes (window quarters when fewer than two exist), trimmed of
windows whose content deviates atypically from the cross-window median.
The same trial windows, differenced against the same expectation, feed
the bootstrap spread that scales all z-scores. User baselines replace
both expectations with the reference job window's profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from modescope.baseline import (
    BaselineSpec,
    band_deviation,
    bootstrap_sigma,
    group_zscores,
    select_baseline,
    zscores,
)
from modescope.model import (
    AnalysisError,
    BandMagnitudes,
    HardwareEvent,
    JobRecord,
    MrDmdConfig,
    MrDmdTree,
    SnapshotMatrix,
    ValidationReport,
    ZScoreReport,
    validate_dataset,
)
from modescope.mrdmd import mrdmd
from modescope.spectrum import FilteredMode, band_magnitudes, default_bands, filter_high_power

MAX_TRIAL_SERIES = 500


@dataclass(frozen=True)
class PipelineConfig:
    baseline: BaselineSpec
    mrdmd: MrDmdConfig = field(default_factory=MrDmdConfig)
    bands: tuple[tuple[float, float], ...] | None = None
    n_resamples: int = 1000
    seed: int = 0
    n_workers: int | None = None
    max_trial_series: int = MAX_TRIAL_SERIES

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline.to_dict(),
            "mrdmd": self.mrdmd.to_dict(),
            "bands": [list(b) for b in self.bands] if self.bands else None,
            "n_resamples": self.n_resamples,
            "seed": self.seed,
            "max_trial_series": self.max_trial_series,
        }


@dataclass
class AnalysisResult:
    env: SnapshotMatrix
    jobs: list[JobRecord]
    events: list[HardwareEvent]
    tree: MrDmdTree
    bands: tuple[tuple[float, float], ...]
    main_magnitudes: BandMagnitudes
    baseline_ref: BandMagnitudes
    baseline_rows: list[int]
    sigma: np.ndarray
    reports: list[ZScoreReport]
    validation: ValidationReport
    summary: dict

    @property
    def overall(self) -> ZScoreReport:
        return self.reports[0]

    def report_for(self, job_id: str) -> ZScoreReport | None:
        return next((r for r in self.reports if r.job_id == job_id), None)


class StageError(AnalysisError):
    """Wraps a failure with the pipeline stage it happened in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def window_modes(
    filtered: Sequence[FilteredMode], start: float, end: float
) -> list[FilteredMode]:
    """Modes whose segments the window fully contains; falls back to any
    overlapping segment when the window is too short to contain one."""
    inside = [m for m in filtered if m.segment.contained_in(start, end)]
    if not inside:
        inside = [m for m in filtered if m.segment.overlaps(start, end)]
    return inside


def window_magnitudes(
    filtered: list[FilteredMode],
    bands: Sequence[tuple[float, float]],
    series_ids,
    start: float,
    end: float,
) -> BandMagnitudes:
    """Band magnitudes over the modes selected by :func:`window_modes`."""
    return band_magnitudes(window_modes(filtered, start, end), list(bands), tuple(series_ids))


def segment_profile(
    modes: Sequence[FilteredMode],
    bands: Sequence[tuple[float, float]],
    series_ids,
) -> BandMagnitudes:
    """Per-band mean of per-segment mean magnitudes for a set of modes.

    Each segment contributes one sample to every band it has modes in: the
    per-series mean magnitude of those modes. A band's profile value is the
    mean of its samples over the segments carrying it, so it reads a
    typical per-segment strength regardless of how many quiet segments
    surround it; bands no segment carries stay zero with a zero mode
    count, and comparisons mask them out via the counts.
    """
    ids = tuple(series_ids)
    band_list = list(bands)
    by_segment: dict[int, list[FilteredMode]] = {}
    for m in modes:
        by_segment.setdefault(id(m.segment), []).append(m)
    n_series, n_bands = len(ids), len(band_list)
    total = np.zeros((n_series, n_bands))
    seg_hits = np.zeros(n_bands)
    counts = np.zeros(n_bands, dtype=int)
    for mods in by_segment.values():
        bm = band_magnitudes(mods, band_list, ids)
        seg_counts = np.asarray(bm.mode_counts)
        active = seg_counts > 0
        total[:, active] += bm.magnitudes[:, active]
        seg_hits[active] += 1
        counts += seg_counts
    active = seg_hits > 0
    total[:, active] /= seg_hits[active]
    return BandMagnitudes(
        bands=tuple(band_list),
        magnitudes=total,
        mode_counts=tuple(int(c) for c in counts),
        series_ids=ids,
    )


def window_profile(
    filtered: Sequence[FilteredMode],
    bands: Sequence[tuple[float, float]],
    series_ids,
    start: float,
    end: float,
) -> BandMagnitudes:
    """Segment-mean band profile over the modes selected by
    :func:`window_modes`."""
    return segment_profile(window_modes(list(filtered), start, end), bands, series_ids)


def class_reference(bm: BandMagnitudes, baseline_rows: Sequence[int]) -> BandMagnitudes:
    """Expected magnitudes per series: its sensor's mean over baseline rows.

    Series whose sensor has no baseline representative fall back to the
    mean over all baseline rows.
    """
    rows = list(baseline_rows)
    if not rows:
        raise ValueError("empty baseline row set")
    by_sensor: dict[str, list[int]] = {}
    for i in rows:
        by_sensor.setdefault(bm.series_ids[i].sensor_name, []).append(i)
    global_mean = bm.magnitudes[rows].mean(axis=0)
    sensor_mean = {s: bm.magnitudes[idx].mean(axis=0) for s, idx in by_sensor.items()}

    ref = np.empty_like(bm.magnitudes)
    for k, key in enumerate(bm.series_ids):
        ref[k] = sensor_mean.get(key.sensor_name, global_mean)
    return BandMagnitudes(
        bands=bm.bands,
        magnitudes=ref,
        mode_counts=bm.mode_counts,
        series_ids=bm.series_ids,
    )


def baseline_reference(
    source: BandMagnitudes, baseline_rows: Sequence[int]
) -> BandMagnitudes:
    """Per-series expected magnitudes against a fixed baseline reading set.

    A series in the baseline set references its own magnitudes from
    ``source`` (the baseline window), so stable per-series traits cancel
    when it is scored; any other series references the mean over baseline
    series of its sensor class.
    """
    ref = class_reference(source, baseline_rows)
    mags = ref.magnitudes.copy()
    rows = list(baseline_rows)
    mags[rows] = source.magnitudes[rows]
    return BandMagnitudes(
        bands=ref.bands,
        magnitudes=mags,
        mode_counts=ref.mode_counts,
        series_ids=ref.series_ids,
    )


def clean_trial_jobs(
    jobs: Sequence[JobRecord], events: Sequence[HardwareEvent]
) -> list[JobRecord]:
    """Jobs behaving typically: passed, and no fatal event on their nodes
    during their window."""
    out = []
    for job in jobs:
        if job.exit_status != "pass":
            continue
        if any(
            ev.severity == "fatal"
            and ev.node_id in job.node_ids
            and job.start <= ev.timestamp < job.end
            for ev in events
        ):
            continue
        out.append(job)
    return out


def _trial_windows(
    env: SnapshotMatrix, jobs: Sequence[JobRecord], events: Sequence[HardwareEvent]
) -> list[tuple[float, float]]:
    start, end = env.time_window()
    clean = [
        (max(j.start, start), min(j.end, end))
        for j in clean_trial_jobs(jobs, events)
        if j.overlaps(start, end)
    ]
    clean = [(a, b) for a, b in clean if a < b]
    if len(clean) >= 2:
        return clean
    quarter = (end - start) / 4.0
    return [(start + i * quarter, start + (i + 1) * quarter) for i in range(4)]


def analyze(
    env: SnapshotMatrix,
    jobs: Sequence[JobRecord],
    events: Sequence[HardwareEvent],
    config: PipelineConfig,
) -> AnalysisResult:
    """Run the full scoring pipeline on parsed inputs."""
    jobs = list(jobs)
    events = list(events)
    validation = validate_dataset(env, jobs, events)
    start, end = env.time_window()

    try:
        tree = mrdmd(env, jobs, config.mrdmd, n_workers=config.n_workers)
    except AnalysisError as exc:
        raise StageError("decompose", exc) from exc

    try:
        t_root = env.n_snapshots * env.dt
        bands = tuple(config.bands) if config.bands else tuple(
            default_bands(config.mrdmd, t_root, env.dt)
        )
        filtered = filter_high_power(tree)
        main_bm = band_magnitudes(filtered, list(bands), env.series_ids)
    except AnalysisError as exc:
        raise StageError("spectrum", exc) from exc

    try:
        kind = config.baseline.kind
        base_matrix = select_baseline(env, config.baseline, window=None, jobs=jobs)
        env_index = {key: i for i, key in enumerate(env.series_ids)}
        baseline_rows = [env_index[key] for key in base_matrix.series_ids]
        overall_obs = segment_profile(filtered, bands, env.series_ids)
        if kind == "user":
            # the reference readings are the job's window on its nodes
            w0, w1 = base_matrix.time_window()
            user_ref = window_profile(filtered, bands, env.series_ids, w0, w1)
    except AnalysisError as exc:
        raise StageError("baseline", exc) from exc

    try:
        windows = _trial_windows(env, jobs, events)
        trial_profiles = [
            window_profile(filtered, bands, env.series_ids, w0, w1)
            for w0, w1 in windows
        ]
        scores = np.stack(
            [band_deviation(p, np.zeros_like(p.magnitudes)) for p in trial_profiles],
            axis=1,
        )
        # keep only windows deviating typically from the cross-window median:
        # a clean job record does not guarantee typical spectral content, and
        # an atypical window inside the reference would leak its own signal
        # into every expectation
        center = np.median(scores, axis=1, keepdims=True)
        deviation = np.median(np.abs(scores - center), axis=0)
        typical = deviation <= 3.0 * max(float(np.median(deviation)), 1e-12)
        if typical.sum() >= 2:
            windows = [w for w, keep in zip(windows, typical) if keep]
            trial_profiles = [p for p, keep in zip(trial_profiles, typical) if keep]

        # per band, average only over trial windows that carry the band, so
        # windows structurally missing a band do not drag its expectation down
        mean_mags = np.zeros((env.n_series, len(bands)))
        present_in = np.zeros(len(bands))
        total_counts = np.zeros(len(bands), dtype=int)
        for p in trial_profiles:
            p_counts = np.asarray(p.mode_counts)
            active = p_counts > 0
            mean_mags[:, active] += p.magnitudes[:, active]
            present_in[active] += 1
            total_counts += p_counts
        active = present_in > 0
        mean_mags[:, active] /= present_in[active]
        trial_mean = BandMagnitudes(
            bands=bands,
            magnitudes=mean_mags,
            mode_counts=tuple(int(c) for c in total_counts),
            series_ids=tuple(env.series_ids),
        )
        # expectation for any scored job window: a typical window's profile
        # (a baseline series' own, others the mean over their sensor class)
        job_base = (
            baseline_reference(user_ref, baseline_rows)
            if kind == "user"
            else baseline_reference(trial_mean, baseline_rows)
        )
        diffs = np.stack(
            [band_deviation(p, job_base.magnitudes) for p in trial_profiles],
            axis=1,
        )

        k = env.n_series
        if k > config.max_trial_series:
            chosen = np.unique(
                np.round(np.linspace(0, k - 1, config.max_trial_series)).astype(int)
            )
            sig_chosen = bootstrap_sigma(
                [diffs[i] for i in chosen], config.n_resamples, config.seed
            )
            sigma = np.full(k, float(np.median(sig_chosen)))
            sigma[chosen] = sig_chosen
        else:
            sigma = bootstrap_sigma(list(diffs), config.n_resamples, config.seed)
    except AnalysisError as exc:
        raise StageError("trials", exc) from exc

    try:
        overall_base = (
            job_base if kind == "user" else baseline_reference(overall_obs, baseline_rows)
        )
        base_ref = overall_base
        reports = [zscores(overall_obs, overall_base, sigma, kind, None)]
        for job in sorted(jobs, key=lambda j: (j.start, j.job_id)):
            if not job.overlaps(start, end):
                continue
            w0, w1 = max(job.start, start), min(job.end, end)
            job_obs = window_profile(filtered, bands, env.series_ids, w0, w1)
            reports.append(zscores(job_obs, job_base, sigma, kind, job.job_id))
    except AnalysisError as exc:
        raise StageError("zscore", exc) from exc

    edges, counts = group_zscores(reports[0])
    summary = {
        "levels": tree.levels(),
        "n_segments": len(tree.nodes),
        "n_retained_modes": tree.n_retained_modes,
        "n_filtered_modes": len(filtered),
        "n_bands": len(bands),
        "n_baseline_series": len(baseline_rows),
        "n_reports": len(reports),
        "n_trial_windows": len(windows),
        "z_histogram": [
            {"lo": float(edges[i]), "hi": float(edges[i + 1]), "count": int(counts[i])}
            for i in range(len(counts))
        ],
        "validation_findings": len(validation.findings),
    }
    return AnalysisResult(
        env=env,
        jobs=jobs,
        events=events,
        tree=tree,
        bands=bands,
        main_magnitudes=main_bm,
        baseline_ref=base_ref,
        baseline_rows=baseline_rows,
        sigma=sigma,
        reports=reports,
        validation=validation,
        summary=summary,
    )
