"""Recursive multiresolution decomposition over a binary segment tree.

Each node fits the current residual on a level-dependent sample stride,
keeps the modes oscillating slowly enough for its window, subtracts their
reconstruction at native resolution, and recurses on the two halves. Splits
snap to nearby job boundaries at configured levels. Nodes within one level
touch disjoint column ranges, so a level's segments evaluate in parallel
with bit-identical results to a serial run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from modescope.dmd import compute_dmd, reconstruct
from modescope.model import (
    DmdResult,
    InsufficientSnapshotsError,
    JobRecord,
    MrDmdConfig,
    MrDmdNode,
    MrDmdTree,
    SnapshotMatrix,
    TimeSegment,
    ZeroDataError,
)
from modescope.spectrum import mode_frequency


def slow_mode_indices(result: DmdResult, segment: TimeSegment, rho: float) -> np.ndarray:
    """Indices of modes with frequency at or below rho oscillations per window."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    cutoff = rho / segment.duration
    freqs = np.array([mode_frequency(complex(w)) for w in result.omegas])
    return np.flatnonzero(freqs <= cutoff)


def sampling_stride(
    level: int,
    t_root: float,
    native_dt: float,
    rho: float,
    nyquist_factor: float,
    n_snapshots: int | None = None,
    min_snapshots: int | None = None,
) -> int:
    """Sample stride leaving nyquist_factor times the Nyquist rate for the
    level's cutoff frequency rho * 2^level / t_root.

    Capped so the strided segment keeps at least 2 * min_snapshots columns.
    """
    if t_root <= 0 or native_dt <= 0 or rho <= 0 or nyquist_factor <= 0:
        raise ValueError("all stride parameters must be positive")
    f_cut = rho * 2.0**level / t_root
    required_rate = nyquist_factor * 2.0 * f_cut
    stride = max(1, math.floor(1.0 / (native_dt * required_rate)))
    if n_snapshots is not None and min_snapshots is not None:
        stride = min(stride, max(1, n_snapshots // (2 * min_snapshots)))
    return stride


def choose_split(
    segment: TimeSegment,
    jobs: list[JobRecord],
    vicinity: float,
    enabled: bool,
) -> float:
    """Split timestamp: the job boundary nearest the midpoint when one lies
    within +/-vicinity, else the midpoint. Ties go to the earlier boundary.
    """
    mid = 0.5 * (segment.start + segment.end)
    if not enabled:
        return mid
    candidates = []
    for job in jobs:
        if not job.overlaps(segment.start, segment.end):
            continue
        for bound in (job.start, job.end):
            if segment.start < bound < segment.end and abs(bound - mid) <= vicinity:
                candidates.append(bound)
    if not candidates:
        return mid
    return min(candidates, key=lambda b: (abs(b - mid), b))


@dataclass(frozen=True)
class _Task:
    start: float
    end: float
    level: int
    col_start: int
    col_end: int


def mrdmd(
    m: SnapshotMatrix,
    jobs: list[JobRecord] | None = None,
    config: MrDmdConfig | None = None,
    n_workers: int | None = None,
) -> MrDmdTree:
    """Decompose a snapshot matrix into the per-level slow-mode tree.

    ``n_workers=1`` forces serial evaluation; any other value fans sibling
    segments of a level out to a thread pool. Both orders produce the same
    tree bit for bit.
    """
    if config is None:
        config = MrDmdConfig()
    jobs = jobs or []
    if m.n_snapshots < 2 * config.min_snapshots:
        raise InsufficientSnapshotsError(
            f"root needs >= {2 * config.min_snapshots} snapshots, got {m.n_snapshots}"
        )

    residual = np.array(m.values, copy=True)
    times = m.times()
    t_root = m.n_snapshots * m.dt
    node_set = m.node_ids()
    relevant_jobs = [j for j in jobs if j.node_ids & node_set]

    def evaluate(task: _Task) -> MrDmdNode:
        c0, c1 = task.col_start, task.col_end
        stride = sampling_stride(
            task.level,
            t_root,
            m.dt,
            config.max_oscillations,
            config.nyquist_factor,
            n_snapshots=c1 - c0,
            min_snapshots=config.min_snapshots,
        )
        seg = TimeSegment(task.start, task.end, task.level, stride)
        sub = residual[:, c0:c1:stride]
        dt_fit = m.dt * stride
        try:
            result = compute_dmd(
                sub[:, :-1],
                sub[:, 1:],
                dt_fit,
                rank=None,
                segment=seg,
                t_first=float(times[c0]),
            )
        except ZeroDataError:
            result = DmdResult.empty(m.n_series, dt_fit, seg)
        slow = slow_mode_indices(result, seg, config.max_oscillations)
        retained = result.restrict(slow)
        if retained.rank:
            recon = reconstruct(retained, times[c0:c1] - seg.start)
            residual[:, c0:c1] -= recon.real
        return MrDmdNode(
            segment=seg,
            result=retained,
            slow_mode_count=retained.rank,
            col_start=c0,
            col_end=c1,
        )

    start, end = m.time_window()
    frontier = [_Task(start, end, 0, 0, m.n_snapshots)]
    nodes: list[MrDmdNode] = []

    workers = n_workers if n_workers is not None else (os.cpu_count() or 1)
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while frontier:
            if pool is not None and len(frontier) > 1:
                nodes.extend(pool.map(evaluate, frontier))
            else:
                nodes.extend(evaluate(t) for t in frontier)

            next_frontier: list[_Task] = []
            for task in frontier:
                if task.level >= config.max_level:
                    continue
                if task.col_end - task.col_start < 2 * config.min_snapshots:
                    continue
                seg = TimeSegment(task.start, task.end, task.level)
                vicinity = config.split_vicinity * seg.duration / t_root
                t_split = choose_split(
                    seg,
                    relevant_jobs,
                    vicinity,
                    enabled=task.level in config.job_split_levels,
                )
                cut = task.col_start + int(
                    np.searchsorted(times[task.col_start : task.col_end], t_split, side="left")
                )
                if cut - task.col_start >= config.min_snapshots:
                    next_frontier.append(
                        _Task(task.start, t_split, task.level + 1, task.col_start, cut)
                    )
                if task.col_end - cut >= config.min_snapshots:
                    next_frontier.append(
                        _Task(t_split, task.end, task.level + 1, cut, task.col_end)
                    )
            frontier = next_frontier
    finally:
        if pool is not None:
            pool.shutdown(wait=True)

    return MrDmdTree(nodes=tuple(nodes), config=config)


def residual_after(tree: MrDmdTree, m: SnapshotMatrix) -> float:
    """Relative Frobenius norm of data minus all retained reconstructions."""
    norm = float(np.linalg.norm(m.values))
    times = m.times()
    acc = np.zeros_like(m.values)
    for node in tree.nodes:
        if node.result.n_series != m.n_series:
            raise ValueError("tree was computed from a different matrix shape")
        if node.col_end > m.n_snapshots:
            raise ValueError("tree column range exceeds the matrix")
        if node.result.rank:
            local = times[node.col_start : node.col_end] - node.segment.start
            acc[:, node.col_start : node.col_end] += reconstruct(node.result, local).real
    if norm == 0:
        return 0.0
    return float(np.linalg.norm(m.values - acc) / norm)
