"""Per-mode frequency and power, threshold filtering, band aggregation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from modescope.model import (
    BandMagnitudes,
    ConfigError,
    MrDmdConfig,
    MrDmdTree,
    SeriesKey,
    TimeSegment,
)


def mode_frequency(omega: complex) -> float:
    """Oscillation frequency in cycles per second: |imag(omega)| / 2pi."""
    return abs(omega.imag) / (2.0 * np.pi)


def mode_power(phi: np.ndarray) -> float:
    """Squared 2-norm of a spatial mode."""
    phi = np.asarray(phi)
    return float(np.real(np.vdot(phi, phi)))


@dataclass(frozen=True, eq=False)
class FilteredMode:
    """One retained mode that survived the power threshold."""

    segment: TimeSegment
    phi: np.ndarray
    omega: complex
    frequency: float
    power: float
    norm_power: float


def filter_high_power(tree: MrDmdTree, threshold: float | None = None) -> list[FilteredMode]:
    """Keep modes whose per-segment normalized power strictly exceeds threshold.

    Each mode's spatial vector is weighted by its fitted amplitude, so
    ``phi[k]`` is the signal amplitude the mode expresses in series ``k`` at
    the segment start and power measures expressed strength rather than
    eigenvector norm. Powers are normalized by the maximum within each
    segment's retained set, so every non-empty segment keeps at least its
    strongest mode. Segments whose maximum power is zero contribute nothing.
    """
    if threshold is None:
        threshold = tree.config.power_threshold
    if not (0 < threshold <= 1):
        raise ConfigError(f"threshold must be in (0, 1], got {threshold}")

    kept: list[FilteredMode] = []
    for node in tree.nodes:
        res = node.result
        if res.rank == 0:
            continue
        weighted = res.modes * res.amplitudes[None, :]
        powers = np.array([mode_power(weighted[:, i]) for i in range(res.rank)])
        pmax = powers.max()
        if pmax <= 0:
            continue
        for i in range(res.rank):
            npow = powers[i] / pmax
            if npow > threshold:
                omega = complex(res.omegas[i])
                kept.append(
                    FilteredMode(
                        segment=node.segment,
                        phi=weighted[:, i],
                        omega=omega,
                        frequency=mode_frequency(omega),
                        power=float(powers[i]),
                        norm_power=float(npow),
                    )
                )
    return kept


def _merge_conjugate_pairs(
    modes: list[FilteredMode],
) -> list[tuple[TimeSegment, float, np.ndarray]]:
    """Collapse each +/-f conjugate pair into one (segment, f, |phi|) entry.

    Two modes of one segment pair up when their omegas are conjugates; the
    pair's magnitude vector is the average of the two members'.
    """
    merged: list[tuple[TimeSegment, float, np.ndarray]] = []
    used = [False] * len(modes)
    for i, mi in enumerate(modes):
        if used[i]:
            continue
        used[i] = True
        mag = np.abs(mi.phi)
        if mi.omega.imag != 0:
            scale = 1.0 + abs(mi.omega)
            for j in range(i + 1, len(modes)):
                mj = modes[j]
                if used[j] or mj.segment is not mi.segment:
                    continue
                if abs(mj.omega - mi.omega.conjugate()) <= 1e-9 * scale:
                    used[j] = True
                    mag = 0.5 * (mag + np.abs(mj.phi))
                    break
        merged.append((mi.segment, mi.frequency, mag))
    return merged


def band_magnitudes(
    modes: list[FilteredMode],
    bands: list[tuple[float, float]],
    series_ids: tuple[SeriesKey, ...],
) -> BandMagnitudes:
    """Mean |phi[k]| per series and half-open frequency band [lo, hi).

    Conjugate pairs are merged first so an oscillation counts once, and
    ``mode_counts`` tallies the merged modes per band.
    """
    bands = [(float(lo), float(hi)) for lo, hi in bands]
    for lo, hi in bands:
        if not lo < hi:
            raise ConfigError(f"band ({lo}, {hi}) is empty or inverted")
    for (_, hi), (lo2, _) in zip(bands, bands[1:]):
        if lo2 < hi:
            raise ConfigError("bands overlap or are out of order")

    k = len(series_ids)
    sums = np.zeros((k, len(bands)))
    counts = np.zeros(len(bands), dtype=int)
    for _, f, mag in _merge_conjugate_pairs(modes):
        if mag.size != k:
            raise ValueError(f"mode has {mag.size} entries for {k} series")
        for b, (lo, hi) in enumerate(bands):
            if lo <= f < hi:
                sums[:, b] += mag
                counts[b] += 1
                break
    mags = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    return BandMagnitudes(
        bands=tuple(bands),
        magnitudes=mags,
        mode_counts=tuple(int(c) for c in counts),
        series_ids=series_ids,
    )


def default_bands(
    config: MrDmdConfig, t_root: float, native_dt: float
) -> list[tuple[float, float]]:
    """Octave-style bands: window fundamental, per-level budgets, Nyquist.

    Edges run from 1/T_root through each level budget rho*2^l/T_root that
    stays below Nyquist, ending at Nyquist = 1/(2*dt).
    """
    if t_root <= 2 * native_dt:
        raise ConfigError("window too short for any frequency band")
    nyquist = 1.0 / (2.0 * native_dt)
    edges = [1.0 / t_root]
    for level in range(config.max_level):
        f = config.max_oscillations * 2.0**level / t_root
        if f >= nyquist:
            break
        if f > edges[-1]:
            edges.append(f)
    edges.append(nyquist)
    return list(zip(edges, edges[1:]))
