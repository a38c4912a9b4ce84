"""Extremum-preserving downsampling for the brushable timeline view."""

from __future__ import annotations

import numpy as np


def downsample_minmax(values: np.ndarray, max_points: int) -> np.ndarray:
    """Indices of at most max_points samples keeping each bucket's min/max.

    Values are split into max_points//2 time buckets; every bucket
    contributes its minimum and maximum sample, so peaks and dips survive
    any zoom level. Returned indices are sorted and unique.
    """
    v = np.asarray(values, dtype=float).reshape(-1)
    if max_points < 2:
        raise ValueError("max_points must be >= 2")
    n = v.size
    if n <= max_points:
        return np.arange(n)
    n_buckets = max_points // 2
    edges = np.linspace(0, n, n_buckets + 1).astype(int)
    picked = set()
    for b in range(n_buckets):
        lo, hi = edges[b], edges[b + 1]
        if hi <= lo:
            continue
        chunk = v[lo:hi]
        picked.add(lo + int(np.argmin(chunk)))
        picked.add(lo + int(np.argmax(chunk)))
    return np.array(sorted(picked), dtype=int)
