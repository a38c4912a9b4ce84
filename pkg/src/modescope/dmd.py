"""Exact dynamic mode decomposition of one snapshot pair.

The fit pipeline is: reduced SVD of X, hard-threshold rank truncation,
reduced operator A' = U* Xp V inv(S), eigendecomposition A'W = WL, modes
Phi = Xp V inv(S) W, continuous rates omega = log(lambda)/dt, amplitudes
b = argmin ||Phi b - x0||. All functions are pure and thread-safe.
"""

from __future__ import annotations

import warnings

import numpy as np

from modescope.model import (
    DmdResult,
    InsufficientSnapshotsError,
    SnapshotMatrix,
    TimeSegment,
    ZeroDataError,
)

# relative cutoff below which singular values are treated as numerically zero
SIGMA_RTOL = 1e-12


def build_snapshot_pair(m: SnapshotMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Split M snapshots into the (X, Xp) pair shifted by one step."""
    if m.n_snapshots < 2:
        raise InsufficientSnapshotsError(f"need >= 2 snapshots, got {m.n_snapshots}")
    return m.values[:, :-1], m.values[:, 1:]


def svht_rank(singular_values: np.ndarray, rows: int, cols: int) -> int:
    """Truncation rank by the optimal hard threshold, noise level unknown.

    tau = w(beta) * median(sigma) with the cubic approximation of w and
    beta the matrix aspect ratio; counts values strictly above tau, never
    returning less than 1.
    """
    s = np.asarray(singular_values, dtype=float)
    if s.size == 0:
        raise ValueError("empty singular value list")
    if np.any(s < 0):
        raise ValueError("singular values must be non-negative")
    if np.any(np.diff(s) > 0):
        raise ValueError("singular values must be descending")
    if rows < 1 or cols < 1:
        raise ValueError("matrix dimensions must be positive")
    beta = min(rows, cols) / max(rows, cols)
    omega = 0.56 * beta**3 - 0.95 * beta**2 + 1.82 * beta + 1.43
    tau = omega * float(np.median(s))
    return max(int(np.count_nonzero(s > tau)), 1)


def compute_dmd(
    X: np.ndarray,
    Xp: np.ndarray,
    dt: float,
    rank: int | None = None,
    segment: TimeSegment | None = None,
    t_first: float | None = None,
) -> DmdResult:
    """Fit modes, eigenvalues, and amplitudes to one snapshot pair.

    ``rank=None`` selects the rank with svht_rank; a fixed integer caps it
    instead. ``t_first`` is the absolute time of X's first column; when it
    differs from ``segment.start`` the amplitudes are re-anchored so that
    reconstruct() stays correct with times measured from the segment start.
    """
    X = np.asarray(X, dtype=float)
    Xp = np.asarray(Xp, dtype=float)
    if X.shape != Xp.shape:
        raise ValueError(f"shape mismatch: X {X.shape} vs Xp {Xp.shape}")
    if X.ndim != 2 or X.shape[1] < 1:
        raise InsufficientSnapshotsError("need at least one snapshot pair")
    if dt <= 0:
        raise ValueError("dt must be positive")
    k, n = X.shape
    if segment is None:
        segment = TimeSegment(0.0, dt * (n + 1), level=0)
    if t_first is None:
        t_first = segment.start

    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    if s[0] <= 0:
        raise ZeroDataError("all-zero snapshot matrix")

    usable = int(np.count_nonzero(s > SIGMA_RTOL * s[0]))
    r = svht_rank(s, k, n) if rank is None else max(int(rank), 1)
    r = min(r, usable)

    Ur = U[:, :r]
    sr = s[:r]
    Vr = Vh[:r, :].conj().T
    proj = Xp @ (Vr / sr)          # Xp V inv(S), reused for modes
    Atilde = Ur.conj().T @ proj

    lam, W = np.linalg.eig(Atilde)
    # eig returns real arrays for real inputs with real spectra; the log
    # below needs the complex principal branch either way
    lam = lam.astype(complex)
    W = W.astype(complex)

    # deterministic eigenvector convention: unit norm, dominant entry
    # real-positive
    W = W / np.linalg.norm(W, axis=0, keepdims=True)
    for i in range(W.shape[1]):
        pivot = W[np.argmax(np.abs(W[:, i])), i]
        W[:, i] *= np.conj(pivot) / abs(pivot)

    nonzero = lam != 0
    if not np.all(nonzero):
        warnings.warn(
            f"dropping {int(np.count_nonzero(~nonzero))} zero eigenvalue(s): "
            "continuous rate undefined",
            stacklevel=2,
        )
        lam, W = lam[nonzero], W[:, nonzero]

    modes = proj @ W
    omegas = np.log(lam) / dt

    pred = Ur @ (Atilde @ (Ur.conj().T @ X))
    residual = float(np.linalg.norm(Xp - pred))

    result = DmdResult(
        modes=modes,
        lambdas=lam,
        omegas=omegas,
        amplitudes=np.zeros(lam.size, dtype=complex),
        rank=lam.size,
        dt=dt,
        segment=segment,
        residual=residual,
    )
    b = amplitudes(result, X[:, 0])
    if t_first != segment.start and lam.size:
        b = b * np.exp(-omegas * (t_first - segment.start))
    return DmdResult(
        modes=modes,
        lambdas=lam,
        omegas=omegas,
        amplitudes=b,
        rank=lam.size,
        dt=dt,
        segment=segment,
        residual=residual,
    )


def amplitudes(result: DmdResult, x0: np.ndarray) -> np.ndarray:
    """Least-squares mode weights solving Phi b = x0 (minimum-norm)."""
    x0 = np.asarray(x0, dtype=complex).reshape(-1)
    if x0.size != result.n_series:
        raise ValueError(f"x0 length {x0.size} != {result.n_series} series")
    if result.rank == 0:
        return np.zeros(0, dtype=complex)
    b, *_ = np.linalg.lstsq(result.modes, x0, rcond=None)
    return b


def reconstruct(result: DmdResult, times: np.ndarray) -> np.ndarray:
    """Evaluate sum_i b_i phi_i exp(omega_i t) at times from segment start."""
    t = np.atleast_1d(np.asarray(times, dtype=float))
    if result.rank == 0:
        return np.zeros((result.n_series, t.size), dtype=complex)
    growth = np.exp(np.outer(result.omegas, t))
    return result.modes @ (growth * result.amplitudes[:, None])


def dmd_of_matrix(
    m: SnapshotMatrix,
    rank: int | None = None,
    segment: TimeSegment | None = None,
) -> DmdResult:
    """Fit a whole SnapshotMatrix; anchors amplitudes at the segment start."""
    X, Xp = build_snapshot_pair(m)
    if segment is None:
        segment = TimeSegment(m.t0, m.t0 + m.n_snapshots * m.dt, level=0)
    return compute_dmd(X, Xp, m.dt, rank=rank, segment=segment, t_first=m.t0)
