"""Determined-BSS row updates shared by the plain and unified filters.

Two exact row updates for the Gaussian determined-mixture objective:
an iterative-projection step that solves two small systems per row, and
an iterative source-steering step that is solve-free. Both operate on
the leading rows of a (possibly extended) square demixing matrix and
never touch the pinned tap rows.
"""
from __future__ import annotations

import numpy as np

from .linalg import DENOMINATOR_GUARD, NumericalError, SolveCounter, checked_solve


def weighted_cov(vectors: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Frame-averaged covariance sum_t v v^H / w, shape (F, D, D).

    ``vectors`` is (F, D, T); ``weights`` is a positive (F, T) variance
    track. The result is divided by the frame count.
    """
    if vectors.shape[2] == 0:
        raise ValueError("cannot average a covariance over zero frames")
    inv = 1.0 / weights
    return (vectors * inv[:, None, :]) @ vectors.conj().swapaxes(1, 2) / vectors.shape[2]


def ip_update_row(
    matrix: np.ndarray,
    cov: np.ndarray,
    row: int,
    n_channels: int,
    counter: SolveCounter | None = None,
) -> None:
    """Iterative-projection update of one demixing row, in place.

    ``matrix`` is the (F, D, D) filter whose leading ``n_channels``
    rows are free; ``cov`` is the diagonally loaded weighted covariance
    of the stacked observation under the row's source variance. Exactly
    two solves per frequency: one against the separation block, one
    against the covariance.
    """
    n_bins, dim, _ = matrix.shape
    n = n_channels
    rhs = np.zeros((n, 1), dtype=np.complex128)
    rhs[row, 0] = 1.0
    a = checked_solve(matrix[:, :n, :n], rhs, "separation block", counter, n_bins)[..., 0]
    if dim > n:
        a = np.concatenate([a, np.zeros((n_bins, dim - n), dtype=np.complex128)], axis=1)
    u = checked_solve(cov, a[..., None], "weighted covariance", counter, n_bins)[..., 0]
    scale = np.einsum("fd,fd->f", a.conj(), u).real
    if np.any(scale <= 0) or not np.all(np.isfinite(scale)):
        bad = int(np.flatnonzero((scale <= 0) | ~np.isfinite(scale))[0])
        raise NumericalError(f"non-positive projection norm at frequency bin {bad}")
    matrix[:, row, :] = u.conj() / np.sqrt(scale)[:, None]


def iss_coefficients(outputs: np.ndarray, variances: np.ndarray, n: int) -> np.ndarray:
    """Source-steering gains for pivot source ``n``, shape (F, N).

    Computed from the current outputs alone: cross gains are ratios of
    variance-weighted correlations, and the self gain rescales the pivot
    to unit weighted power.
    """
    n_frames = outputs.shape[2]
    inv = 1.0 / variances.transpose(1, 0, 2)  # (F, N, T)
    pivot = outputs[:, n, :]
    num = np.einsum("fmt,ft->fm", outputs * inv, pivot.conj())
    den = np.einsum("fmt,ft->fm", inv, np.abs(pivot) ** 2)
    den = np.maximum(den, DENOMINATOR_GUARD)
    gains = num / den
    gains[:, n] = 1.0 - np.sqrt(n_frames) / np.sqrt(den[:, n])
    return gains


def iss_update_source(
    matrix: np.ndarray,
    outputs: np.ndarray,
    variances: np.ndarray,
    n: int,
    counter: SolveCounter | None = None,
) -> None:
    """Rank-1 source-steering update around pivot source ``n``, in place.

    Subtracts ``gains[m] * row_n`` from every free row and keeps the
    outputs consistent incrementally. No linear solves.
    """
    del counter  # solve-free by construction
    n_src = outputs.shape[1]
    gains = iss_coefficients(outputs, variances, n)
    pivot_row = matrix[:, n, :].copy()
    pivot_out = outputs[:, n, :].copy()
    matrix[:, :n_src, :] -= gains[:, :, None] * pivot_row[:, None, :]
    outputs -= gains[:, :, None] * pivot_out[:, None, :]


def iss_source_sweep(
    matrix: np.ndarray,
    outputs: np.ndarray,
    variances: np.ndarray,
    counter: SolveCounter | None = None,
) -> None:
    """One full steering sweep over sources 0..N-1 in ascending order."""
    for n in range(outputs.shape[1]):
        iss_update_source(matrix, outputs, variances, n, counter)
