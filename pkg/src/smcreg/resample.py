"""Systematic resampling of a particle matrix and the degeneracy trigger.

Particles are stored as columns of a d x M matrix.  Systematic resampling
selects M columns at the (u, u+1, ..., u+M-1)/M quantiles of the discrete
distribution on column indices, which guarantees that the copy count of
column m is either floor(M p_m) or ceil(M p_m).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, SimplexError
from .rng import RandomStream


def check_simplex(p: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise SimplexError("probability vector must be a nonempty 1-d array")
    if np.any(p < 0) or abs(p.sum() - 1.0) > atol:
        raise SimplexError("probabilities must be nonnegative and sum to 1")
    return p


def systematic_indices(p: np.ndarray, u: float) -> np.ndarray:
    """0-based column indices chosen by systematic resampling with offset u."""
    p = check_simplex(p)
    if not 0.0 < u < 1.0:
        raise SimplexError(f"offset u must lie strictly in (0, 1), got {u}")
    m_count = p.size
    w2 = m_count * np.cumsum(p)
    # guard the last boundary against cumsum rounding below u + M - 1
    w2[-1] = float(m_count)
    indices = np.empty(m_count, dtype=np.int64)
    w3 = u
    k = 0
    for m in range(m_count):
        while w2[k] < w3:
            k += 1
        indices[m] = k
        w3 += 1.0
    return indices


def resample_columns(theta: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Gather the columns of theta (d x M) named by a 0-based index vector."""
    theta = np.asarray(theta, dtype=float)
    indices = np.asarray(indices)
    if theta.ndim != 2:
        raise DimensionError(f"particle matrix must be 2-d, got shape {theta.shape}")
    if indices.ndim != 1 or indices.size != theta.shape[1]:
        raise DimensionError(
            f"index vector has shape {indices.shape}, expected ({theta.shape[1]},)"
        )
    if np.any(indices < 0) or np.any(indices >= theta.shape[1]):
        raise DimensionError("resampling index out of range")
    return theta[:, indices]


def systematic_resample(theta: np.ndarray, p: np.ndarray, u: float) -> np.ndarray:
    """Resample the columns of theta (d x M) systematically with offset u."""
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2:
        raise DimensionError(f"particle matrix must be 2-d, got shape {theta.shape}")
    if theta.shape[1] != np.asarray(p).size:
        raise DimensionError(
            f"particle matrix has {theta.shape[1]} columns but p has {np.asarray(p).size}"
        )
    return resample_columns(theta, systematic_indices(p, u))


def systematic_resample_draw(
    theta: np.ndarray, p: np.ndarray, stream: RandomStream
) -> np.ndarray:
    """Convenience wrapper drawing the offset u from a RandomStream."""
    return systematic_resample(theta, p, stream.uniform())


def should_resample(p: np.ndarray, tau: float) -> bool:
    """True iff the sum of squared probabilities exceeds tau."""
    p = np.asarray(p, dtype=float)
    return bool(p @ p > tau)
