"""Dense small-matrix linear algebra for the samplers.

All precision matrices arising here are small (order <= ~60) and symmetric,
so a dense symmetric eigendecomposition is used throughout.  Coefficient
draws are made from the spectral factors directly; no matrix inversion is
performed anywhere in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, DecompositionError, DimensionError

# Relative eigenvalue floor below which a precision matrix is treated as
# singular.  The priors in scope keep every precision matrix strictly PD,
# so hitting this signals a configuration bug rather than bad data.
_SINGULAR_RTOL = 1e-12


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvectors (columns of ``vectors``) and eigenvalues, sorted descending."""

    vectors: np.ndarray
    values: np.ndarray

    @property
    def order(self) -> int:
        return self.values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def check_symmetric(m: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Return ``m`` as a float array, enforcing exact symmetry."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {m.shape}")
    if not np.array_equal(m, m.T):
        # Tolerate floating asymmetry from accumulation; reject real asymmetry.
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-12 * (1.0 + np.abs(m).max())):
            raise DimensionError(f"{name} is not symmetric")
        m = 0.5 * (m + m.T)
    return m


def spectral_decompose(m: np.ndarray, role: str = "matrix") -> SpectralDecomposition:
    """Symmetric eigendecomposition with eigenvalues sorted descending.

    ``role`` names the matrix in error messages (e.g. "coefficient precision").
    """
    m = check_symmetric(m, role)
    try:
        values, vectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition of {role} failed: {exc}") from exc
    # eigh returns ascending order
    order = np.argsort(values)[::-1]
    return SpectralDecomposition(vectors=vectors[:, order], values=values[order])


def spectral_decompose_batch(ms: np.ndarray, role: str = "matrix"):
    """Batched symmetric eigendecomposition of a stack of matrices (B, P, P).

    Returns (vectors (B, P, P), values (B, P)) with eigenvalues ascending per
    batch member, as produced by ``numpy.linalg.eigh``.  Raises
    ConditioningError if any matrix is numerically singular.
    """
    ms = np.asarray(ms, dtype=float)
    try:
        values, vectors = np.linalg.eigh(ms)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(f"eigendecomposition of {role} failed: {exc}") from exc
    vmax = values[..., -1]
    vmin = values[..., 0]
    if np.any(vmin <= _SINGULAR_RTOL * np.maximum(vmax, 0.0)):
        raise ConditioningError(f"{role} is numerically singular")
    return vectors, values


def require_positive_definite(decomp: SpectralDecomposition, role: str = "matrix"):
    """Raise ConditioningError unless all eigenvalues are comfortably positive."""
    vmax = decomp.values[0]
    if decomp.values[-1] <= _SINGULAR_RTOL * max(vmax, 0.0):
        raise ConditioningError(
            f"{role} is numerically singular "
            f"(min eigenvalue {decomp.values[-1]:.3e}, max {vmax:.3e})"
        )


def quad_form(v: np.ndarray, m: np.ndarray) -> float:
    """v' m v for a symmetric matrix m."""
    v = np.asarray(v, dtype=float)
    m = np.asarray(m, dtype=float)
    if v.ndim != 1 or m.shape != (v.shape[0], v.shape[0]):
        raise DimensionError(
            f"quad_form dimension mismatch: v has shape {v.shape}, m has shape {m.shape}"
        )
    return float(v @ m @ v)


def add_outer(m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """m + v v' with symmetry preserved."""
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or m.shape != (v.shape[0], v.shape[0]):
        raise DimensionError(
            f"add_outer dimension mismatch: v has shape {v.shape}, m has shape {m.shape}"
        )
    out = m + np.outer(v, v)
    return 0.5 * (out + out.T)
