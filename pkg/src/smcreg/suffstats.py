"""Streaming sufficient statistics for Gaussian-response models.

The accumulators (n, y'y, C'y, C'C) are all the Gaussian engines ever retain
about past data; there is deliberately no raw-data field, so the move step is
purely online by construction.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError


class SufficientStats:
    """Accumulators n, y'y, C'y, C'C for design rows (y_i, c_i)."""

    __slots__ = ("n", "yty", "cty", "ctc")

    def __init__(self, p_dim: int):
        if p_dim < 1:
            raise DimensionError(f"design width must be >= 1, got {p_dim}")
        self.n = 0
        self.yty = 0.0
        self.cty = np.zeros(p_dim)
        self.ctc = np.zeros((p_dim, p_dim))

    @property
    def p_dim(self) -> int:
        return self.cty.shape[0]

    def update(self, y_new: float, c_new: np.ndarray) -> "SufficientStats":
        c_new = np.asarray(c_new, dtype=float)
        if c_new.shape != (self.p_dim,):
            raise DimensionError(
                f"design row has shape {c_new.shape}, expected ({self.p_dim},)"
            )
        self.n += 1
        self.yty += float(y_new) ** 2
        self.cty += c_new * float(y_new)
        self.ctc += np.outer(c_new, c_new)
        return self

    def residual_ss(self, theta: np.ndarray) -> float:
        """y'y - 2 (C'y)'theta + theta' C'C theta = sum of squared residuals."""
        theta = np.asarray(theta, dtype=float)
        return float(self.yty - 2.0 * self.cty @ theta + theta @ self.ctc @ theta)

    def residual_ss_columns(self, thetas: np.ndarray) -> np.ndarray:
        """Residual sums of squares for each column of a P x M coefficient matrix."""
        thetas = np.asarray(thetas, dtype=float)
        quad = np.einsum("pm,pq,qm->m", thetas, self.ctc, thetas)
        return self.yty - 2.0 * (self.cty @ thetas) + quad

    def copy(self) -> "SufficientStats":
        out = SufficientStats(self.p_dim)
        out.n = self.n
        out.yty = self.yty
        out.cty = self.cty.copy()
        out.ctc = self.ctc.copy()
        return out

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "yty": self.yty,
            "cty": self.cty.tolist(),
            "ctc": self.ctc.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SufficientStats":
        cty = np.asarray(data["cty"], dtype=float)
        out = cls(cty.shape[0])
        out.n = int(data["n"])
        out.yty = float(data["yty"])
        out.cty = cty
        out.ctc = np.asarray(data["ctc"], dtype=float)
        return out


def init(p_dim: int) -> SufficientStats:
    return SufficientStats(p_dim)


def seed_from_batch(y: np.ndarray, c: np.ndarray) -> SufficientStats:
    """Batch-equivalent of folding update over all rows of (y, c)."""
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or y.shape != (c.shape[0],):
        raise DimensionError(
            f"response has shape {y.shape} but design has shape {c.shape}"
        )
    stats = SufficientStats(c.shape[1] if c.shape[1] >= 1 else 1)
    stats.n = y.shape[0]
    stats.yty = float(y @ y)
    stats.cty = c.T @ y
    stats.ctc = c.T @ c
    return stats
