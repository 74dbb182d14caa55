"""Discrete-distribution machinery for particle posteriors.

A particle posterior for a scalar parameter is a probability mass function
with atoms (particle values) and probabilities (normalized weights).  This
module provides the quantile function, moments, credible intervals and the
frequency-polygon density summary used to display such distributions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SmcregError

# Multiplier converting an optimal KDE bandwidth into an optimal frequency
# polygon bin width (Gaussian kernel): (1280 sqrt(pi) / 49)^(1/5).
FP_BANDWIDTH_FACTOR = (1280.0 * np.sqrt(np.pi) / 49.0) ** 0.2


@dataclass(frozen=True)
class DiscreteDistribution:
    """Atoms and probabilities of a discrete distribution."""

    atoms: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        probs = np.asarray(self.probs, dtype=float)
        if atoms.ndim != 1 or atoms.shape != probs.shape or atoms.size < 1:
            raise SmcregError("atoms and probs must be equal-length 1-d arrays")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise SmcregError("probs must be nonnegative and sum to 1")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)

    def __len__(self) -> int:
        return self.atoms.size


@dataclass(frozen=True)
class FrequencyPolygon:
    """Piecewise-linear density summary over mid-bin points."""

    bin_width: float
    bin_origin: float
    midpoints: np.ndarray
    heights: np.ndarray


def quantile(d: DiscreteDistribution, q: float) -> float:
    """Smallest atom x with F(x) >= q."""
    if not 0.0 <= q <= 1.0:
        raise SmcregError(f"quantile level must be in [0, 1], got {q}")
    order = np.argsort(d.atoms, kind="stable")
    atoms = d.atoms[order]
    cdf = np.cumsum(d.probs[order])
    idx = int(np.searchsorted(cdf, q, side="left"))
    if idx >= atoms.size:
        idx = atoms.size - 1
    if q == 0.0:
        # inf{x : 0 <= F(x)} over atoms with positive mass
        positive = d.probs[order] > 0
        return float(atoms[np.argmax(positive)])
    return float(atoms[idx])


def mean(d: DiscreteDistribution) -> float:
    return float(d.probs @ d.atoms)


def variance(d: DiscreteDistribution) -> float:
    mu = mean(d)
    return float(d.probs @ (d.atoms - mu) ** 2)


def credible_interval(d: DiscreteDistribution, level: float = 0.95) -> tuple[float, float]:
    if not 0.0 < level < 1.0:
        raise SmcregError(f"credible level must be in (0, 1), got {level}")
    lo = quantile(d, (1.0 - level) / 2.0)
    hi = quantile(d, (1.0 + level) / 2.0)
    return lo, hi


def frequency_polygon(
    d: DiscreteDistribution, h: float, origin: float | None = None
) -> FrequencyPolygon:
    """Bin the atoms into half-open bins [left, right) of width h and connect
    mid-bin heights, extended by one empty bin at each end."""
    if h <= 0:
        raise SmcregError(f"bin width must be positive, got {h}")
    if origin is None:
        origin = float(d.atoms.min()) - 0.5 * h
    idx = np.floor((d.atoms - origin) / h).astype(int)
    j_lo, j_hi = int(idx.min()), int(idx.max())
    nbins = j_hi - j_lo + 1
    mass = np.zeros(nbins + 2)
    np.add.at(mass, idx - j_lo + 1, d.probs)
    heights = mass / h
    midpoints = origin + (np.arange(j_lo - 1, j_hi + 2) + 0.5) * h
    return FrequencyPolygon(
        bin_width=float(h), bin_origin=float(origin), midpoints=midpoints, heights=heights
    )


def fp_bin_width(samples: np.ndarray) -> float:
    """Frequency-polygon bin width from a sample, via the normal-reference
    KDE bandwidth 1.06 * min(sd, IQR/1.34) * n^(-1/5)."""
    samples = np.asarray(samples, dtype=float)
    n = samples.size
    if n < 2 or np.all(samples == samples[0]):
        raise SmcregError("bin width rule needs at least 2 distinct sample values")
    sd = float(np.std(samples, ddof=1))
    q25, q75 = np.percentile(samples, [25.0, 75.0])
    iqr = float(q75 - q25)
    spread = min(sd, iqr / 1.34) if iqr > 0 else sd
    h_kde = 1.06 * spread * n ** (-0.2)
    return float(FP_BANDWIDTH_FACTOR * h_kde)
