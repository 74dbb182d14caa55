"""Particle-system bookkeeping shared by all online engines.

The engine state is a d x M particle matrix plus a log-weight vector.  The
per-observation cycle is: fold the observation into the model state, add its
per-particle log-likelihood to the log weights, resample if the normalized
weights have degenerated (sum of squares above tau), then apply the model's
move step to every column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import discrete
from .errors import CorruptedStateError, DimensionError
from .resample import should_resample, systematic_resample
from .rng import RandomStream


@dataclass
class ParticleSystem:
    """Particle matrix (one column per particle), log weights, and counters."""

    theta: np.ndarray
    logw: np.ndarray
    names: tuple[str, ...]
    n_seen: int = 0
    resample_count: int = 0
    last_resampled: bool = False
    last_accept_rate: float | None = None
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float)
        self.logw = np.asarray(self.logw, dtype=float)
        if self.theta.ndim != 2:
            raise DimensionError(
                f"particle matrix must be 2-d, got shape {self.theta.shape}"
            )
        if self.logw.shape != (self.theta.shape[1],):
            raise DimensionError(
                f"log-weight vector has shape {self.logw.shape}, expected "
                f"({self.theta.shape[1]},)"
            )
        if len(self.names) != self.theta.shape[0]:
            raise DimensionError(
                f"{len(self.names)} row names for {self.theta.shape[0]} rows"
            )

    @property
    def d(self) -> int:
        return self.theta.shape[0]

    @property
    def M(self) -> int:
        return self.theta.shape[1]

    def row_index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise DimensionError(f"no particle row named {name!r}") from None


def uniform_system(theta: np.ndarray, names) -> ParticleSystem:
    """Particle system with equal weights log(1/M) on the given columns."""
    theta = np.asarray(theta, dtype=float)
    m_count = theta.shape[1]
    return ParticleSystem(
        theta=theta,
        logw=np.full(m_count, -np.log(m_count)),
        names=tuple(names),
    )


def normalize_weights(logw: np.ndarray) -> np.ndarray:
    """Probability vector from log weights via a stabilized softmax."""
    logw = np.asarray(logw, dtype=float)
    if not np.all(np.isfinite(logw)):
        raise CorruptedStateError("non-finite log weight")
    shifted = logw - logw.max()
    w = np.exp(shifted)
    p = w / w.sum()
    if not np.all(np.isfinite(p)):
        raise CorruptedStateError("weight normalization produced non-finite values")
    return p


def weight_update(system: ParticleSystem, increments: np.ndarray):
    """Add per-particle log-likelihood increments to the log weights."""
    increments = np.asarray(increments, dtype=float)
    if increments.shape != (system.M,):
        raise DimensionError(
            f"increment vector has shape {increments.shape}, expected ({system.M},)"
        )
    if not np.all(np.isfinite(increments)):
        raise CorruptedStateError("non-finite log-likelihood increment")
    system.logw = system.logw + increments


def maybe_resample(system: ParticleSystem, tau: float, stream: RandomStream) -> bool:
    """Systematically resample the columns when p'p > tau; resets the log
    weights to log(1/M) after a resample.  Returns whether it fired."""
    p = normalize_weights(system.logw)
    fired = should_resample(p, tau)
    if fired:
        system.theta = systematic_resample(system.theta, p, stream.uniform())
        system.logw = np.full(system.M, -np.log(system.M))
        system.resample_count += 1
    system.last_resampled = fired
    system.diagnostics["ptp"] = float(p @ p)
    return fired


def parameter_distribution(system: ParticleSystem, name: str) -> discrete.DiscreteDistribution:
    """Weighted particle values of one parameter as a discrete distribution."""
    p = normalize_weights(system.logw)
    return discrete.DiscreteDistribution(
        atoms=system.theta[system.row_index(name), :], probs=p
    )


def posterior_summary(
    system: ParticleSystem, level: float = 0.95, names: list[str] | None = None
) -> dict[str, dict[str, float]]:
    """Per-parameter mean and equal-tailed credible interval."""
    p = normalize_weights(system.logw)
    out: dict[str, dict[str, float]] = {}
    for name in names if names is not None else system.names:
        dist = discrete.DiscreteDistribution(
            atoms=system.theta[system.row_index(name), :], probs=p
        )
        lo, hi = discrete.credible_interval(dist, level)
        out[name] = {"mean": discrete.mean(dist), "lo": lo, "hi": hi}
    return out


def snapshot(system: ParticleSystem, level: float = 0.95) -> dict:
    """JSON-ready state summary emitted after an ingest cycle."""
    p = normalize_weights(system.logw)
    entry = {
        "n": system.n_seen,
        "ptp": float(p @ p),
        "resampled": system.last_resampled,
        "resample_count": system.resample_count,
        "params": posterior_summary(system, level),
    }
    if system.last_accept_rate is not None:
        entry["accept_rate"] = system.last_accept_rate
    return entry
