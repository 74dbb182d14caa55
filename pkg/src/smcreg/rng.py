"""Seedable random streams and the distribution samplers the algorithms use.

A ``RandomStream`` wraps a PCG64 generator seeded through a SeedSequence, so
independent substreams can be derived deterministically by index without
consuming draws from the parent.  Every sampler is deterministic given
(seed, call order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, SmcregError
from .linalg import SpectralDecomposition


@dataclass(frozen=True)
class InverseGammaParams:
    """Shape/rate parameters of an Inverse-Gamma distribution.

    Density is rate^shape / Gamma(shape) * x^(-shape-1) * exp(-rate/x) on x > 0;
    equivalently 1/x ~ Gamma(shape, rate).
    """

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0 and self.rate > 0):
            raise SmcregError(
                f"Inverse-Gamma parameters must be positive, got "
                f"shape={self.shape}, rate={self.rate}"
            )


class RandomStream:
    """Single-owner random stream; derive substreams before any fan-out."""

    def __init__(self, seed: int, _seq: np.random.SeedSequence | None = None):
        self.seed = int(seed)
        self._seq = _seq if _seq is not None else np.random.SeedSequence(self.seed)
        self._gen = np.random.Generator(np.random.PCG64(self._seq))

    def substream(self, index: int) -> "RandomStream":
        """Derive an independent stream by index; does not consume draws."""
        child = np.random.SeedSequence(
            entropy=self._seq.entropy, spawn_key=self._seq.spawn_key + (int(index),)
        )
        return RandomStream(self.seed, _seq=child)

    # -- state (for checkpoint/resume) ------------------------------------

    def get_state(self) -> dict:
        return {
            "seed": self.seed,
            "spawn_key": list(self._seq.spawn_key),
            "bit_generator": self._gen.bit_generator.state,
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomStream":
        seq = np.random.SeedSequence(
            entropy=int(state["seed"]), spawn_key=tuple(state["spawn_key"])
        )
        stream = cls(int(state["seed"]), _seq=seq)
        stream._gen.bit_generator.state = state["bit_generator"]
        return stream

    # -- samplers ----------------------------------------------------------

    def uniform(self, size=None):
        """Uniform(0,1) draws, strictly inside the open interval."""
        u = self._gen.random(size)
        # random() can return exactly 0.0; nudge into the open interval
        if size is None:
            return float(u) if u > 0.0 else float(np.nextafter(0.0, 1.0))
        u = np.asarray(u)
        u[u == 0.0] = np.nextafter(0.0, 1.0)
        return u

    def std_normal_vec(self, n: int) -> np.ndarray:
        if n < 1:
            raise SmcregError("length must be >= 1")
        return self._gen.standard_normal(n)

    def std_normal(self, shape) -> np.ndarray:
        return self._gen.standard_normal(shape)

    def inverse_gamma(self, params: InverseGammaParams, size=None):
        """Inverse-Gamma(shape, rate) draw(s); 1/x ~ Gamma(shape, rate)."""
        g = self._gen.gamma(params.shape, 1.0 / params.rate, size=size)
        return 1.0 / g

    def inverse_gamma_scalar(self, shape: float, rate: float) -> float:
        """Single Inverse-Gamma(shape, rate) draw."""
        return float(self.inverse_gamma(InverseGammaParams(shape, rate)))

    def inverse_gamma_vec(self, shape, rate) -> np.ndarray:
        """Vectorized Inverse-Gamma with elementwise shape and/or rate."""
        shape = np.asarray(shape, dtype=float)
        rate = np.asarray(rate, dtype=float)
        if np.any(shape <= 0) or np.any(rate <= 0):
            raise SmcregError("Inverse-Gamma parameters must be positive")
        g = self._gen.gamma(shape, 1.0 / rate)
        return 1.0 / g

    def half_cauchy(self, scale: float, size=None):
        """Half-Cauchy(scale) via the exact inverse CDF: scale * tan(pi u / 2)."""
        if scale <= 0:
            raise SmcregError(f"Half-Cauchy scale must be positive, got {scale}")
        u = self._gen.random(size)
        return scale * np.tan(0.5 * np.pi * u)

    def integers(self, low, high=None, size=None):
        return self._gen.integers(low, high, size=size)

    def poisson(self, lam, size=None):
        return self._gen.poisson(lam, size=size)

    def binomial(self, n, p, size=None):
        return self._gen.binomial(n, p, size=size)

    def mvn_spectral(self, decomp: SpectralDecomposition, omega: np.ndarray) -> np.ndarray:
        """Draw from N(Omega^{-1} omega, Omega^{-1}) given Omega's spectral factors."""
        if np.any(decomp.values <= 0):
            raise ConditioningError("precision matrix has a nonpositive eigenvalue")
        omega = np.asarray(omega, dtype=float)
        z = self.std_normal_vec(decomp.order)
        u = decomp.vectors
        d = decomp.values
        return u @ (u.T @ z / np.sqrt(d) + u.T @ omega / d)
