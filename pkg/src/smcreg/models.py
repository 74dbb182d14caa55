"""Streaming model frontends: one ingest cycle per observation.

A stream model owns whatever the move step needs about past data — the
sufficient statistics for Gaussian responses, the raw data buffer for
generalized responses — and drives the shared particle-system cycle:
update state, reweight, resample on degeneracy, move every column.
"""

from __future__ import annotations

import numpy as np

from .engine import ParticleSystem, maybe_resample, uniform_system, weight_update
from .errors import DimensionError
from .family import ExponentialFamily
from .gaussian import GaussianLayout, gaussian_loglik_increment, gaussian_move
from .glm import DataBuffer, GlmLayout, MhConfig, adapt_upsilon, glm_loglik_increment, mh_move
from .hyper import Hyperparameters
from .rng import RandomStream
from .suffstats import SufficientStats, seed_from_batch


class GaussianStreamModel:
    """Online engine for Gaussian linear and linear mixed models."""

    def __init__(
        self,
        layout: GaussianLayout,
        hyper: Hyperparameters,
        coef_names: list[str] | None = None,
    ):
        self.layout = layout
        self.hyper = hyper
        self.names = tuple(layout.row_names(coef_names))
        self.stats = SufficientStats(layout.P)

    def seed_system(self, theta: np.ndarray) -> ParticleSystem:
        """Equal-weight particle system from a d x M seed matrix."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != self.layout.d:
            raise DimensionError(
                f"seed matrix has {theta.shape[0]} rows, layout expects {self.layout.d}"
            )
        return uniform_system(theta, self.names)

    def absorb_warm_data(self, y: np.ndarray, c: np.ndarray):
        """Fold the warm-up rows into the sufficient statistics."""
        warm = seed_from_batch(y, c)
        if warm.p_dim != self.stats.p_dim:
            raise DimensionError("warm-up design width does not match layout")
        self.stats = warm
        return self

    def ingest(
        self,
        system: ParticleSystem,
        y_new: float,
        c_new: np.ndarray,
        tau: float,
        stream: RandomStream,
    ) -> ParticleSystem:
        self.stats.update(y_new, c_new)
        weight_update(
            system, gaussian_loglik_increment(self.layout, system.theta, y_new, c_new)
        )
        maybe_resample(system, tau, stream)
        system.theta = gaussian_move(
            self.layout, system.theta, self.stats, self.hyper, stream
        )
        system.n_seen += 1
        return system


class GlmStreamModel:
    """Online engine for logistic/Poisson (mixed) models."""

    def __init__(
        self,
        layout: GlmLayout,
        family: ExponentialFamily,
        hyper: Hyperparameters,
        mh: MhConfig | None = None,
        coef_names: list[str] | None = None,
        strict_variance_on_accept: bool = False,
    ):
        self.layout = layout
        self.family = family
        self.hyper = hyper
        self.mh = mh if mh is not None else MhConfig()
        self.names = tuple(layout.row_names(coef_names))
        self.buffer = DataBuffer(layout.P)
        self.strict_variance_on_accept = strict_variance_on_accept

    def seed_system(self, theta: np.ndarray) -> ParticleSystem:
        theta = np.asarray(theta, dtype=float)
        if theta.shape[0] != self.layout.d:
            raise DimensionError(
                f"seed matrix has {theta.shape[0]} rows, layout expects {self.layout.d}"
            )
        return uniform_system(theta, self.names)

    def absorb_warm_data(self, y: np.ndarray, c: np.ndarray):
        y = np.asarray(y, dtype=float)
        c = np.asarray(c, dtype=float)
        for y_i, row in zip(y, c):
            self.buffer.append(float(y_i), row)
        return self

    def ingest(
        self,
        system: ParticleSystem,
        y_new: float,
        c_new: np.ndarray,
        tau: float,
        stream: RandomStream,
    ) -> ParticleSystem:
        self.buffer.append(y_new, c_new)
        weight_update(
            system,
            glm_loglik_increment(self.layout, self.family, system.theta, y_new, c_new),
        )
        maybe_resample(system, tau, stream)
        system.theta, accept = mh_move(
            self.layout,
            self.family,
            system.theta,
            self.buffer,
            self.hyper,
            self.mh,
            stream,
            strict_variance_on_accept=self.strict_variance_on_accept,
        )
        system.last_accept_rate = accept
        if self.mh.adapt:
            adapt_upsilon(self.mh, accept)
        system.n_seen += 1
        return system
