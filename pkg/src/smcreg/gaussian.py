"""Weight increments and Gibbs move steps for Gaussian-response models.

Covers the linear model (no random-effect blocks) and the linear mixed model
(ridge-penalized blocks).  The move step reads only the streaming sufficient
statistics, the particle matrix and the hyperparameters: no raw observation
enters, which is what makes these engines purely online.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import BlockLayout
from .errors import CorruptedStateError, DimensionError
from .hyper import Hyperparameters
from .linalg import spectral_decompose_batch
from .rng import RandomStream
from .suffstats import SufficientStats


@dataclass(frozen=True)
class GaussianLayout:
    """Row layout of the Gaussian particle matrix.

    Rows: P coefficients, then sigma2_eps, a_eps, then per random-effect
    block r the pair (sigma2_u_r, a_u_r).  Total d = P + 2 + 2R.
    """

    blocks: BlockLayout

    @property
    def P(self) -> int:
        return self.blocks.P

    @property
    def R(self) -> int:
        return self.blocks.R

    @property
    def d(self) -> int:
        return self.P + 2 + 2 * self.R

    @property
    def coef(self) -> slice:
        return slice(0, self.P)

    @property
    def i_sigma2_eps(self) -> int:
        return self.P

    @property
    def i_a_eps(self) -> int:
        return self.P + 1

    def i_sigma2_u(self, r: int) -> int:
        return self.P + 2 + 2 * r

    def i_a_u(self, r: int) -> int:
        return self.P + 3 + 2 * r

    def coef_block(self, r: int) -> slice:
        return self.blocks.block_slice(r)

    def row_names(self, coef_names: list[str] | None = None) -> list[str]:
        if coef_names is None:
            coef_names = [f"theta_{i}" for i in range(self.P)]
        if len(coef_names) != self.P:
            raise DimensionError("coefficient name count does not match layout")
        names = list(coef_names) + ["sigma2_eps", "a_eps"]
        for r in range(self.R):
            names += [f"sigma2_u_{r + 1}", f"a_u_{r + 1}"]
        return names


def prior_precision(layout: GaussianLayout, hyper: Hyperparameters) -> np.ndarray:
    """Fixed part of the coefficient prior precision: Sigma_beta^{-1} padded
    with zeros on the random-effect diagonal (filled per particle later)."""
    P = layout.P
    p = layout.blocks.p
    if hyper.p != p:
        raise DimensionError(
            f"prior mean length {hyper.p} does not match fixed-effect count {p}"
        )
    out = np.zeros((P, P))
    out[:p, :p] = hyper.sigma_beta_inv()
    return out


def prior_mean_term(layout: GaussianLayout, hyper: Hyperparameters) -> np.ndarray:
    """Sigma_beta^{-1} mu_beta padded with zeros for the random-effect rows."""
    inv, term = hyper.prior_precision_terms()
    out = np.zeros(layout.P)
    out[: layout.blocks.p] = term
    return out


def gaussian_loglik_increment(
    layout: GaussianLayout, theta: np.ndarray, y_new: float, c_new: np.ndarray
) -> np.ndarray:
    """Per-particle Gaussian log-likelihood of y_new up to a shared constant:
    (y*eta - eta^2/2 - y^2/2)/sigma2 - log(sigma2)/2.

    The y^2/(2 sigma2) term is kept even though it is often dropped as
    "constant": sigma2 differs per particle, so dropping it would tilt the
    weights and break exact proportionality to the normal density.
    """
    coeffs = theta[layout.coef, :]
    sigma2 = theta[layout.i_sigma2_eps, :]
    if np.any(sigma2 <= 0):
        raise CorruptedStateError("nonpositive error variance in particle matrix")
    c_new = np.asarray(c_new, dtype=float)
    if c_new.shape != (layout.P,):
        raise DimensionError(
            f"design row has shape {c_new.shape}, expected ({layout.P},)"
        )
    y_new = float(y_new)
    eta = coeffs.T @ c_new
    return (y_new * eta - 0.5 * eta * eta - 0.5 * y_new * y_new) / sigma2 - 0.5 * np.log(
        sigma2
    )


def gaussian_move(
    layout: GaussianLayout,
    theta: np.ndarray,
    stats: SufficientStats,
    hyper: Hyperparameters,
    stream: RandomStream,
) -> np.ndarray:
    """One Gibbs sweep of every particle column from the current full
    conditionals, driven only by the sufficient statistics.

    Per column m: coefficients ~ N(Omega^{-1} omega, Omega^{-1}) via the
    spectral draw with Omega = C'C/sigma2_m + prior precision; then the
    (a_eps, sigma2_eps) pair; then per block the (a_u, sigma2_u) pair.
    """
    theta = np.asarray(theta, dtype=float)
    d, M = theta.shape
    if d != layout.d:
        raise DimensionError(f"particle matrix has {d} rows, layout expects {layout.d}")
    P = layout.P
    sigma2 = theta[layout.i_sigma2_eps, :].copy()
    if np.any(sigma2 <= 0):
        raise CorruptedStateError("nonpositive error variance in particle matrix")

    base_prec = prior_precision(layout, hyper)
    omega_prior = prior_mean_term(layout, hyper)

    # Omega_m = C'C / sigma2_m + blockdiag(Sigma_beta^{-1}, I/sigma2_u_rm)
    omegas = stats.ctc[None, :, :] / sigma2[:, None, None] + base_prec[None, :, :]
    for r in range(layout.R):
        s2u = theta[layout.i_sigma2_u(r), :]
        if np.any(s2u <= 0):
            raise CorruptedStateError("nonpositive block variance in particle matrix")
        sl = layout.coef_block(r)
        idx = np.arange(sl.start, sl.stop)
        omegas[:, idx, idx] += 1.0 / s2u[:, None]

    vectors, values = spectral_decompose_batch(omegas, role="coefficient precision")

    # omega_m = C'y / sigma2_m + Sigma_beta^{-1} mu_beta (padded)
    om = stats.cty[None, :] / sigma2[:, None] + omega_prior[None, :]
    z = stream.std_normal((M, P))
    utz = np.einsum("mpq,mp->mq", vectors, z)
    uto = np.einsum("mpq,mp->mq", vectors, om)
    coeffs = np.einsum("mpq,mq->mp", vectors, utz / np.sqrt(values) + uto / values)
    theta[layout.coef, :] = coeffs.T

    # a_eps | sigma2_eps, then sigma2_eps | a_eps and the residual quadratic
    a_eps = stream.inverse_gamma_vec(
        np.ones(M), 1.0 / sigma2 + 1.0 / hyper.s_eps**2
    )
    rss = stats.residual_ss_columns(theta[layout.coef, :])
    rss = np.maximum(rss, 0.0)  # guard tiny negative values from cancellation
    sigma2_new = stream.inverse_gamma_vec(
        np.full(M, 0.5 * (stats.n + 1)), 1.0 / a_eps + 0.5 * rss
    )
    theta[layout.i_a_eps, :] = a_eps
    theta[layout.i_sigma2_eps, :] = sigma2_new

    for r in range(layout.R):
        k_r = layout.blocks.blocks[r]
        s2u = theta[layout.i_sigma2_u(r), :]
        a_u = stream.inverse_gamma_vec(
            np.ones(M), 1.0 / s2u + 1.0 / hyper.s_u[r] ** 2
        )
        block = theta[layout.coef_block(r), :]
        ssq = np.sum(block * block, axis=0)
        s2u_new = stream.inverse_gamma_vec(
            np.full(M, 0.5 * (k_r + 1)), 1.0 / a_u + 0.5 * ssq
        )
        theta[layout.i_a_u(r), :] = a_u
        theta[layout.i_sigma2_u(r), :] = s2u_new

    return theta
