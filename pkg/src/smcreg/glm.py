"""Weight increments and random-walk move steps for generalized responses.

Logistic and Poisson responses have no conjugate coefficient draw, so the
move step is a joint random-walk Metropolis-Hastings update of the whole
coefficient vector, evaluated against the full data buffer.  The proposal
scale upsilon is adapted on the log scale toward a target acceptance rate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .design import BlockLayout
from .errors import CorruptedStateError, DimensionError
from .family import ExponentialFamily, check_support
from .hyper import Hyperparameters
from .rng import RandomStream


UPSILON_MIN = 1e-6
UPSILON_MAX = 1e6


@dataclass(frozen=True)
class GlmLayout:
    """Row layout of the generalized-response particle matrix.

    Rows: P coefficients, then per random-effect block r the pair
    (sigma2_u_r, a_u_r).  Total d = P + 2R.
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
        return self.P + 2 * self.R

    @property
    def coef(self) -> slice:
        return slice(0, self.P)

    def i_sigma2_u(self, r: int) -> int:
        return self.P + 2 * r

    def i_a_u(self, r: int) -> int:
        return self.P + 1 + 2 * r

    def coef_block(self, r: int) -> slice:
        return self.blocks.block_slice(r)

    def row_names(self, coef_names: list[str] | None = None) -> list[str]:
        if coef_names is None:
            coef_names = [f"theta_{i}" for i in range(self.P)]
        if len(coef_names) != self.P:
            raise DimensionError("coefficient name count does not match layout")
        names = list(coef_names)
        for r in range(self.R):
            names += [f"sigma2_u_{r + 1}", f"a_u_{r + 1}"]
        return names


class DataBuffer:
    """Append-only store of (y, design row) pairs for non-conjugate models."""

    def __init__(self, p_dim: int):
        if p_dim < 1:
            raise DimensionError(f"design width must be >= 1, got {p_dim}")
        self._p = p_dim
        self._y: list[float] = []
        self._rows: list[np.ndarray] = []

    @property
    def n(self) -> int:
        return len(self._y)

    @property
    def p_dim(self) -> int:
        return self._p

    def append(self, y_new: float, c_new: np.ndarray):
        c_new = np.asarray(c_new, dtype=float)
        if c_new.shape != (self._p,):
            raise DimensionError(
                f"design row has shape {c_new.shape}, expected ({self._p},)"
            )
        self._y.append(float(y_new))
        self._rows.append(c_new)
        return self

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(y, C) with C of shape n x P; both empty-but-shaped when n = 0."""
        if not self._y:
            return np.zeros(0), np.zeros((0, self._p))
        return np.asarray(self._y), np.stack(self._rows)

    def to_dict(self) -> dict:
        y, c = self.arrays()
        return {"p_dim": self._p, "y": y.tolist(), "rows": c.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "DataBuffer":
        out = cls(int(data["p_dim"]))
        for y_i, row in zip(data["y"], data["rows"]):
            out.append(y_i, np.asarray(row, dtype=float))
        return out


@dataclass
class MhConfig:
    """Random-walk proposal scale and its stochastic-approximation tuning."""

    upsilon: float = 1.0
    target_accept: float = 0.23
    adapt: bool = True
    adapt_rate: float = 0.05


def adapt_upsilon(config: MhConfig, accept_rate: float) -> float:
    """Move log(upsilon) toward the target acceptance rate; returns the new
    scale (clamped to [1e-6, 1e6]) and stores it on the config."""
    log_u = np.log(config.upsilon) + config.adapt_rate * (
        accept_rate - config.target_accept
    )
    config.upsilon = float(np.clip(np.exp(log_u), UPSILON_MIN, UPSILON_MAX))
    return config.upsilon


def glm_loglik_increment(
    layout: GlmLayout,
    family: ExponentialFamily,
    theta: np.ndarray,
    y_new: float,
    c_new: np.ndarray,
) -> np.ndarray:
    """Per-particle log-likelihood contribution y*eta - b(eta)."""
    check_support(family, y_new)
    c_new = np.asarray(c_new, dtype=float)
    if c_new.shape != (layout.P,):
        raise DimensionError(
            f"design row has shape {c_new.shape}, expected ({layout.P},)"
        )
    eta = theta[layout.coef, :].T @ c_new
    return float(y_new) * eta - family.b(eta)


def mh_log_ratio(
    family: ExponentialFamily,
    y: np.ndarray,
    eta_cur: np.ndarray,
    eta_prop: np.ndarray,
    beta_cur: np.ndarray,
    beta_prop: np.ndarray,
    hyper: Hyperparameters,
) -> np.ndarray:
    """Log acceptance ratio of the coefficient random walk, columnwise.

    eta_* are n x M linear predictors; beta_* are p x M fixed-effect blocks.
    lambda = y'(eta_prop - eta_cur) - 1'{b(eta_prop) - b(eta_cur)}
             - (1/2) beta_prop' S beta_prop + (1/2) beta_cur' S beta_cur
             + (beta_prop - beta_cur)' S mu_beta,   S = Sigma_beta^{-1}.
    """
    sinv, smu = hyper.prior_precision_terms()
    lam = y @ (eta_prop - eta_cur)
    lam -= np.sum(family.b(eta_prop) - family.b(eta_cur), axis=0)
    # combine the two quadratic forms so the whole expression is exactly
    # antisymmetric under swapping (cur, prop)
    q_cur = np.einsum("pm,pq,qm->m", beta_cur, sinv, beta_cur)
    q_prop = np.einsum("pm,pq,qm->m", beta_prop, sinv, beta_prop)
    lam += 0.5 * q_cur - 0.5 * q_prop
    lam += smu @ (beta_prop - beta_cur)
    return lam


def mh_move(
    layout: GlmLayout,
    family: ExponentialFamily,
    theta: np.ndarray,
    buffer: DataBuffer,
    hyper: Hyperparameters,
    config: MhConfig,
    stream: RandomStream,
    strict_variance_on_accept: bool = False,
) -> tuple[np.ndarray, float]:
    """One random-walk MH sweep of every particle column; returns the updated
    matrix and the acceptance fraction.

    Each column proposes coefficients + upsilon * z / sqrt(n) jointly and
    accepts when the log ratio exceeds log(uniform).  Models with random
    effects add per-block ridge-penalty terms to the log ratio and then
    redraw each block's (a_u, sigma2_u) pair from its full conditional —
    unconditionally by default, or only inside accepted columns when
    strict_variance_on_accept is set.
    """
    theta = np.asarray(theta, dtype=float)
    d, M = theta.shape
    if d != layout.d:
        raise DimensionError(f"particle matrix has {d} rows, layout expects {layout.d}")
    P = layout.P
    p = layout.blocks.p
    y, c = buffer.arrays()
    n_scale = np.sqrt(max(buffer.n, 1))

    coeffs = theta[layout.coef, :]
    z = stream.std_normal((P, M))
    proposal = coeffs + config.upsilon * z / n_scale

    eta_cur = c @ coeffs
    eta_prop = c @ proposal
    lam = mh_log_ratio(
        family, y, eta_cur, eta_prop, coeffs[:p, :], proposal[:p, :], hyper
    )
    for r in range(layout.R):
        s2u = theta[layout.i_sigma2_u(r), :]
        if np.any(s2u <= 0):
            raise CorruptedStateError("nonpositive block variance in particle matrix")
        sl = layout.coef_block(r)
        ssq_cur = np.sum(coeffs[sl, :] ** 2, axis=0)
        ssq_prop = np.sum(proposal[sl, :] ** 2, axis=0)
        lam += 0.5 * (ssq_cur - ssq_prop) / s2u
    if not np.all(np.isfinite(lam)):
        raise CorruptedStateError("non-finite MH log ratio")

    u = stream.uniform(M)
    accepted = lam > np.log(u)
    theta[layout.coef, :] = np.where(accepted[None, :], proposal, coeffs)

    for r in range(layout.R):
        k_r = layout.blocks.blocks[r]
        s2u = theta[layout.i_sigma2_u(r), :]
        a_u = stream.inverse_gamma_vec(np.ones(M), 1.0 / s2u + 1.0 / hyper.s_u[r] ** 2)
        block = theta[layout.coef_block(r), :]
        ssq = np.sum(block * block, axis=0)
        s2u_new = stream.inverse_gamma_vec(
            np.full(M, 0.5 * (k_r + 1)), 1.0 / a_u + 0.5 * ssq
        )
        if strict_variance_on_accept:
            theta[layout.i_a_u(r), :] = np.where(
                accepted, a_u, theta[layout.i_a_u(r), :]
            )
            theta[layout.i_sigma2_u(r), :] = np.where(accepted, s2u_new, s2u)
        else:
            theta[layout.i_a_u(r), :] = a_u
            theta[layout.i_sigma2_u(r), :] = s2u_new

    return theta, float(np.mean(accepted))
