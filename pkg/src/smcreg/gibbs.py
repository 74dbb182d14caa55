"""Batch MCMC samplers: Gibbs for Gaussian models, MH-within-Gibbs otherwise.

These chains serve two purposes: seeding the particle system from the warm-up
rows, and acting as an independent full-data reference for validating the
online engines.  They are deliberately written as plain single-chain loops,
separate from the vectorized per-particle move steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .design import BlockLayout
from .errors import DimensionError
from .family import ExponentialFamily
from .glm import MhConfig, adapt_upsilon
from .hyper import Hyperparameters
from .linalg import spectral_decompose
from .rng import RandomStream


@dataclass(frozen=True)
class ChainOutput:
    """Kept draws of a batch chain, one row per draw.

    Columns follow the row order of the matching particle layout, so a seed
    for the online engine is simply draws[:M].T.
    """

    names: tuple[str, ...]
    draws: np.ndarray
    n_warm: int
    accept_rate: float | None = None
    upsilon: float | None = None
    extras: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        try:
            j = self.names.index(name)
        except ValueError:
            raise DimensionError(f"chain has no parameter named {name!r}") from None
        return self.draws[:, j]

    @property
    def n_kept(self) -> int:
        return self.draws.shape[0]


def _check_batch(y: np.ndarray, c: np.ndarray, P: int):
    y = np.asarray(y, dtype=float)
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[1] != P or y.shape != (c.shape[0],):
        raise DimensionError(
            f"batch shapes y {y.shape}, C {c.shape} do not match design width {P}"
        )
    return y, c


def gibbs_lmm(
    y: np.ndarray,
    c: np.ndarray,
    blocks: BlockLayout,
    hyper: Hyperparameters,
    n_warm: int,
    n_kept: int,
    stream: RandomStream,
    coef_names: list[str] | None = None,
    sigma2_fixed: float | None = None,
) -> ChainOutput:
    """Gibbs sampler for the Gaussian linear mixed model.

    Sweep order per iteration: coefficients (spectral multivariate-normal
    draw), auxiliary a_eps, error variance sigma2_eps, then per block the
    (a_u, sigma2_u) pair.  With sigma2_fixed the error-variance pair is held
    at the given value, which makes the coefficient draw exactly conjugate.
    """
    P = blocks.P
    p = blocks.p
    R = blocks.R
    y, c = _check_batch(y, c, P)
    n = y.shape[0]
    if hyper.p != p:
        raise DimensionError(
            f"prior mean length {hyper.p} does not match fixed-effect count {p}"
        )
    if len(hyper.s_u) != R:
        raise DimensionError(
            f"{len(hyper.s_u)} block scales supplied for {R} random-effect blocks"
        )

    ctc = c.T @ c
    cty = c.T @ y
    sinv, smu = hyper.prior_precision_terms()
    base_prec = np.zeros((P, P))
    base_prec[:p, :p] = sinv
    omega_prior = np.zeros(P)
    omega_prior[:p] = smu

    theta = np.zeros(P)
    theta[:p] = hyper.mu_beta
    sigma2 = hyper.s_eps**2 if sigma2_fixed is None else float(sigma2_fixed)
    a_eps = hyper.s_eps
    s2u = np.asarray([s**2 for s in hyper.s_u])
    a_u = np.asarray(list(hyper.s_u))

    d = P + 2 + 2 * R
    draws = np.empty((n_kept, d))
    for g in range(n_warm + n_kept):
        prec = ctc / sigma2 + base_prec
        for r in range(R):
            sl = blocks.block_slice(r)
            idx = np.arange(sl.start, sl.stop)
            prec[idx, idx] += 1.0 / s2u[r]
        decomp = spectral_decompose(prec, role="coefficient precision")
        theta = stream.mvn_spectral(decomp, cty / sigma2 + omega_prior)

        if sigma2_fixed is None:
            a_eps = stream.inverse_gamma_scalar(1.0, 1.0 / sigma2 + 1.0 / hyper.s_eps**2)
            resid = y - c @ theta
            sigma2 = stream.inverse_gamma_scalar(
                0.5 * (n + 1), 1.0 / a_eps + 0.5 * float(resid @ resid)
            )

        for r in range(R):
            a_u[r] = stream.inverse_gamma_scalar(
                1.0, 1.0 / s2u[r] + 1.0 / hyper.s_u[r] ** 2
            )
            block = theta[blocks.block_slice(r)]
            s2u[r] = stream.inverse_gamma_scalar(
                0.5 * (blocks.blocks[r] + 1), 1.0 / a_u[r] + 0.5 * float(block @ block)
            )

        k = g - n_warm
        if k >= 0:
            draws[k, :P] = theta
            draws[k, P] = sigma2
            draws[k, P + 1] = a_eps
            for r in range(R):
                draws[k, P + 2 + 2 * r] = s2u[r]
                draws[k, P + 3 + 2 * r] = a_u[r]

    if coef_names is None:
        coef_names = [f"theta_{i}" for i in range(P)]
    names = list(coef_names) + ["sigma2_eps", "a_eps"]
    for r in range(R):
        names += [f"sigma2_u_{r + 1}", f"a_u_{r + 1}"]
    return ChainOutput(names=tuple(names), draws=draws, n_warm=n_warm)


def gibbs_lm(
    y: np.ndarray,
    c: np.ndarray,
    hyper: Hyperparameters,
    n_warm: int,
    n_kept: int,
    stream: RandomStream,
    coef_names: list[str] | None = None,
    sigma2_fixed: float | None = None,
) -> ChainOutput:
    """Gibbs sampler for the Gaussian linear model (no random-effect blocks)."""
    blocks = BlockLayout(p=np.asarray(c).shape[1], blocks=())
    return gibbs_lmm(
        y, c, blocks, hyper, n_warm, n_kept, stream,
        coef_names=coef_names, sigma2_fixed=sigma2_fixed,
    )


def mh_gibbs_glmm(
    y: np.ndarray,
    c: np.ndarray,
    blocks: BlockLayout,
    family: ExponentialFamily,
    hyper: Hyperparameters,
    config: MhConfig,
    n_warm: int,
    n_kept: int,
    stream: RandomStream,
    coef_names: list[str] | None = None,
    strict_variance_on_accept: bool = False,
) -> ChainOutput:
    """MH-within-Gibbs sampler for logistic/Poisson (mixed) models.

    Coefficients move by a joint random walk with scale upsilon/sqrt(n);
    block variances are redrawn from their conjugate full conditionals.
    During warm-up the proposal scale adapts toward the target acceptance
    rate; kept iterations run at the frozen scale and report their observed
    acceptance fraction and the tuned upsilon.
    """
    P = blocks.P
    p = blocks.p
    R = blocks.R
    y, c = _check_batch(y, c, P)
    n = y.shape[0]
    if len(hyper.s_u) != R:
        raise DimensionError(
            f"{len(hyper.s_u)} block scales supplied for {R} random-effect blocks"
        )
    sinv, smu = hyper.prior_precision_terms()

    theta = np.zeros(P)
    theta[:p] = hyper.mu_beta
    s2u = np.asarray([s**2 for s in hyper.s_u])
    a_u = np.asarray(list(hyper.s_u))
    eta = c @ theta
    n_scale = np.sqrt(max(n, 1))

    d = P + 2 * R
    draws = np.empty((n_kept, d))
    kept_accepts = 0
    for g in range(n_warm + n_kept):
        z = stream.std_normal_vec(P)
        prop = theta + config.upsilon * z / n_scale
        eta_prop = c @ prop
        beta, beta_prop = theta[:p], prop[:p]
        lam = float(y @ (eta_prop - eta))
        lam -= float(np.sum(family.b(eta_prop) - family.b(eta)))
        lam -= 0.5 * float(beta_prop @ sinv @ beta_prop)
        lam += 0.5 * float(beta @ sinv @ beta)
        lam += float(smu @ (beta_prop - beta))
        for r in range(R):
            sl = blocks.block_slice(r)
            lam += 0.5 * (float(theta[sl] @ theta[sl]) - float(prop[sl] @ prop[sl])) / s2u[r]

        accepted = lam > np.log(stream.uniform())
        if accepted:
            theta, eta = prop, eta_prop

        if accepted or not strict_variance_on_accept:
            for r in range(R):
                a_u[r] = stream.inverse_gamma_scalar(
                    1.0, 1.0 / s2u[r] + 1.0 / hyper.s_u[r] ** 2
                )
                block = theta[blocks.block_slice(r)]
                s2u[r] = stream.inverse_gamma_scalar(
                    0.5 * (blocks.blocks[r] + 1),
                    1.0 / a_u[r] + 0.5 * float(block @ block),
                )

        k = g - n_warm
        if k < 0:
            if config.adapt:
                adapt_upsilon(config, 1.0 if accepted else 0.0)
        else:
            kept_accepts += int(accepted)
            draws[k, :P] = theta
            for r in range(R):
                draws[k, P + 2 * r] = s2u[r]
                draws[k, P + 1 + 2 * r] = a_u[r]

    if coef_names is None:
        coef_names = [f"theta_{i}" for i in range(P)]
    names = list(coef_names)
    for r in range(R):
        names += [f"sigma2_u_{r + 1}", f"a_u_{r + 1}"]
    return ChainOutput(
        names=tuple(names),
        draws=draws,
        n_warm=n_warm,
        accept_rate=kept_accepts / max(n_kept, 1),
        upsilon=config.upsilon,
    )
