"""Model hyperparameters shared by the batch and online samplers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class Hyperparameters:
    """Prior settings: coefficient Gaussian prior and Half-Cauchy scales.

    s_eps is the Half-Cauchy scale of the error standard deviation (Gaussian
    models); s_u holds one Half-Cauchy scale per random-effect block.
    """

    mu_beta: np.ndarray
    sigma_beta: np.ndarray
    s_eps: float = 1e5
    s_u: tuple[float, ...] = ()

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu_beta, dtype=float))
        sigma = np.asarray(self.sigma_beta, dtype=float)
        if sigma.ndim == 0:
            sigma = float(sigma) * np.eye(mu.shape[0])
        elif sigma.ndim == 1:
            sigma = np.diag(sigma)
        if sigma.shape != (mu.shape[0], mu.shape[0]):
            raise ConfigError(
                f"prior covariance shape {sigma.shape} does not match "
                f"prior mean length {mu.shape[0]}"
            )
        if self.s_eps <= 0 or any(s <= 0 for s in self.s_u):
            raise ConfigError("Half-Cauchy scales must be positive")
        object.__setattr__(self, "mu_beta", mu)
        object.__setattr__(self, "sigma_beta", sigma)
        object.__setattr__(self, "s_u", tuple(float(s) for s in self.s_u))

    @property
    def p(self) -> int:
        return self.mu_beta.shape[0]

    def sigma_beta_inv(self) -> np.ndarray:
        try:
            return np.linalg.inv(self.sigma_beta)
        except np.linalg.LinAlgError as exc:
            raise ConfigError(f"prior covariance is singular: {exc}") from exc

    def prior_precision_terms(self) -> tuple[np.ndarray, np.ndarray]:
        """(Sigma_beta^{-1}, Sigma_beta^{-1} mu_beta) for the coefficient draws."""
        inv = self.sigma_beta_inv()
        return inv, inv @ self.mu_beta


def diagonal_hyper(
    p: int,
    prior_var: float = 1e10,
    mu: float = 0.0,
    s_eps: float = 1e5,
    s_u: tuple[float, ...] = (),
) -> Hyperparameters:
    """Convenience constructor for the usual noninformative diagonal prior."""
    return Hyperparameters(
        mu_beta=np.full(p, mu), sigma_beta=prior_var * np.eye(p), s_eps=s_eps, s_u=s_u
    )
