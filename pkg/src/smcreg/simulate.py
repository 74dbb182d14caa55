"""Synthetic data scenarios for exercising the engines end to end.

Each scenario returns (records, truth): records are plain dicts ready for
CSV serialization or direct ingestion, truth holds the generating
parameters so downstream checks can score recovery.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .rng import RandomStream


def _expit(x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def smooth_logit(x):
    """Smooth mean function used by the binary nonparametric scenario."""
    x = np.asarray(x, dtype=float)
    return 3.0 * np.sin(2.0 * np.pi * x) + 0.5


def simulate_gaussian_lm(n: int, stream: RandomStream, beta=(2.0, -1.5), sigma=0.35):
    x = stream.uniform(n)
    eta = beta[0] + beta[1] * x
    y = eta + sigma * stream.std_normal_vec(n)
    records = [{"y": float(y[i]), "x": float(x[i])} for i in range(n)]
    truth = {"beta": list(beta), "sigma": sigma}
    return records, truth


def simulate_logistic_lm(n: int, stream: RandomStream, beta=(-7.5, 9.36)):
    x = stream.uniform(n)
    probs = _expit(beta[0] + beta[1] * x)
    y = stream.binomial(1, probs)
    records = [{"y": int(y[i]), "x": float(x[i])} for i in range(n)]
    truth = {"beta": list(beta)}
    return records, truth


def simulate_binary_npr(n: int, stream: RandomStream):
    """Binary response with a smooth nonlinear success-probability curve."""
    x = stream.uniform(n)
    probs = _expit(smooth_logit(x))
    y = stream.binomial(1, probs)
    records = [{"y": int(y[i]), "x": float(x[i])} for i in range(n)]
    truth = {"mean_function": "3*sin(2*pi*x) + 0.5"}
    return records, truth


def simulate_gaussian_lmm(
    n: int,
    stream: RandomStream,
    beta=(2.0, -1.5),
    sigma=0.35,
    n_groups: int = 20,
    sigma_u: float = 0.5,
):
    x = stream.uniform(n)
    groups = stream.integers(0, n_groups, size=n)
    intercepts = sigma_u * stream.std_normal_vec(n_groups)
    eta = beta[0] + beta[1] * x + intercepts[groups]
    y = eta + sigma * stream.std_normal_vec(n)
    records = [
        {"y": float(y[i]), "x": float(x[i]), "g": int(groups[i])} for i in range(n)
    ]
    truth = {
        "beta": list(beta),
        "sigma": sigma,
        "sigma_u": sigma_u,
        "intercepts": intercepts.tolist(),
    }
    return records, truth


def simulate_poisson_lm(n: int, stream: RandomStream, beta=(0.5, 1.0)):
    x = stream.uniform(n)
    lam = np.exp(beta[0] + beta[1] * x)
    y = stream.poisson(lam)
    records = [{"y": int(y[i]), "x": float(x[i])} for i in range(n)]
    truth = {"beta": list(beta)}
    return records, truth


SCENARIOS = {
    "gaussian-lm": simulate_gaussian_lm,
    "logistic-lm": simulate_logistic_lm,
    "binary-npr": simulate_binary_npr,
    "gaussian-lmm": simulate_gaussian_lmm,
    "poisson-lm": simulate_poisson_lm,
}


def simulate(scenario: str, n: int, stream: RandomStream, **kwargs):
    try:
        fn = SCENARIOS[scenario]
    except KeyError:
        raise ConfigError(
            f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}"
        ) from None
    if n < 1:
        raise ConfigError(f"scenario size must be >= 1, got {n}")
    return fn(n, stream, **kwargs)
