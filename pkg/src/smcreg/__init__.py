"""Streaming Bayesian semiparametric regression.

Online sequential Monte Carlo engines for Gaussian, logistic and Poisson
(mixed) regression models, seeded and verified by batch MCMC, with a CLI
and an HTTP service on top.
"""

from .config import RunConfig, load_config, parse_config
from .engine import ParticleSystem, snapshot
from .errors import SmcregError
from .hyper import Hyperparameters, diagonal_hyper
from .models import GaussianStreamModel, GlmStreamModel
from .rng import RandomStream

__version__ = "0.1.0"

__all__ = [
    "GaussianStreamModel",
    "GlmStreamModel",
    "Hyperparameters",
    "ParticleSystem",
    "RandomStream",
    "RunConfig",
    "SmcregError",
    "diagonal_hyper",
    "load_config",
    "parse_config",
    "snapshot",
    "__version__",
]
