"""One-parameter exponential-family response definitions.

The response law is exp{y*eta - b(eta) + c(y)} h(y).  Only b and the support
indicator h matter for the algorithms: the c(y) term is constant across
particles and cancels in the weight normalization, so it is omitted from the
per-particle log-likelihood increments.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma
from typing import Callable

import numpy as np

from .errors import SupportError


@dataclass(frozen=True)
class ExponentialFamily:
    name: str
    b: Callable[[np.ndarray], np.ndarray]
    c: Callable[[float], float]
    h: Callable[[float], bool]


def _b_logistic(eta):
    # log(1 + e^eta), overflow-safe
    eta = np.asarray(eta, dtype=float)
    return np.maximum(eta, 0.0) + np.log1p(np.exp(-np.abs(eta)))


def _b_poisson(eta):
    return np.exp(np.asarray(eta, dtype=float))


def _is_binary(y) -> bool:
    return float(y) in (0.0, 1.0)


def _is_count(y) -> bool:
    y = float(y)
    return y >= 0.0 and y == int(y)


LOGISTIC = ExponentialFamily(
    name="logistic",
    b=_b_logistic,
    c=lambda y: 0.0,
    h=_is_binary,
)

POISSON = ExponentialFamily(
    name="poisson",
    b=_b_poisson,
    c=lambda y: -lgamma(float(y) + 1.0),
    h=_is_count,
)

FAMILIES = {"logistic": LOGISTIC, "poisson": POISSON}


def get_family(name: str) -> ExponentialFamily:
    try:
        return FAMILIES[name]
    except KeyError:
        raise SupportError(f"unknown response family: {name!r}") from None


def b_eval(family: ExponentialFamily, eta: np.ndarray) -> np.ndarray:
    return family.b(eta)


def check_support(family: ExponentialFamily, y_new: float):
    if not family.h(y_new):
        raise SupportError(
            f"response {y_new!r} is outside the support of the {family.name} family"
        )


def loglik_increment(
    family: ExponentialFamily, y_new: float, eta: np.ndarray
) -> np.ndarray:
    """Per-particle log-likelihood contribution y*eta - b(eta).

    The c(y) term is dropped: it is shared by every particle and leaves the
    normalized probability vector unchanged.
    """
    check_support(family, y_new)
    eta = np.asarray(eta, dtype=float)
    return float(y_new) * eta - family.b(eta)
