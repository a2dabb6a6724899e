"""Canonical-link exponential families: cumulant b and its derivatives.

Only families whose natural parameter space is the whole real line are
supported, which in practice means logistic (Bernoulli) and Poisson
regression.  b'' > 0 everywhere, so submodel log-likelihoods are concave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import expit

LOGISTIC_CODE = 0
POISSON_CODE = 1


def softplus(theta):
    """log(1 + e^theta), evaluated as max(theta,0) + log1p(e^-|theta|).

    Stable for |theta| up to the float64 range; never overflows.
    """
    theta = np.asarray(theta, dtype=np.float64)
    return np.maximum(theta, 0.0) + np.log1p(np.exp(-np.abs(theta)))


def _logistic_var(theta):
    mu = expit(theta)
    return mu * (1.0 - mu)


def _exp(theta):
    return np.exp(np.asarray(theta, dtype=np.float64))


@dataclass(frozen=True)
class Family:
    """Natural-parameter functions of one exponential family.

    b is the cumulant (log-normalizer), b' the mean function, b'' the
    variance function.  ``code`` is the integer tag used by the numeric
    kernels.
    """

    kind: str
    code: int
    b: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    bprime: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    bpprime: Callable[[np.ndarray], np.ndarray] = field(repr=False)


LOGISTIC = Family("logistic", LOGISTIC_CODE, softplus, expit, _logistic_var)
POISSON = Family("poisson", POISSON_CODE, _exp, _exp, _exp)

_FAMILIES = {f.kind: f for f in (LOGISTIC, POISSON)}


def get_family(kind: str) -> Family:
    try:
        return _FAMILIES[kind]
    except KeyError:
        raise ValueError(
            f"unknown family {kind!r}; choose from {sorted(_FAMILIES)}"
        ) from None
