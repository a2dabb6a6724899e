"""Coefficient priors on R^J.

Only the i.i.d. centered Gaussian family is implemented; the log-Lipschitz
and bounded-ratio constants it satisfies are exposed so that alternative
families can be audited through the same interface.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng
from .data import ModelIndex, check_conforms
from .errors import ContractViolation

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class PriorSpec:
    """i.i.d. N(0, sigma^2) prior on each active coefficient."""

    sigma: float = 1.0
    kind: str = "gaussian_iid"

    def __post_init__(self):
        if self.kind != "gaussian_iid":
            raise ContractViolation(f"unsupported prior kind {self.kind!r}")
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ContractViolation(f"prior sigma must be positive, got {self.sigma}")


def log_prior_density(prior: PriorSpec, J: ModelIndex, beta: np.ndarray) -> float:
    """log f_J(beta); 0 for the empty model (empty product)."""
    beta = check_conforms(J, beta)
    k = J.size
    if k == 0:
        return 0.0
    s2 = prior.sigma**2
    return float(-0.5 * k * (LOG_2PI + np.log(s2)) - 0.5 * (beta @ beta) / s2)


def sample_prior(prior: PriorSpec, J: ModelIndex, seed: int, count: int) -> np.ndarray:
    """``count`` i.i.d. prior draws as a (count, |J|) array.

    Bit-reproducible in (seed, J, count); sigma enters as a pure scale
    factor, so draws at sigma=2 are exactly twice the draws at sigma=1.
    """
    if count < 1:
        raise ContractViolation(f"count must be >= 1, got {count}")
    k = J.size
    z = rng.normals(seed, 0, count * k).reshape(count, k)
    return prior.sigma * z


def lipschitz_constants(prior: PriorSpec, R: float) -> tuple[float, float]:
    """(F1, F2) for the Gaussian family: log f_J is (R/sigma^2)-Lipschitz on
    the radius-R ball and log f_J(beta) - log f_J(0) <= 0 everywhere."""
    if not (np.isfinite(R) and R > 0):
        raise ContractViolation(f"radius must be positive, got {R}")
    return R / prior.sigma**2, 0.0
