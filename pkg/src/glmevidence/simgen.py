"""Synthetic data generation for the approximation-error and consistency
experiments.

The recipe: i.i.d. standard normal design entries, a true coefficient
vector whose first q_true entries equal the amplitude, and responses drawn
from the family's canonical-link model.  Design and response are re-drawn
per replicate from substreams of the replicate seed.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import rng
from .data import Dataset, ModelIndex
from .errors import ContractViolation
from .families import get_family

POISSON_MEAN_GUARD = 1e12


@dataclass(frozen=True)
class SimConfig:
    n: int
    p: int
    q_true: int
    amplitude: float = 2.0
    family: str = "logistic"
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.p < 1:
            raise ContractViolation("n and p must be >= 1")
        if not (0 <= self.q_true <= self.p):
            raise ContractViolation("q_true must lie in [0, p]")
        if not np.isfinite(self.amplitude):
            raise ContractViolation("amplitude must be finite")
        get_family(self.family)


@dataclass(frozen=True)
class ScalingConfig:
    """Growth exponents: p = n^kappa, q = n^psi, beta_min = n^(-phi/2)."""

    kappa: float
    psi: float = 0.0
    phi: float = 0.0
    gamma: float = 1.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ContractViolation("kappa must be > 0")
        if not (0 <= self.psi < 1.0 / 3.0):
            raise ContractViolation("psi must lie in [0, 1/3)")
        if not (0 <= self.phi < 1.0 - self.psi):
            raise ContractViolation("phi must lie in [0, 1 - psi)")
        if self.gamma < 0:
            raise ContractViolation("gamma must be >= 0")
        if self.kappa <= self.psi:
            raise ContractViolation("kappa must exceed psi")
        threshold = 1.0 - (1.0 - 2.0 * self.psi) / (2.0 * (self.kappa - self.psi))
        if self.gamma <= threshold:
            warnings.warn(
                f"gamma={self.gamma} is at or below the consistency threshold "
                f"{threshold:.4f}; selection need not be consistent",
                stacklevel=2,
            )


def _snap_ceil(x: float) -> int:
    """Ceiling with a 1e-9 snap to integers, guarding float slop in n**kappa."""
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return int(math.ceil(x))


def scaling_config_instantiate(sc: ScalingConfig, n: int) -> tuple[int, int, float]:
    """(p, q, beta_min) at sample size n, with ceiling-rounded powers."""
    if n < 2:
        raise ContractViolation("n must be >= 2")
    p = _snap_ceil(float(n) ** sc.kappa)
    q = _snap_ceil(float(n) ** sc.psi)
    beta_min = float(n) ** (-0.5 * sc.phi)
    return p, q, beta_min


def generate_design(n: int, p: int, seed: int) -> np.ndarray:
    """n x p matrix of i.i.d. standard normals, deterministic in seed."""
    if n < 1 or p < 1:
        raise ContractViolation("n and p must be >= 1")
    return rng.normals(seed, 0, n * p).reshape(n, p)


def make_beta0(cfg: SimConfig) -> np.ndarray:
    """True coefficients: amplitude on 1..q_true, zero elsewhere."""
    beta0 = np.zeros(cfg.p)
    beta0[: cfg.q_true] = cfg.amplitude
    return beta0


def true_support(cfg: SimConfig) -> ModelIndex:
    return ModelIndex(tuple(range(1, cfg.q_true + 1)))


def generate_response(X: np.ndarray, beta0: np.ndarray, family: str, seed: int) -> np.ndarray:
    """Responses from the canonical-link model at beta0, deterministic in seed."""
    X = np.asarray(X, dtype=np.float64)
    beta0 = np.asarray(beta0, dtype=np.float64)
    if X.ndim != 2 or beta0.shape != (X.shape[1],):
        raise ContractViolation("design and coefficient dimensions do not agree")
    eta = X @ beta0
    fam = get_family(family)
    if fam.kind == "logistic":
        u = rng.uniforms(seed, 0, X.shape[0])
        return (u < expit(eta)).astype(np.float64)
    mu = np.exp(eta)
    if np.any(mu > POISSON_MEAN_GUARD):
        raise OverflowError(
            f"poisson mean exceeds {POISSON_MEAN_GUARD:.0e}; refusing to sample"
        )
    return rng.poissons(seed, mu)


def simulate_dataset(cfg: SimConfig) -> tuple[Dataset, np.ndarray, ModelIndex]:
    """(dataset, beta0, true support) with design/response substreams
    derived from cfg.seed."""
    X = generate_design(cfg.n, cfg.p, rng.mix64(cfg.seed, 1))
    beta0 = make_beta0(cfg)
    Y = generate_response(X, beta0, cfg.family, rng.mix64(cfg.seed, 2))
    return Dataset.create(X, Y, cfg.family), beta0, true_support(cfg)
