"""Three estimators of the log marginal likelihood (evidence) of a submodel.

* Laplace: closed form at the MLE, log L + log f + (|J|/2) log 2pi
  - (1/2) log det H, with the log-determinant taken from a Cholesky
  factor, never from the determinant itself.
* Monte Carlo: prior sampling with a streaming log-sum-exp reduction and
  a delta-method standard error on the log scale.
* Quadrature: deterministic Gauss-Legendre tensor grid in the eigenbasis
  of the Hessian at the MLE; the low-dimensional oracle the other two are
  judged against.

All arithmetic is in log space end to end; the products and determinants
the estimators nominally involve underflow already at modest sample sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, cho_factor

from . import kernels, rng
from .data import Dataset, ModelIndex
from .errors import BudgetExceeded, ContractViolation, DimensionTooLarge, SingularHessian
from .errors import NoConvergence, Separation
from .fit import DEFAULT_FIT_OPTIONS, FitOptions, FitResult, fit_mle
from .glm import log_likelihood
from .modelspace import count_models, enumerate_models
from .priors import LOG_2PI, PriorSpec, log_prior_density


@dataclass(frozen=True)
class EvidenceEstimate:
    J: ModelIndex
    log_value: float
    method: str  # laplace | montecarlo | quadrature
    mc_std_error: Optional[float] = None
    mc_draws: Optional[int] = None
    seed: Optional[int] = None

    def __post_init__(self):
        if (self.method == "montecarlo") != (self.mc_std_error is not None):
            raise ContractViolation("mc_std_error present iff method is montecarlo")


def _log_det_pd(H: np.ndarray) -> float:
    """log det of a positive-definite matrix via Cholesky; 0 for the 0x0 case."""
    if H.shape[0] == 0:
        return 0.0
    try:
        c, _ = cho_factor(H, lower=True)
    except (LinAlgError, ValueError):
        raise SingularHessian("Hessian factorization failed in log-determinant") from None
    return 2.0 * float(np.sum(np.log(np.diag(c))))


def log_laplace_evidence(
    ds: Dataset, J: ModelIndex, prior: PriorSpec, fit: FitResult
) -> EvidenceEstimate:
    """Laplace approximation at the fitted MLE of model J."""
    if not fit.converged:
        raise ContractViolation("Laplace evidence requires a converged fit")
    if fit.J != J:
        raise ContractViolation(f"fit is for model {fit.J}, not {J}")
    k = J.size
    val = (
        fit.loglik
        + log_prior_density(prior, J, fit.beta_hat)
        + 0.5 * k * LOG_2PI
        - 0.5 * _log_det_pd(fit.hessian_at_opt)
    )
    return EvidenceEstimate(J=J, log_value=float(val), method="laplace")


def log_mc_evidence(
    ds: Dataset, J: ModelIndex, prior: PriorSpec, B: int, seed: int
) -> EvidenceEstimate:
    """Monte Carlo evidence from B prior draws.

    The draw stream is derived from (seed, J) with the avalanche mixer, so
    scans over many models can share one master seed and remain
    order-independent.  The standard error is the delta-method SE of the
    log estimate (SD of the weights over sqrt(B) times the mean weight).
    """
    if B < 2:
        raise ContractViolation(f"B must be >= 2, got {B}")
    k = J.size
    if k == 0:
        # constant integrand: the estimator is exact
        val = log_likelihood(ds, J, np.zeros(0))
        return EvidenceEstimate(
            J=J, log_value=val, method="montecarlo",
            mc_std_error=0.0, mc_draws=B, seed=int(seed),
        )
    stream = rng.model_stream_seed(seed, J.indices)
    M, s1, s2 = kernels.mc_evidence_sums(
        ds.columns(J), ds.Y, ds.family.code, stream, B, prior.sigma
    )
    log_value = M + math.log(s1) - math.log(B) if s1 > 0 else -math.inf
    var_w = max(s2 - s1 * s1 / B, 0.0)
    se = math.sqrt(var_w * B / (B - 1)) / s1 if s1 > 0 else math.inf
    return EvidenceEstimate(
        J=J, log_value=float(log_value), method="montecarlo",
        mc_std_error=float(se), mc_draws=B, seed=int(seed),
    )


def log_quadrature_evidence(
    ds: Dataset,
    J: ModelIndex,
    prior: PriorSpec,
    fit: FitResult,
    half_width_sds: float = 12.0,
    points_per_dim: int = 400,
) -> EvidenceEstimate:
    """Deterministic oracle for the evidence integral, |J| <= 3.

    Integrates exp(log L + log f_J) over a box centered at the MLE and
    aligned with the eigenvectors of H(beta_hat), extending
    ``half_width_sds`` inverse-root-eigenvalue units along each axis.
    Gauss-Legendre nodes per axis; the defaults leave the oracle's own
    error far below anything it is compared against.
    """
    k = J.size
    if k > 3:
        raise DimensionTooLarge(f"quadrature oracle supports |J| <= 3, got {k}")
    if not fit.converged or fit.J != J:
        raise ContractViolation("quadrature requires a converged fit for the same model")
    if k == 0:
        return EvidenceEstimate(
            J=J, log_value=log_likelihood(ds, J, np.zeros(0)), method="quadrature"
        )

    eigval, eigvec = np.linalg.eigh(fit.hessian_at_opt)
    if np.any(eigval <= 0):
        raise SingularHessian("Hessian at the optimum has a nonpositive eigenvalue")
    scales = 1.0 / np.sqrt(eigval)
    directions = eigvec * scales[None, :]  # column k maps unit t_k to beta space
    log_jacobian = float(np.sum(np.log(scales)))

    nodes, weights = np.polynomial.legendre.leggauss(points_per_dim)
    t = half_width_sds * nodes
    logw_axis = np.log(half_width_sds * weights)

    XJ = ds.columns(J)
    sigma2 = prior.sigma**2
    log_prior_const = -0.5 * k * (LOG_2PI + np.log(sigma2))

    M = -np.inf
    s = 0.0
    # iterate the leading axis; vectorize the remaining <= points^2 grid
    if k == 1:
        tail = np.zeros((1, 0))
        tail_logw = np.zeros(1)
    elif k == 2:
        tail = t[:, None]
        tail_logw = logw_axis
    else:
        ta, tb = np.meshgrid(t, t, indexing="ij")
        tail = np.column_stack([ta.ravel(), tb.ravel()])
        tail_logw = (logw_axis[:, None] + logw_axis[None, :]).ravel()

    for i0 in range(points_per_dim):
        tvec = np.column_stack([np.full(tail.shape[0], t[i0]), tail])
        betas = fit.beta_hat[None, :] + tvec @ directions.T
        logl = kernels.loglik_block(XJ, ds.Y, ds.family.code, betas)
        logf = log_prior_const - 0.5 * np.einsum("ij,ij->i", betas, betas) / sigma2
        v = logl + logf + logw_axis[i0] + tail_logw
        bm = float(v.max())
        if bm > M:
            s *= np.exp(M - bm)
            M = bm
        s += float(np.exp(v - M).sum())

    return EvidenceEstimate(
        J=J, log_value=float(M + math.log(s) + log_jacobian), method="quadrature"
    )


@dataclass(frozen=True)
class LaplaceErrorReport:
    """Result of the max-over-models |log MC - log Laplace| sweep."""

    max_error: float
    argmax_model: Optional[ModelIndex]
    models_scored: int
    separated_count: int
    failed_count: int

    def __float__(self) -> float:
        return self.max_error


def laplace_error_max(
    ds: Dataset,
    q: int,
    prior: PriorSpec,
    B: int,
    seed: int,
    budget: int = 10**6,
    fit_options: FitOptions = DEFAULT_FIT_OPTIONS,
) -> LaplaceErrorReport:
    """max over |J| <= q of |log MonteCarlo(J) - log Laplace(J)|.

    Models whose MLE does not exist (separation) or whose fit fails are
    skipped and counted.  Ties in the maximum resolve to the model that
    enumerates first (smaller size, then lexicographic), making the sweep
    order-independent.
    """
    if q < 1:
        raise ContractViolation(f"q must be >= 1, got {q}")
    total = count_models(ds.p, q)
    if total > budget:
        raise BudgetExceeded(f"{total} models exceed the budget of {budget}")

    best = -1.0
    best_model: Optional[ModelIndex] = None
    scored = 0
    separated = 0
    failed = 0
    for J in enumerate_models(ds.p, q):
        try:
            fres = fit_mle(ds, J, fit_options)
        except Separation:
            separated += 1
            continue
        except (NoConvergence, SingularHessian):
            failed += 1
            continue
        lap = log_laplace_evidence(ds, J, prior, fres)
        mc = log_mc_evidence(ds, J, prior, B, seed)
        err = abs(mc.log_value - lap.log_value)
        scored += 1
        if err > best:
            best = err
            best_model = J
    if scored == 0:
        raise ContractViolation("no model could be scored; all fits failed")
    return LaplaceErrorReport(
        max_error=best,
        argmax_model=best_model,
        models_scored=scored,
        separated_count=separated,
        failed_count=failed,
    )
