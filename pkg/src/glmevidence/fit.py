"""Damped Newton maximization of the submodel log-likelihood.

Iteration starts at beta = 0, solves H d = s through a positive-definite
(Cholesky) factorization, and halves the step until the log-likelihood
increases, so the iterate sequence ascends monotonically.  Divergence of
the logistic MLE (separation) is detected by a norm guard and surfaced as
a typed error rather than a large finite estimate, because downstream
scoring must be able to exclude such models.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .data import Dataset, ModelIndex
from .errors import ContractViolation, NoConvergence, Separation, SingularHessian
from .glm import log_likelihood, neg_hessian, score


@dataclass(frozen=True)
class FitOptions:
    grad_tol: float = 1e-8       # sup-norm of the score at convergence
    max_iter: int = 100
    max_coef_norm: float = 40.0  # separation guard on ||beta||_2
    step_halvings: int = 50

    def __post_init__(self):
        if self.grad_tol < 1e-14:
            raise ContractViolation("grad_tol must be >= 1e-14")
        if min(self.max_iter, self.step_halvings) < 1 or self.max_coef_norm <= 0:
            raise ContractViolation("fit options must be positive")


DEFAULT_FIT_OPTIONS = FitOptions()


@dataclass(frozen=True)
class FitResult:
    J: ModelIndex
    beta_hat: np.ndarray
    loglik: float
    score_supnorm: float
    hessian_at_opt: np.ndarray
    iterations: int
    converged: bool
    loglik_trace: tuple[float, ...] = field(default=(), repr=False)


def _solve_newton(H: np.ndarray, s: np.ndarray, J: ModelIndex) -> np.ndarray:
    try:
        return cho_solve(cho_factor(H, lower=True), s)
    except (LinAlgError, ValueError):
        pass
    # one diagonal-jitter retry before giving up on the factorization
    k = H.shape[0]
    jitter = 1e-8 * np.trace(H) / k if k else 0.0
    try:
        return cho_solve(cho_factor(H + jitter * np.eye(k), lower=True), s)
    except (LinAlgError, ValueError):
        raise SingularHessian(
            f"negative Hessian not positive definite for model {J}"
        ) from None


def fit_mle(ds: Dataset, J: ModelIndex, opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Maximize the submodel log-likelihood; raises on non-existence.

    Raises Separation when the coefficient norm escapes ``max_coef_norm``,
    NoConvergence when ``max_iter`` is exhausted, SingularHessian when the
    Newton solve fails on rank-deficient active columns.
    """
    if J.size > ds.n:
        warnings.warn(
            f"model size {J.size} exceeds sample size {ds.n}; MLE is not identifiable",
            stacklevel=2,
        )
    beta = np.zeros(J.size)
    ll = log_likelihood(ds, J, beta)
    trace = [ll]

    if J.size == 0:
        return FitResult(
            J=J, beta_hat=beta, loglik=ll, score_supnorm=0.0,
            hessian_at_opt=np.zeros((0, 0)), iterations=0, converged=True,
            loglik_trace=tuple(trace),
        )

    for it in range(1, opts.max_iter + 1):
        s = score(ds, J, beta)
        supnorm = float(np.max(np.abs(s)))
        if supnorm <= opts.grad_tol:
            H = neg_hessian(ds, J, beta)
            _assert_pd(H, J)
            return FitResult(
                J=J, beta_hat=beta, loglik=ll, score_supnorm=supnorm,
                hessian_at_opt=H, iterations=it - 1, converged=True,
                loglik_trace=tuple(trace),
            )
        H = neg_hessian(ds, J, beta)
        direction = _solve_newton(H, s, J)

        step = 1.0
        accepted = False
        for _ in range(opts.step_halvings):
            cand = beta + step * direction
            cand_ll = log_likelihood(ds, J, cand)
            if cand_ll > ll - 1e-12:
                beta, ll = cand, cand_ll
                accepted = True
                break
            step *= 0.5
        if not accepted:
            raise NoConvergence(
                f"line search stalled for model {J} at iteration {it} "
                f"(score sup-norm {supnorm:.3e})"
            )
        trace.append(ll)
        if float(np.linalg.norm(beta)) > opts.max_coef_norm:
            raise Separation(
                f"coefficient norm exceeded {opts.max_coef_norm} for model {J}; "
                "the MLE does not exist finitely"
            )

    raise NoConvergence(
        f"no convergence for model {J} after {opts.max_iter} iterations"
    )


def _assert_pd(H: np.ndarray, J: ModelIndex) -> None:
    try:
        cho_factor(H, lower=True)
    except (LinAlgError, ValueError):
        raise SingularHessian(
            f"negative Hessian at the optimum is not positive definite for model {J}"
        ) from None


def check_mle_norm(fit: FitResult, a_mle: float) -> bool:
    """Theorem-style diagnostic: is ||beta_hat||_2 <= a_mle?"""
    if not fit.converged:
        raise ContractViolation("check_mle_norm requires a converged fit")
    return bool(np.linalg.norm(fit.beta_hat) <= a_mle)
