"""Empirical verification of the regularity assumptions and the two
numeric inequalities used by the theory.

The spectral-bound, Lipschitz and sandwich checks quantify over all
coefficient vectors and all sparse models, which is not exhaustively
checkable; they are estimated by seeded sampling, and every estimate is
reproducible from the recorded seed.  The two inequality suites are
theorems: any violation on their default grids indicates an
implementation bug, and the CLI exits nonzero on one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import quad

from . import rng
from .data import Dataset, ModelIndex, check_conforms
from .errors import ContractViolation, PreconditionViolated
from .glm import neg_hessian
from .special import chi2_cdf, log_upper_gamma

DEFAULT_CHISQ_KS = tuple(range(1, 11))
DEFAULT_CHISQ_NS = (3, 10, 100, 1000, 10000)

# (k, a, b) with a*b >= 2(k-1), mixing boundary and interior cases
DEFAULT_RADIAL_CASES = (
    (1, 2.0, 1.0),
    (1, 0.5, 1.0),
    (2, 2.0, 2.0),
    (2, 5.0, 3.0),
    (3, 4.0, 1.0),
    (3, 3.0, 3.0),
    (4, 3.0, 2.0),
    (4, 10.0, 1.0),
    (5, 4.0, 2.0),
    (6, 5.0, 2.0),
)


@dataclass(frozen=True)
class AssumptionReport:
    a0_norm: Optional[float]
    c_lower_hat: float
    c_upper_hat: float
    c_change_hat: float
    models_sampled: int
    betas_sampled: int
    radius: float
    sandwich_ok: Optional[bool]
    sandwich_epsilon: Optional[float]


@dataclass(frozen=True)
class LemmaReport:
    lemma: str  # chisq_tail | radial_integral
    grid: tuple
    violations: int
    worst_margin: float


@dataclass(frozen=True)
class LipschitzEstimate:
    c_change_hat: float
    pairs_used: int
    pairs_skipped: int

    def __float__(self) -> float:
        return self.c_change_hat


def _ball_point(k: int, radius: float, direction: np.ndarray, u: float) -> np.ndarray:
    """Uniform draw in the radius-ball of R^k from a normal direction and a
    uniform radius variate."""
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return np.zeros(k)
    return (radius * u ** (1.0 / k) / norm) * direction


def _ball_samples(k: int, radius: float, draws: int, stream: int) -> np.ndarray:
    dirs = rng.normals(rng.mix64(stream, 1), 0, draws * k).reshape(draws, k)
    us = rng.uniforms(rng.mix64(stream, 2), 0, draws)
    return np.stack([_ball_point(k, radius, dirs[t], us[t]) for t in range(draws)])


def estimate_spectrum_bounds(
    ds: Dataset,
    models: Sequence[ModelIndex],
    radius: float,
    draws: int,
    seed: int,
) -> tuple[float, float]:
    """Sampled (min smallest, max largest) eigenvalue of H_J(beta)/n.

    Adding draws can only widen the returned interval: draw t of each
    model's stream is the same regardless of ``draws``.
    """
    if draws < 1:
        raise ContractViolation("draws must be >= 1")
    c_lower = math.inf
    c_upper = -math.inf
    for m_i, J in enumerate(models):
        if J.size == 0:
            continue
        betas = _ball_samples(J.size, radius, draws, rng.mix64(seed, m_i))
        for t in range(draws):
            ev = np.linalg.eigvalsh(neg_hessian(ds, J, betas[t]) / ds.n)
            c_lower = min(c_lower, float(ev[0]))
            c_upper = max(c_upper, float(ev[-1]))
    if not math.isfinite(c_lower):
        raise ContractViolation("no nonempty model supplied")
    return c_lower, c_upper


def estimate_hessian_lipschitz(
    ds: Dataset,
    models: Sequence[ModelIndex],
    radius: float,
    pair_draws: int,
    seed: int,
) -> LipschitzEstimate:
    """Sampled max of ||H_J(b) - H_J(b')||_sp / (n ||b - b'||)."""
    if pair_draws < 1:
        raise ContractViolation("pair_draws must be >= 1")
    best = 0.0
    used = 0
    skipped = 0
    for m_i, J in enumerate(models):
        if J.size == 0:
            continue
        betas = _ball_samples(J.size, radius, 2 * pair_draws, rng.mix64(seed, m_i))
        for t in range(pair_draws):
            b1, b2 = betas[2 * t], betas[2 * t + 1]
            gap = float(np.linalg.norm(b1 - b2))
            if gap < 1e-12:
                skipped += 1
                continue
            diff = neg_hessian(ds, J, b1) - neg_hessian(ds, J, b2)
            spec = float(np.max(np.abs(np.linalg.eigvalsh(diff))))
            best = max(best, spec / (ds.n * gap))
            used += 1
    return LipschitzEstimate(c_change_hat=best, pairs_used=used, pairs_skipped=skipped)


def check_sandwich(
    ds: Dataset,
    J: ModelIndex,
    beta0: np.ndarray,
    delta: float,
    epsilon: float,
    draws: int,
    seed: int,
) -> bool:
    """Does (1-eps) H_J(beta0) <= H_J(beta) <= (1+eps) H_J(beta0) hold for
    sampled beta with ||beta - beta0|| <= delta?

    ``beta0`` is the true coefficient vector embedded in R^J (zeros off
    the true support).  PSD checks tolerate eigenvalues down to -1e-9.
    """
    beta0 = check_conforms(J, beta0)
    if delta < 0 or epsilon < 0:
        raise ContractViolation("delta and epsilon must be >= 0")
    H0 = neg_hessian(ds, J, beta0)
    offsets = _ball_samples(J.size, delta, draws, rng.mix64(seed, 0)) if delta > 0 else (
        np.zeros((draws, J.size))
    )
    for t in range(draws):
        H = neg_hessian(ds, J, beta0 + offsets[t])
        hi = (1.0 + epsilon) * H0 - H
        lo = H - (1.0 - epsilon) * H0
        if np.linalg.eigvalsh(hi)[0] < -1e-9 or np.linalg.eigvalsh(lo)[0] < -1e-9:
            return False
    return True


def verify_chisq_tail_lemma(
    k_values: Sequence[int] = DEFAULT_CHISQ_KS,
    n_values: Sequence[int] = DEFAULT_CHISQ_NS,
) -> LemmaReport:
    """P{chi2_k <= 5 k log n} >= 1 - n^-k >= exp(-1/sqrt(n)) on a grid."""
    grid = []
    violations = 0
    worst = math.inf
    for k in k_values:
        for n in n_values:
            if n < 3:
                raise PreconditionViolated(f"need n >= 3, got {n}")
            cdf = chi2_cdf(k, 5.0 * k * math.log(n))
            mid = 1.0 - float(n) ** (-float(k))
            low = math.exp(-1.0 / math.sqrt(n))
            m1 = cdf - mid
            m2 = mid - low
            worst = min(worst, m1, m2)
            if m1 < 0 or m2 < 0:
                violations += 1
            grid.append((k, n))
    return LemmaReport(
        lemma="chisq_tail", grid=tuple(grid), violations=violations, worst_margin=worst
    )


def radial_tail_integral_log(k: int, a: float, b: float) -> float:
    """log of the exact integral of e^{-b ||xi||} over ||xi|| > a in R^k,
    i.e. log[ 2 pi^{k/2} / (b^k Gamma(k/2)) * Gamma(k, ab) ]."""
    return (
        math.log(2.0)
        + 0.5 * k * math.log(math.pi)
        - k * math.log(b)
        - math.lgamma(0.5 * k)
        + log_upper_gamma(float(k), a * b)
    )


def radial_tail_bound_log(k: int, a: float, b: float) -> float:
    """log of the closed-form bound 4 pi^{k/2} a^{k-1} e^{-ab} / (Gamma(k/2) b)."""
    return (
        math.log(4.0)
        + 0.5 * k * math.log(math.pi)
        - math.lgamma(0.5 * k)
        + (k - 1) * math.log(a)
        - math.log(b)
        - a * b
    )


def verify_radial_integral_lemma(
    cases: Sequence[tuple[int, float, float]] = DEFAULT_RADIAL_CASES,
    quad_rel_tol: float = 1e-8,
) -> LemmaReport:
    """Exact radial tail integral vs its bound, plus a quadrature cross-check
    of the upper incomplete gamma factor."""
    violations = 0
    worst = math.inf
    for k, a, b in cases:
        if a <= 0 or b <= 0 or k < 1:
            raise PreconditionViolated(f"need a,b > 0 and k >= 1, got {(k, a, b)}")
        if a * b < 2 * (k - 1):
            raise PreconditionViolated(
                f"case {(k, a, b)} violates a*b >= 2(k-1)"
            )
        margin = radial_tail_bound_log(k, a, b) - radial_tail_integral_log(k, a, b)
        if margin < 0:
            violations += 1
        worst = min(worst, margin)

        gamma_exact = math.exp(log_upper_gamma(float(k), a * b))
        gamma_quad, _ = quad(
            lambda r: r ** (k - 1) * math.exp(-r),
            a * b,
            math.inf,
            epsabs=0.0,
            epsrel=1e-11,
            limit=200,
        )
        rel = abs(gamma_quad - gamma_exact) / gamma_exact
        if rel > quad_rel_tol:
            violations += 1
        worst = min(worst, quad_rel_tol - rel)
    return LemmaReport(
        lemma="radial_integral",
        grid=tuple(cases),
        violations=violations,
        worst_margin=worst,
    )
