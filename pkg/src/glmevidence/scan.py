"""Model scoring and exhaustive selection scans.

A scan scores every model in the q-sparse lattice under either the
Laplace-based or the Monte-Carlo-based posterior score and returns the
deterministic argmax.  Fits that fail (separation, no convergence,
singular Hessian) score -inf with a recorded status, so a scan always
completes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .data import Dataset, ModelIndex
from .errors import BudgetExceeded, ContractViolation, NoConvergence, Separation, SingularHessian
from .evidence import log_laplace_evidence, log_mc_evidence
from .fit import DEFAULT_FIT_OPTIONS, FitOptions, fit_mle
from .modelspace import ModelPrior, count_models, enumerate_models, log_model_prior
from .priors import PriorSpec

STATUS_OK = "ok"
STATUS_SEPARATED = "separated"
STATUS_FAILED = "failed"


def _laplace_scored(ds, J, prior, mp, fit_options) -> tuple[float, str]:
    try:
        fres = fit_mle(ds, J, fit_options)
    except Separation:
        return -math.inf, STATUS_SEPARATED
    except (NoConvergence, SingularHessian):
        return -math.inf, STATUS_FAILED
    lap = log_laplace_evidence(ds, J, prior, fres)
    return log_model_prior(mp, J) + lap.log_value, STATUS_OK


def score_laplace_gamma(
    ds: Dataset,
    J: ModelIndex,
    prior: PriorSpec,
    mp: ModelPrior,
    fit_options: FitOptions = DEFAULT_FIT_OPTIONS,
) -> float:
    """log of C(p,|J|)^-gamma * Laplace(J); -inf when the MLE does not exist."""
    return _laplace_scored(ds, J, prior, mp, fit_options)[0]


def score_bayes_gamma(
    ds: Dataset,
    J: ModelIndex,
    prior: PriorSpec,
    mp: ModelPrior,
    B: int,
    seed: int,
) -> float:
    """log of C(p,|J|)^-gamma * MonteCarlo(J)."""
    mc = log_mc_evidence(ds, J, prior, B, seed)
    return log_model_prior(mp, J) + mc.log_value


@dataclass(frozen=True)
class ScanResult:
    scores: tuple[tuple[ModelIndex, float, str], ...]
    best: ModelIndex
    score_kind: str  # laplace_gamma | bayes_gamma
    models_scored: int

    @property
    def separated_count(self) -> int:
        return sum(1 for _, _, st in self.scores if st == STATUS_SEPARATED)

    @property
    def failed_count(self) -> int:
        return sum(1 for _, _, st in self.scores if st == STATUS_FAILED)


def _better(cand: tuple[float, int, tuple], best: tuple[float, int, tuple]) -> bool:
    """Score descending, then smaller size, then lexicographic indices."""
    if cand[0] != best[0]:
        return cand[0] > best[0]
    if cand[1] != best[1]:
        return cand[1] < best[1]
    return cand[2] < best[2]


def select_model(
    ds: Dataset,
    prior: PriorSpec,
    mp: ModelPrior,
    method: str = "laplace",
    B: Optional[int] = None,
    seed: Optional[int] = None,
    budget: int = 10**6,
    fit_options: FitOptions = DEFAULT_FIT_OPTIONS,
) -> ScanResult:
    """Score every enumerated model and return the deterministic argmax.

    The tie rule (smaller |J|, then lexicographically smaller indices) is
    order-free, so scanning in any order yields the same best model.
    """
    if method not in ("laplace", "bayes"):
        raise ContractViolation(f"method must be 'laplace' or 'bayes', got {method!r}")
    if method == "bayes" and (B is None or seed is None):
        raise ContractViolation("bayes scans require B and seed")
    total = count_models(ds.p, mp.q_max)
    if total > budget:
        raise BudgetExceeded(f"{total} models exceed the budget of {budget}")

    rows = []
    best_key = None
    best_model = None
    for J in enumerate_models(ds.p, mp.q_max):
        if method == "laplace":
            sc, status = _laplace_scored(ds, J, prior, mp, fit_options)
        else:
            sc, status = score_bayes_gamma(ds, J, prior, mp, B, seed), STATUS_OK
        rows.append((J, sc, status))
        if math.isfinite(sc):
            key = (sc, J.size, J.indices)
            if best_key is None or _better(key, best_key):
                best_key = key
                best_model = J
    if best_model is None:
        raise ContractViolation("no model attained a finite score")
    return ScanResult(
        scores=tuple(rows),
        best=best_model,
        score_kind=f"{method}_gamma",
        models_scored=len(rows),
    )
