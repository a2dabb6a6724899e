"""Log-likelihood, score and negative Hessian of a GLM submodel.

All three are pure functions of (dataset, model, coefficients) and depend
on the model only through its active design columns.  The empty model is
admitted everywhere: the linear predictor is identically zero, the score
is empty and the negative Hessian is the 0x0 matrix whose determinant is
taken to be 1.
"""

from __future__ import annotations

import numpy as np

from .data import Dataset, ModelIndex, check_conforms
from .errors import NumericError


def linear_predictor(ds: Dataset, J: ModelIndex, beta: np.ndarray) -> np.ndarray:
    beta = check_conforms(J, beta)
    if J.size == 0:
        return np.zeros(ds.n)
    return ds.columns(J) @ beta


def log_likelihood(ds: Dataset, J: ModelIndex, beta: np.ndarray) -> float:
    """sum_i [Y_i eta_i - b(eta_i)] with eta = X_J beta."""
    eta = linear_predictor(ds, J, beta)
    val = float(ds.Y @ eta - ds.family.b(eta).sum())
    if not np.isfinite(val):
        raise NumericError(f"log-likelihood is non-finite for model {J}")
    return val


def score(ds: Dataset, J: ModelIndex, beta: np.ndarray) -> np.ndarray:
    """Gradient of the log-likelihood restricted to J: X_J^T (Y - b'(eta))."""
    beta = check_conforms(J, beta)
    if J.size == 0:
        return np.zeros(0)
    XJ = ds.columns(J)
    resid = ds.Y - ds.family.bprime(XJ @ beta)
    out = XJ.T @ resid
    if not np.all(np.isfinite(out)):
        raise NumericError(f"score is non-finite for model {J}")
    return out


def neg_hessian(ds: Dataset, J: ModelIndex, beta: np.ndarray) -> np.ndarray:
    """Observed information X_J^T diag(b''(eta)) X_J, symmetric PSD."""
    beta = check_conforms(J, beta)
    if J.size == 0:
        return np.zeros((0, 0))
    XJ = ds.columns(J)
    w = ds.family.bpprime(XJ @ beta)
    H = (XJ * w[:, None]).T @ XJ
    H = 0.5 * (H + H.T)  # enforce exact symmetry against rounding
    if not np.all(np.isfinite(H)):
        raise NumericError(f"negative Hessian is non-finite for model {J}")
    return H
