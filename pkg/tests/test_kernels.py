import math
import os
import subprocess
import sys

import numpy as np
import pytest

from glmevidence import ModelIndex, log_likelihood
from glmevidence import kernels
from glmevidence.families import LOGISTIC_CODE, POISSON_CODE

from conftest import sim_logistic, sim_poisson


@pytest.fixture
def numpy_backend():
    prev = kernels.active_backend()
    kernels.set_backend("numpy")
    yield
    kernels.set_backend(prev)


def _logz(sums, B):
    M, s1, _ = sums
    return M + math.log(s1 / B)


@pytest.mark.parametrize(
    "make,code,seed",
    [(sim_logistic, LOGISTIC_CODE, 3), (sim_poisson, POISSON_CODE, 4)],
)
def test_loglik_block_matches_glm(make, code, seed):
    ds = make(n=60, p=5, seed=seed)
    J = ModelIndex.of(1, 3)
    X = ds.columns(J)
    rs = np.random.default_rng(seed)
    betas = 0.5 * rs.normal(size=(8, 2))
    blk = kernels.loglik_block(X, ds.Y, code, betas)
    direct = np.array([log_likelihood(ds, J, b) for b in betas])
    assert np.allclose(blk, direct, rtol=1e-12, atol=1e-9)


def test_mc_sums_streaming_equals_two_pass(numpy_backend):
    """The running-max accumulator must equal the plain max-then-sum LSE."""
    ds = sim_logistic(n=50, p=4, seed=8)
    J = ModelIndex.of(1, 2)
    X = ds.columns(J)
    B = 4000
    M, s1, s2 = kernels.mc_evidence_sums(
        X, ds.Y, LOGISTIC_CODE, 77, B, 1.0, dtype=np.float64
    )
    from glmevidence import rng

    draws = rng.normals(77, 0, B * 2).reshape(B, 2)
    logw = kernels.loglik_block(X, ds.Y, LOGISTIC_CODE, draws)
    Mref = logw.max()
    s1ref = np.exp(logw - Mref).sum()
    s2ref = np.exp(2 * (logw - Mref)).sum()
    assert math.isclose(M + math.log(s1), Mref + math.log(s1ref), rel_tol=1e-12)
    assert math.isclose(M + 0.5 * math.log(s2), Mref + 0.5 * math.log(s2ref), rel_tol=1e-10)


def test_constant_weights_recovered_exactly():
    """A constant log-weight stream must come back exactly: the reduction
    adds and removes log B without rounding."""
    logw = np.full(1000, -123.456789)
    M = logw.max()
    s1 = float(np.exp(logw - M).sum())
    assert M + math.log(s1 / 1000) == -123.456789


def test_backends_agree_fp64():
    ds = sim_logistic(n=80, p=5, seed=12)
    J = ModelIndex.of(2, 4)
    X = ds.columns(J)
    kernels.set_backend("numba")
    nb = kernels.mc_evidence_sums(X, ds.Y, LOGISTIC_CODE, 5, 2000, 1.0)
    kernels.set_backend("numpy")
    npy = kernels.mc_evidence_sums(X, ds.Y, LOGISTIC_CODE, 5, 2000, 1.0, dtype=np.float64)
    assert math.isclose(_logz(nb, 2000), _logz(npy, 2000), rel_tol=0, abs_tol=1e-9)


def test_fp32_default_close_to_fp64(numpy_backend):
    ds = sim_logistic(n=100, p=5, seed=13)
    J = ModelIndex.of(1, 2)
    X = ds.columns(J)
    a = kernels.mc_evidence_sums(X, ds.Y, LOGISTIC_CODE, 9, 5000, 1.0, dtype=np.float32)
    b = kernels.mc_evidence_sums(X, ds.Y, LOGISTIC_CODE, 9, 5000, 1.0, dtype=np.float64)
    assert abs(_logz(a, 5000) - _logz(b, 5000)) < 1e-4


def test_poisson_defaults_to_fp64():
    assert kernels.mc_dtype(POISSON_CODE) == np.float64
    if "GLMEVIDENCE_MC_DTYPE" not in os.environ:
        assert kernels.mc_dtype(LOGISTIC_CODE) == np.float32


def test_env_flag_selects_backend():
    code = (
        "from glmevidence import kernels; "
        "print(kernels.active_backend())"
    )
    for want in ("numpy", "numba"):
        env = dict(os.environ, GLMEVIDENCE_KERNELS=want)
        out = subprocess.run(
            [sys.executable, "-c", code], env=env, capture_output=True, text=True
        )
        assert out.stdout.strip() == want


def test_set_backend_rejects_unknown():
    with pytest.raises(ValueError):
        kernels.set_backend("cython")
