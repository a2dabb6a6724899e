import math

import numpy as np
import pytest

from glmevidence import Dataset, ModelIndex, log_likelihood, neg_hessian, score
from glmevidence.data import EMPTY_MODEL
from glmevidence.errors import ContractViolation

from conftest import sim_logistic, sim_poisson, ones_column_dataset


def naive_loglik(ds, J, beta):
    """Independent direct-sum oracle, written before the vectorized path."""
    total = 0.0
    for i in range(ds.n):
        eta = 0.0
        for pos, j in enumerate(J.indices):
            eta += ds.X[i, j - 1] * beta[pos]
        total += ds.Y[i] * eta - ds.family.b(eta)
    return total


def test_logistic_zero_beta_is_minus_n_log2():
    ds = ones_column_dataset([0, 1, 1, 0, 1, 0, 0, 1])
    J = ModelIndex.of(1)
    assert math.isclose(log_likelihood(ds, J, np.zeros(1)), -8 * math.log(2), rel_tol=1e-14)


def test_poisson_empty_model():
    ds = Dataset.create(np.ones((4, 1)), [1, 2, 0, 3], "poisson")
    assert math.isclose(log_likelihood(ds, EMPTY_MODEL, np.zeros(0)), -4.0, rel_tol=1e-14)


def test_loglik_matches_direct_sum_oracle():
    ds = sim_logistic(n=50, p=6, seed=7)
    J = ModelIndex.of(1, 3, 5)
    rs = np.random.default_rng(3)
    for _ in range(5):
        beta = rs.normal(size=3)
        got = log_likelihood(ds, J, beta)
        want = naive_loglik(ds, J, beta)
        assert math.isclose(got, want, rel_tol=1e-12)


def test_score_at_zero_logistic():
    ds = sim_logistic(n=40, p=4, seed=9)
    J = ModelIndex.of(2, 4)
    got = score(ds, J, np.zeros(2))
    want = ds.X[:, [1, 3]].T @ (ds.Y - 0.5)
    assert np.allclose(got, want, rtol=1e-13)


def test_score_empty_model():
    ds = sim_poisson(n=10, p=3, seed=2)
    assert score(ds, EMPTY_MODEL, np.zeros(0)).shape == (0,)


@pytest.mark.parametrize("make,seed", [(sim_logistic, 11), (sim_poisson, 12)])
def test_score_matches_finite_differences(make, seed):
    ds = make(n=60, p=5, seed=seed)
    J = ModelIndex.of(1, 2, 4)
    rs = np.random.default_rng(seed)
    beta = 0.3 * rs.normal(size=3)
    s = score(ds, J, beta)
    for j in range(3):
        h = 1e-5 * max(1.0, abs(beta[j]))
        e = np.zeros(3)
        e[j] = h
        fd = (log_likelihood(ds, J, beta + e) - log_likelihood(ds, J, beta - e)) / (2 * h)
        assert math.isclose(s[j], fd, rel_tol=1e-4, abs_tol=1e-8)


def test_neg_hessian_ones_column():
    ds = ones_column_dataset([0, 1, 1, 0, 1, 0, 0, 1])
    H = neg_hessian(ds, ModelIndex.of(1), np.zeros(1))
    assert np.allclose(H, [[2.0]], rtol=1e-14)  # (1/4) * 8


def test_neg_hessian_poisson_at_zero():
    ds = sim_poisson(n=30, p=4, seed=5)
    J = ModelIndex.of(1, 3)
    H = neg_hessian(ds, J, np.zeros(2))
    XJ = ds.X[:, [0, 2]]
    assert np.allclose(H, XJ.T @ XJ, rtol=1e-12)


def test_neg_hessian_matches_score_jacobian():
    ds = sim_logistic(n=80, p=5, seed=21)
    J = ModelIndex.of(1, 2, 5)
    rs = np.random.default_rng(21)
    beta = 0.4 * rs.normal(size=3)
    H = neg_hessian(ds, J, beta)
    for j in range(3):
        h = 1e-5
        e = np.zeros(3)
        e[j] = h
        col = -(score(ds, J, beta + e) - score(ds, J, beta - e)) / (2 * h)
        assert np.allclose(H[:, j], col, rtol=1e-3, atol=1e-6)


def test_concavity_midpoint_property():
    """logL(t b + (1-t) b') >= t logL(b) + (1-t) logL(b') - 1e-10 at t=1/2."""
    ds = sim_logistic(n=50, p=6, seed=33)
    J = ModelIndex.of(2, 3, 6)
    rs = np.random.default_rng(33)
    for _ in range(200):
        b1, b2 = rs.normal(size=(2, 3))
        mid = log_likelihood(ds, J, 0.5 * (b1 + b2))
        chord = 0.5 * log_likelihood(ds, J, b1) + 0.5 * log_likelihood(ds, J, b2)
        assert mid >= chord - 1e-10


def test_hessian_symmetric_and_psd():
    ds = sim_logistic(n=70, p=6, seed=44)
    J = ModelIndex.of(1, 4, 6)
    rs = np.random.default_rng(44)
    for _ in range(20):
        H = neg_hessian(ds, J, rs.normal(size=3))
        assert np.max(np.abs(H - H.T)) <= 1e-12
        assert np.linalg.eigvalsh(H)[0] >= -1e-10


def test_inactive_columns_do_not_matter():
    """Permuting inactive columns leaves all three outputs bit-identical."""
    ds = sim_logistic(n=40, p=6, seed=55)
    J = ModelIndex.of(2, 5)
    X2 = ds.X.copy()
    X2[:, [0, 3]] = X2[:, [3, 0]]  # swap two inactive columns
    ds2 = Dataset.create(X2, ds.Y, "logistic")
    beta = np.array([0.3, -0.7])
    assert log_likelihood(ds, J, beta) == log_likelihood(ds2, J, beta)
    assert np.array_equal(score(ds, J, beta), score(ds2, J, beta))
    assert np.array_equal(neg_hessian(ds, J, beta), neg_hessian(ds2, J, beta))


def test_dimension_mismatch_raises():
    ds = sim_logistic(n=20, p=3, seed=1)
    with pytest.raises(ContractViolation):
        log_likelihood(ds, ModelIndex.of(1, 2), np.zeros(3))
    with pytest.raises(ContractViolation):
        score(ds, ModelIndex.of(1), np.array([np.nan]))


def test_dataset_validation():
    with pytest.raises(ContractViolation):
        Dataset.create(np.ones((3, 2)), [0, 1, 2], "logistic")
    with pytest.raises(ContractViolation):
        Dataset.create(np.array([[1.0, np.inf]]), [1], "logistic")
    with pytest.raises(ContractViolation):
        Dataset.create(np.ones((2, 1)), [1.5, 2.0], "poisson")
