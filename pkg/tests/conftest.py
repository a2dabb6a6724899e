import numpy as np
import pytest

from glmevidence import Dataset, SimConfig, simulate_dataset


def sim_logistic(n, p, q_true=2, amplitude=2.0, seed=0):
    ds, _, _ = simulate_dataset(
        SimConfig(n=n, p=p, q_true=q_true, amplitude=amplitude, family="logistic", seed=seed)
    )
    return ds


def sim_poisson(n, p, q_true=1, amplitude=0.5, seed=0):
    ds, _, _ = simulate_dataset(
        SimConfig(n=n, p=p, q_true=q_true, amplitude=amplitude, family="poisson", seed=seed)
    )
    return ds


def ones_column_dataset(y, family="logistic"):
    """Single all-ones covariate; closed-form MLEs for sanity checks."""
    y = np.asarray(y, dtype=float)
    return Dataset.create(np.ones((len(y), 1)), y, family)


@pytest.fixture
def logistic_small():
    return sim_logistic(n=50, p=5, seed=101)


@pytest.fixture
def logistic_medium():
    return sim_logistic(n=200, p=10, seed=202)
