import numpy as np
import pytest

from qpp.generate import GenSpec, random_idempotent, random_quadratic, random_quasi_pair


@pytest.fixture(scope="session")
def idempotent_pool_500():
    rng = np.random.default_rng(50_000)
    pool = []
    for k in range(500):
        dim = int(rng.integers(2, 13))
        pool.append(random_idempotent(GenSpec(dim=dim, seed=50_000 + k, kind="idempotent")))
    return pool


@pytest.fixture(scope="session")
def quasi_pair_pool_300():
    rng = np.random.default_rng(60_000)
    pool = []
    for k in range(300):
        dim = int(rng.integers(2, 13))
        pool.append(random_quasi_pair(GenSpec(dim=dim, seed=60_000 + k, kind="quasi_pair")))
    return pool


@pytest.fixture(scope="session")
def quadratic_pool_300():
    rng = np.random.default_rng(70_000)
    pool = []
    for k in range(300):
        dim = int(rng.integers(2, 11))
        pool.append(random_quadratic(GenSpec(dim=dim, seed=70_000 + k, kind="quadratic")))
    return pool
