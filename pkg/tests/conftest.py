import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile('default', deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('default')


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_hamiltonian(n, rng):
    """Dense Hamiltonian ``[[E, B], [C, -E^T]]`` with symmetric ``B``, ``C``."""
    E = rng.standard_normal((n, n))
    B = rng.standard_normal((n, n))
    C = rng.standard_normal((n, n))
    return np.block([[E, B + B.T], [C + C.T, -E.T]])
