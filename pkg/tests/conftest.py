import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from sqzdist.model import beamsplitter_unitary, haar_random_unitary, tritter_unitary, validate_scenario

settings.register_profile("default", deadline=None, max_examples=30, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

ACCEPTANCE_LINES = []


def random_gram(M, rng, rank=None):
    """Overlap matrix of random unit vectors (rank ``rank`` if given)."""
    D = M if rank is None else rank
    phi = rng.standard_normal((M, D)) + 1j * rng.standard_normal((M, D))
    phi /= np.linalg.norm(phi, axis=1, keepdims=True)
    V = phi @ phi.conj().T
    np.fill_diagonal(V, 1.0)
    return V


def random_scenario(M, seed, rmax=0.75, V="random", eta=None):
    rng = np.random.default_rng(seed)
    if isinstance(V, str):
        V = {"random": random_gram(M, rng), "ones": np.ones((M, M)), "identity": np.eye(M)}[V]
    return validate_scenario(
        haar_random_unitary(M, seed),
        rng.uniform(0.05, rmax, M),
        rng.uniform(0, 2 * np.pi, M),
        V,
        eta,
    )


@pytest.fixture
def beamsplitter():
    return validate_scenario(beamsplitter_unitary(), [1.0, 1.0])


@pytest.fixture
def tritter():
    return validate_scenario(tritter_unitary(), [1.0, 1.0, 1.0])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
