import numpy as np
import pytest
from hypothesis import settings

from uqsd.coherence import coherence_lower_bound_check
from uqsd.states import Ensemble

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def random_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_density(rng, n, rank=None):
    rank = n if rank is None else rank
    z = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = z @ z.conj().T
    return rho / np.trace(rho).real


def assert_coherence_bound(p_s, c_mean):
    """Success probability never drops below half the mean ancilla coherence."""
    assert coherence_lower_bound_check(p_s, c_mean), (p_s, c_mean)


def equal_overlap_ensemble(d=3, g=0.5):
    """Equal priors, every pairwise overlap equal to ``g``."""
    m = np.full((d, d), g)
    np.fill_diagonal(m, 1.0)
    w, v = np.linalg.eigh(m)
    root = (v * np.sqrt(w)) @ v.T
    return Ensemble(np.full(d, 1 / d), root.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
