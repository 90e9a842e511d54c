import numpy as np
import pytest

from labs.day05_qlog_blocklength.exact_limit import binary_spectrum
from labs.day05_qlog_blocklength.source_model import SourcePmf, info_moments

# Canonical experiment: Bernoulli(0.11), eps = 0.01.
P_CANONICAL = 0.11
EPS_CANONICAL = 0.01

# Reference values for Bernoulli(0.11), nats, rounded from direct summation.
H1_011 = 0.3465153
V_011 = 0.4279403
T_011 = 0.69788
ALPHA_011 = 1.2703
Z_001 = 2.3263479


def random_pmf(rng: np.random.Generator, size: int) -> SourcePmf:
    """Dirichlet draw bounded away from zero, renormalized."""
    probs = rng.dirichlet(np.full(size, 2.0)) + 1e-3
    return SourcePmf(tuple(probs / probs.sum()))


@pytest.fixture
def bern011() -> SourcePmf:
    return SourcePmf.bernoulli(P_CANONICAL)


@pytest.fixture
def moments011(bern011):
    return info_moments(bern011)


@pytest.fixture
def fair_coin() -> SourcePmf:
    return SourcePmf((0.5, 0.5))


@pytest.fixture
def uniform4() -> SourcePmf:
    return SourcePmf((0.25, 0.25, 0.25, 0.25))


@pytest.fixture
def symmetric3() -> SourcePmf:
    """Self-information takes two values with equal mass: V > 0, T = 0."""
    return SourcePmf((0.25, 0.5, 0.25))


@pytest.fixture
def spectrum011_n2():
    return binary_spectrum(P_CANONICAL, 2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250611)
