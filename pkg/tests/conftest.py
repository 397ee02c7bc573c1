import numpy as np
import pytest

from zenolab.models import PAULI


@pytest.fixture
def sx():
    return PAULI["X"].copy()


@pytest.fixture
def sy():
    return PAULI["Y"].copy()


@pytest.fixture
def sz():
    return PAULI["Z"].copy()


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
