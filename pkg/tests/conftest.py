import math

import numpy as np
import pytest

from commexp.constants import Tolerances
from commexp.m_catalog.m_catalog import catalog, tu_pair
from commexp.m_matrix.m_matrix import CMatrix


def two_pi_i(k) -> complex:
    return complex(0.0, 2.0 * math.pi * k)


def assert_matrix_close(actual, expected, rtol=1e-9):
    actual = actual.data if isinstance(actual, CMatrix) else np.asarray(actual)
    expected = expected.data if isinstance(expected, CMatrix) else np.asarray(expected)
    gap = np.linalg.norm(actual - expected)
    assert gap <= rtol * max(1.0, np.linalg.norm(expected)), f"gap {gap}"


@pytest.fixture
def tol():
    return Tolerances.DEFAULT


@pytest.fixture
def tu():
    return tu_pair()


@pytest.fixture
def tu_scaled(tu):
    a0, b0 = tu
    return a0, b0 * -2


@pytest.fixture(scope="session")
def golden():
    return catalog()
