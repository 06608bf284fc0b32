import math

import pytest

from src.dodiff import dparam
from src.dodiff.acceptance import reference_suite
from src.dodiff.app import App
from src.dodiff.spectral import QuadratureSpec


@pytest.fixture
def app_fixture():
    return App(__name__)


@pytest.fixture(scope="session")
def parameter_suite():
    """
    δ(ν − 0.25), δ(ν − 0.5), δ(ν − 0.75), three bands and one tabulated density
    """
    return reference_suite()


@pytest.fixture(scope="session")
def density_suite():
    return [dparam.band(0.2, 0.8), dparam.band(0.3, 0.7), dparam.band(0.5, 0.9)]


@pytest.fixture(scope="session")
def half_order():
    return dparam.delta((1.0, 0.5))


@pytest.fixture(scope="session")
def wide_band():
    return dparam.band(0.2, 0.8)


@pytest.fixture(scope="session")
def loose_quadrature():
    return QuadratureSpec(rel_tol=1e-8)


@pytest.fixture(scope="session")
def first_mode():
    return math.pi
