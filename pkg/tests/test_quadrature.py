import math

import numpy as np
import pytest

from src.dodiff import quadrature
from src.dodiff.helper.exceptions import QuadratureNonconvergenceError


def test_gauss_legendre_is_exact_for_polynomials():
    nodes, weights = quadrature.gauss_legendre(5)
    assert weights @ nodes ** 8 == pytest.approx(2.0 / 9.0, rel=1e-14)
    assert np.sum(weights) == pytest.approx(2.0, rel=1e-15)


def test_gauss_legendre_is_cached_and_read_only():
    nodes, _ = quadrature.gauss_legendre(7)
    assert quadrature.gauss_legendre(7)[0] is nodes
    with pytest.raises(ValueError):
        nodes[0] = 0.0


def test_composite_gauss_legendre():
    nodes, weights = quadrature.composite_gauss_legendre([0.0, 0.25, 0.5, 1.0], 8)
    assert nodes.shape == weights.shape == (24,)
    assert weights @ np.exp(nodes) == pytest.approx(math.e - 1.0, rel=1e-14)


@pytest.mark.parametrize("f, lower, upper, expected", [
    (np.exp, 0.0, 1.0, math.e - 1.0),
    (lambda x: 1.0 / np.sqrt(x), 0.0, 1.0, 2.0),
    (lambda x: np.log(x), 0.0, 1.0, -1.0),
    (lambda x: np.sin(x) ** 2, 0.0, 20.0 * math.pi, 10.0 * math.pi),
])
def test_integrate(f, lower, upper, expected):
    result = quadrature.integrate(f, lower, upper, rel_tol=1e-10)
    assert result.value == pytest.approx(expected, rel=1e-9)
    assert result.error <= 1e-9 * abs(expected)
    assert result.evaluations > 0


def test_integrate_keeps_breaks():
    result = quadrature.integrate(np.exp, 0.0, 1.0, breaks=[0.3, 0.6, 2.0])
    assert 0.3 in result.breaks
    assert 0.6 in result.breaks
    assert 2.0 not in result.breaks
    assert result.breaks[0] == 0.0 and result.breaks[-1] == 1.0


def test_empty_interval():
    result = quadrature.integrate(np.exp, 1.0, 1.0)
    assert result.value == 0.0
    assert result.error == 0.0


def test_subdivision_limit():
    with pytest.raises(QuadratureNonconvergenceError) as info:
        quadrature.integrate(lambda x: np.sin(1000.0 * x), 0.0, 100.0, max_subdivisions=4)
    assert info.value.achieved_error > 0.0
    assert isinstance(info.value, ArithmeticError)
    assert info.value.errors['status'] == quadrature.Status.SUBDIVISION_LIMIT


@pytest.mark.parametrize("message, status", [
    ("The maximum number of subdivisions (4) has been achieved.", quadrature.Status.SUBDIVISION_LIMIT),
    ("The occurrence of roundoff error is detected, which prevents the requested tolerance "
     "from being achieved.", quadrature.Status.ROUNDOFF),
    ("The algorithm does not converge.  Roundoff error is detected in the extrapolation table.",
     quadrature.Status.EXTRAPOLATION_ROUNDOFF),
    ("Extremely bad integrand behavior occurs at some points of the integration interval.",
     quadrature.Status.BAD_INTEGRAND),
    ("The integral is probably divergent, or slowly convergent.", quadrature.Status.DIVERGENT),
])
def test_quadpack_messages(message, status):
    assert quadrature._status_of(message, 1.0, 1e-14, 1e-10, 1.0) == status


def test_unknown_message_falls_back_to_the_tolerance():
    assert quadrature._status_of("Abnormal termination", 1e-12, 1e-14, 1e-10, 1.0) == quadrature.Status.CONVERGED
    assert quadrature._status_of("Abnormal termination", 1e-3, 1e-14, 1e-10, 1.0) == quadrature.Status.BAD_INTEGRAND


def test_roundoff_limited_result_is_returned(monkeypatch):
    info = {'neval': 21, 'last': 1, 'alist': np.array([0.0]), 'blist': np.array([1.0])}
    message = "The occurrence of roundoff error is detected"
    monkeypatch.setattr(quadrature.quadpack, 'quad', lambda *args, **kwargs: (2.0, 1e-6, info, message))
    result = quadrature.integrate(np.exp, 0.0, 1.0)
    assert result.value == 2.0
    assert result.error == 1e-6
    assert list(result.breaks) == [0.0, 1.0]
