import math

import numpy as np
import pytest
from scipy import integrate

from src.dodiff import dparam
from src.dodiff.helper.exceptions import (
    EmptySupportError,
    InvalidDiffusionParameterError,
    NegativeWeightError,
    NormalizationError,
    SupportOutOfRangeError,
)
from tests.common.fixtures import parameter_suite


def _direct(C, r, shape, theta=math.pi):
    """
    ∫C(μ) r^μ shape(θμ) dμ by QUADPACK, straight from the density
    """
    if C.kind == dparam.Kind.BAND:
        density = lambda mu: C.density
        lower, upper = C.nu1, C.nu2
    else:
        density = lambda mu: float(np.interp(mu, C.nodes, C.values))
        lower, upper = C.nodes[0], C.nodes[-1]
    return integrate.quad(lambda mu: density(mu) * r ** mu * shape(theta * mu), lower, upper,
                          epsabs=0.0, epsrel=1e-13, limit=200,
                          points=None if C.kind == dparam.Kind.BAND else C.nodes[1:-1])[0]


# ------------------------------------------
# --------------- Validation ---------------
# ------------------------------------------


def test_valid_parameters():
    assert dparam.validate(dparam.delta((1.0, 0.5)))
    assert dparam.validate(dparam.band(0.2, 0.8))
    assert dparam.validate(dparam.delta((1.0, 1.0)))


@pytest.mark.parametrize("build, error", [
    (lambda: dparam.delta((-1.0, 0.5)), NegativeWeightError),
    (lambda: dparam.delta(), EmptySupportError),
    (lambda: dparam.delta((0.0, 0.5)), EmptySupportError),
    (lambda: dparam.delta((1.0, 0.0)), SupportOutOfRangeError),
    (lambda: dparam.delta((1.0, 1.2)), SupportOutOfRangeError),
    (lambda: dparam.band(0.8, 0.2), SupportOutOfRangeError),
    (lambda: dparam.band(0.0, 0.5), SupportOutOfRangeError),
    (lambda: dparam.band(0.2, 0.8, weight=-1.0), NegativeWeightError),
    (lambda: dparam.band(0.2, 0.8, weight=2.0, normalized=True), NormalizationError),
    (lambda: dparam.tabulated((0.1, 0.5), (1.0, -0.5)), NegativeWeightError),
    (lambda: dparam.tabulated((0.1, 0.5), (0.0, 0.0)), EmptySupportError),
    (lambda: dparam.tabulated((0.0, 0.5), (1.0, 1.0)), SupportOutOfRangeError),
    (lambda: dparam.tabulated((0.5, 0.4), (1.0, 1.0)), SupportOutOfRangeError),
    (lambda: dparam.tabulated((0.5,), (1.0,)), InvalidDiffusionParameterError),
    (lambda: dparam.two_order_mixture(1.5, 0.3, 0.7), InvalidDiffusionParameterError),
])
def test_invalid_parameters(build, error):
    with pytest.raises(error):
        build()


def test_errors_carry_details():
    with pytest.raises(NegativeWeightError) as info:
        dparam.delta((-2.0, 0.4))
    assert info.value.errors == {'weight': -2.0, 'order': 0.4}


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        dparam.band(0.5, 0.5)


def test_normalized_constructors():
    assert dparam.two_order_mixture(0.25, 0.3, 0.7).normalized
    assert dparam.band(0.2, 0.8, normalized=True).weight == 1.0
    assert dparam.single_order(0.5, c=4.0).components == ((0.25, 0.5),)


def test_parameters_are_hashable_and_immutable():
    C = dparam.band(0.2, 0.8)
    assert hash(C) == hash(dparam.band(0.2, 0.8))
    with pytest.raises(AttributeError):
        C.nu1 = 0.1


# ------------------------------------------
# ---------------- Moments -----------------
# ------------------------------------------


def test_moments_of_single_delta():
    moments = dparam.moments(dparam.delta((1.0, 0.5)))
    assert moments.M == pytest.approx(1.0, abs=1e-15)
    assert moments.C_tilde == 1.0
    assert moments.C_hat is None


def test_moments_of_band():
    moments = dparam.moments(dparam.band(0.2, 0.8))
    assert moments.C_tilde == 1.0
    assert moments.C_hat == pytest.approx(math.sqrt(1.0 / 0.6), rel=1e-14)
    assert moments.M == pytest.approx((math.cos(0.2 * math.pi) - math.cos(0.8 * math.pi)) / (0.6 * math.pi),
                                      rel=1e-13)


def test_moments_of_nearly_uniform_density():
    moments = dparam.moments(dparam.band(1e-9, 1.0))
    assert moments.M == pytest.approx(2.0 / math.pi, rel=1e-8)


def test_moments_of_tabulated_density():
    C = dparam.tabulated((0.1, 0.4, 0.6, 0.9), (0.5, 1.5, 1.5, 0.5))
    moments = dparam.moments(C)
    assert moments.C_tilde == pytest.approx(0.3 * 1.0 * 2 + 0.2 * 1.5, rel=1e-14)
    assert moments.M == pytest.approx(_direct(C, 1.0, math.sin), rel=1e-12)
    squared = integrate.quad(lambda mu: np.interp(mu, C.nodes, C.values) ** 2, 0.1, 0.9,
                             points=[0.4, 0.6], epsabs=0.0, epsrel=1e-13)[0]
    assert moments.C_hat == pytest.approx(math.sqrt(squared), rel=1e-12)


# ------------------------------------------
# ------------ Spectral functions ----------
# ------------------------------------------


def test_eval_h_and_g_of_single_delta():
    C = dparam.delta((1.0, 0.5))
    assert dparam.eval_h(C, 4.0) == pytest.approx(2.0, rel=1e-15)
    assert dparam.eval_g(C, 4.0, math.pi) == pytest.approx(math.pi ** 2, rel=1e-15)


def test_band_at_unit_radius():
    C = dparam.band(0.2, 0.8)
    expected_h = (math.cos(0.2 * math.pi) - math.cos(0.8 * math.pi)) / (0.6 * math.pi)
    assert dparam.eval_h(C, 1.0) == pytest.approx(expected_h, rel=1e-14)
    assert dparam.eval_g(C, 1.0, math.pi) == pytest.approx(math.pi ** 2, rel=1e-14)


def test_values_at_zero(parameter_suite):
    for C in parameter_suite:
        assert dparam.eval_h(C, 0.0) == 0.0
        assert dparam.eval_g(C, 0.0, 2.0 * math.pi) == pytest.approx(4.0 * math.pi ** 2, rel=1e-15)


def test_eval_h_is_positive_and_increasing(parameter_suite):
    r = np.logspace(-8, 8, 161)
    for C in parameter_suite:
        h = dparam.eval_h(C, r)
        assert np.all(h > 0.0)
        assert np.all(np.diff(h) > 0.0)


def test_scaling(parameter_suite):
    r = np.logspace(-3, 3, 13)
    for C in parameter_suite:
        assert np.allclose(dparam.eval_h(dparam.scaled(C, 2.5), r), 2.5 * dparam.eval_h(C, r),
                           rtol=1e-13, atol=0.0)


@pytest.mark.parametrize("r", [1e-6, 1e-3, 0.5, 1.0, 1.0 + 1e-9, 2.0, 1e3, 1e6])
@pytest.mark.parametrize("C", [
    dparam.band(0.2, 0.8),
    dparam.band(0.5, 0.9, weight=3.0),
    dparam.tabulated((0.1, 0.4, 0.6, 0.9), (0.5, 1.5, 1.5, 0.5)),
])
def test_closed_forms_match_quadrature(C, r):
    cos_part, sin_part = C.trig_moments(np.array(r))
    scale = _direct(C, r, lambda x: 1.0)
    assert abs(float(cos_part) - _direct(C, r, math.cos)) <= 1e-10 * scale
    assert abs(float(sin_part) - _direct(C, r, math.sin)) <= 1e-10 * scale


@pytest.mark.parametrize("theta", [1e-4, 0.3, 1.5, 3.0])
def test_sin_weighted_matches_quadrature(theta):
    C = dparam.band(0.2, 0.8)
    for r in (1e-2, 1.0, 1e2):
        expected = _direct(C, r, math.sin, theta)
        assert dparam.eval_sin_weighted(C, r, theta) == pytest.approx(expected, rel=1e-10)


def test_pole_freeness(parameter_suite):
    thetas = np.linspace(0.0, math.pi, 42)[1:-1]
    r = np.logspace(-4, 4, 41)
    for C in parameter_suite:
        for theta in thetas:
            assert np.all(dparam.eval_sin_weighted(C, r, theta) > 0.0)


def test_order_quadrature_integrates_smooth_functions(parameter_suite):
    for C in parameter_suite:
        nodes, weights = dparam.order_quadrature(C)
        assert np.sum(weights) == pytest.approx(dparam.moments(C).C_tilde, rel=1e-12)
        assert weights @ np.sin(np.pi * nodes) == pytest.approx(dparam.moments(C).M, rel=1e-10)


def test_array_and_scalar_outputs():
    C = dparam.band(0.2, 0.8)
    assert isinstance(dparam.eval_h(C, 2.0), float)
    assert dparam.eval_h(C, [1.0, 2.0]).shape == (2,)


# ------------------------------------------
# -------------- Serialisation -------------
# ------------------------------------------


@pytest.mark.parametrize("C", [
    dparam.delta((0.5, 0.3), (0.5, 0.7), normalized=True),
    dparam.band(0.2, 0.8, weight=2.0),
    dparam.tabulated((0.1, 0.5, 0.9), (0.0, 2.0, 0.0)),
])
def test_from_dict_inverts_to_dict(C):
    assert dparam.from_dict(C.to_dict()) == C


@pytest.mark.parametrize("doc", [
    {"nu1": 0.2, "nu2": 0.8},
    {"type": "gamma", "shape": 2},
    {"type": "band", "nu1": 0.2},
    {"type": "delta", "components": [[1.0]]},
])
def test_from_dict_rejects_malformed(doc):
    with pytest.raises(InvalidDiffusionParameterError):
        dparam.from_dict(doc)
