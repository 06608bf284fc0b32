import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import integrate, special

from src.dodiff import dparam, oracle
from src.dodiff.helper.exceptions import (
    ContourFailure,
    ConvergenceFailure,
    DomainError,
    GridTooCoarseError,
)
from src.dodiff.spectral import SpectralContext, kernel_curve


# ------------------------------------------
# ----------- Special functions ------------
# ------------------------------------------


def test_special_functions():
    assert oracle.erfcx(0.0) == 1.0
    assert oracle.erfcx(1.0) == pytest.approx(0.42758357615580705, rel=1e-14)
    assert oracle.si(math.pi) == pytest.approx(1.8519370519824662, rel=1e-14)
    assert oracle.ci(1.0) == pytest.approx(0.3374039229009681, rel=1e-14)
    assert oracle.si(0.0) == 0.0


@pytest.mark.parametrize("call", [
    lambda: oracle.erfcx(-1.0),
    lambda: oracle.si(-1.0),
    lambda: oracle.ci(0.0),
    lambda: oracle.mittag_leffler(0.0, -1.0),
    lambda: oracle.mittag_leffler(1.2, -1.0),
    lambda: oracle.mittag_leffler(0.5, 1.0),
    lambda: oracle.laplace_invert(lambda s: 1.0 / s, 0.0),
])
def test_domain_errors(call):
    with pytest.raises(DomainError):
        call()


# ------------------------------------------
# ------------- Mittag-Leffler -------------
# ------------------------------------------


def test_mittag_leffler_special_orders():
    assert oracle.mittag_leffler(0.3, 0.0) == 1.0
    assert oracle.mittag_leffler(1.0, -2.0) == pytest.approx(math.exp(-2.0), rel=1e-15)
    assert oracle.mittag_leffler(0.5, -1.0) == pytest.approx(special.erfcx(1.0), rel=1e-15)


@pytest.mark.parametrize("mu, x", [
    (0.25, -0.1), (0.25, -1.0), (0.5, -1.0), (0.75, -0.1), (0.75, -4.0), (0.9, -4.0),
])
def test_series_agrees_with_integral(mu, x):
    series = oracle.mittag_leffler_series(mu, x)
    assert oracle.mittag_leffler_integral(mu, x) == pytest.approx(series, rel=1e-10)


@pytest.mark.parametrize("mu", [0.3, 0.7])
def test_large_arguments_use_integral(mu):
    x = -50.0
    value = oracle.mittag_leffler(mu, x)
    assert value == oracle.mittag_leffler_integral(mu, x)
    # E_μ(−z) ~ z^{-1}/Γ(1 − μ) as z → ∞
    assert value == pytest.approx(1.0 / (50.0 * special.gamma(1.0 - mu)), rel=0.05)


@pytest.mark.parametrize("mu", [0.95, 0.99])
def test_integral_near_order_one(mu):
    z = math.pi ** 2 * 1e6 ** mu
    # E_μ(−z) = 1/(zΓ(1 − μ)) − 1/(z²Γ(1 − 2μ)) + O(z⁻³)
    expected = 1.0 / (z * special.gamma(1.0 - mu)) - 1.0 / (z * z * special.gamma(1.0 - 2.0 * mu))
    assert oracle.mittag_leffler_integral(mu, -z) == pytest.approx(expected, rel=1e-6)
    assert oracle.mittag_leffler(mu, -z) == pytest.approx(expected, rel=1e-6)


@pytest.mark.parametrize("mu", [0.5, 0.75, 0.9])
@pytest.mark.parametrize("x", np.linspace(-4.0, -6.0, 5))
def test_no_jump_where_the_series_hands_over(mu, x):
    assert oracle.mittag_leffler(mu, x) == pytest.approx(oracle.mittag_leffler_integral(mu, x), rel=1e-9)


def test_integral_reports_poor_accuracy(monkeypatch):
    monkeypatch.setattr(oracle.integrate, 'quad', lambda *args, **kwargs: (1.0, 1.0, {}))
    with pytest.raises(ConvergenceFailure) as info:
        oracle.mittag_leffler_integral(0.7, -10.0)
    assert info.value.achieved_bound == pytest.approx(1.0)


def test_mittag_leffler_is_decreasing():
    values = [oracle.mittag_leffler(0.6, -x) for x in np.linspace(0.0, 20.0, 41)]
    assert np.all(np.diff(values) < 0.0)
    assert values[-1] > 0.0


def test_series_term_cap():
    with pytest.raises(ConvergenceFailure) as info:
        oracle.mittag_leffler_series(0.3, -5.0, max_terms=10)
    assert info.value.achieved_bound > 1.0


# ------------------------------------------
# ----------- Laplace transforms -----------
# ------------------------------------------


def test_laplace_symbol():
    half = complex(oracle.laplace_symbol(dparam.delta((1.0, 0.5)), 4.0))
    assert half.real == pytest.approx(2.0, rel=1e-14)
    assert abs(half.imag) < 1e-15
    assert complex(oracle.laplace_symbol(dparam.band(0.2, 0.8), 1.0)).real == pytest.approx(1.0, rel=1e-14)
    s = np.array([0.5 + 1.0j, 3.0 - 2.0j])
    band = dparam.band(0.2, 0.8, weight=2.0)
    expected = 2.0 / 0.6 * (s ** 0.8 - s ** 0.2) / np.log(s)
    assert np.allclose(oracle.laplace_symbol(band, s), expected, rtol=1e-13, atol=0.0)


def test_laplace_invert_exponential():
    for t_value in (0.1, 1.0, 5.0):
        value = oracle.laplace_invert(lambda s: 1.0 / (s + 1.0), t_value)
        assert value == pytest.approx(math.exp(-t_value), rel=1e-8)


def test_laplace_invert_kernel_transform():
    transform = oracle.kernel_transform(dparam.delta((1.0, 0.5)), math.pi)
    for t_value in (0.1, 1.0):
        expected = special.erfcx(math.pi ** 2 * math.sqrt(t_value))
        assert oracle.laplace_invert(transform, t_value) == pytest.approx(expected, rel=1e-6)


def test_laplace_invert_reports_failure():
    with pytest.raises(ContourFailure):
        oracle.laplace_invert(lambda s: np.full(np.shape(s), np.nan, dtype=complex), 1.0)


# ------------------------------------------
# ------------ Classical oracle ------------
# ------------------------------------------


def test_gaussian_heat_solution():
    x = np.linspace(-10.0, 10.0, 2001)
    initial = oracle.gaussian_heat_solution(x, 0.0, 0.5)
    assert np.allclose(initial, np.exp(-x ** 2 / 0.5), rtol=1e-15)
    later = oracle.gaussian_heat_solution(x, 1.0, 0.5)
    assert integrate.trapezoid(later, x) == pytest.approx(integrate.trapezoid(initial, x), rel=1e-8)
    assert later.max() < 1.0


# ------------------------------------------
# ----------- Time-domain check ------------
# ------------------------------------------


def test_graded_grid():
    assert np.allclose(oracle.graded_grid(1.0, 5), [0.0, 1.0 / 16.0, 0.25, 9.0 / 16.0, 1.0])
    with pytest.raises(ValueError):
        oracle.graded_grid(1.0, 2)


@pytest.mark.parametrize("nu", [0.3, 0.5, 0.8])
def test_l1_derivative_is_exact_for_linear_functions(nu):
    times = np.linspace(0.0, 2.0, 21)
    derivative = oracle.l1_caputo_derivative(times, 3.0 * times, nu)
    midpoints = 0.5 * (times[:-1] + times[1:])
    expected = 3.0 * midpoints ** (1.0 - nu) / special.gamma(2.0 - nu)
    assert np.allclose(derivative, expected, rtol=1e-12, atol=0.0)


def test_l1_derivative_of_order_one():
    times = np.array([0.0, 1.0, 3.0])
    assert np.allclose(oracle.l1_caputo_derivative(times, np.array([1.0, 2.0, 6.0]), 1.0), [1.0, 2.0])


def test_residual_of_classical_kernel():
    times = np.linspace(0.0, 1.0, 1001)
    curve = SimpleNamespace(times=times, values=np.exp(-math.pi ** 2 * times))
    C = dparam.delta((1.0, 1.0))
    assert oracle.caputo_residual(C, math.pi, curve) < 1e-4

    wrong = SimpleNamespace(times=times, values=np.exp(-2.0 * math.pi ** 2 * times))
    assert oracle.caputo_residual(C, math.pi, wrong) > 0.5


def test_residual_of_half_order_kernel():
    times = oracle.graded_grid(1.0, 2001)
    values = special.erfcx(math.pi ** 2 * np.sqrt(times))
    curve = SimpleNamespace(times=times, values=values)
    assert oracle.caputo_residual(dparam.single_order(0.5), math.pi, curve, t_min=0.05) < 1e-3


def test_residual_of_band_kernel_converges():
    C = dparam.band(0.3, 0.7)
    times = oracle.graded_grid(1.0, 2001)
    curve = kernel_curve(SpectralContext(C, math.pi), times)
    fine = oracle.caputo_residual(C, math.pi, curve, t_min=0.05)
    coarse = oracle.caputo_residual(C, math.pi, SimpleNamespace(times=times[::2], values=curve.values[::2]),
                                    t_min=0.05)
    assert fine < 1e-3
    # L1 error falls like Δt^{2 − ν} with ν ≤ 0.7
    assert coarse > 1.5 * fine


def test_residual_needs_a_curve_from_zero():
    times = np.linspace(0.1, 1.0, 10)
    curve = SimpleNamespace(times=times, values=np.exp(-times))
    with pytest.raises(ValueError):
        oracle.caputo_residual(dparam.single_order(0.5), math.pi, curve)


def test_residual_grid_too_coarse():
    times = oracle.graded_grid(1.0, 41)
    curve = SimpleNamespace(times=times, values=special.erfcx(math.pi ** 2 * np.sqrt(times)))
    with pytest.raises(GridTooCoarseError) as info:
        oracle.caputo_residual(dparam.single_order(0.5), math.pi, curve, tol=1e-12)
    assert info.value.errors['estimate'] > 1e-12
