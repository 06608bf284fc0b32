"""
Ground truth used to check the spectral kernel. Nothing here calls into
spectral.py: the Mittag-Leffler function is summed in extended precision
or integrated with QUADPACK, the Laplace transform is inverted on a
Talbot contour, and the time-domain check discretises the Caputo
derivative directly.
"""
import math
import typing as t

import mpmath
import numpy as np
from scipy import integrate, special

from .dparam import DiffusionParameter, Kind
from .helper.exceptions import (
    ContourFailure,
    ConvergenceFailure,
    DomainError,
    GridTooCoarseError,
)
from .helper.util import get_logger
from .helper.validation import check_positive, check_real

logger = get_logger(__name__)

# |x| at which mittag_leffler switches from the power series to the integral
SERIES_LIMIT = 5.0
MAX_SERIES_TERMS = 200
INTEGRAL_REL_TOL = 1e-10
# exp(−v^{1/μ}) underflows past this exponent
INTEGRAL_EXPONENT_LIMIT = 745.0
# Largest tolerated ratio between the biggest Talbot summand and the result
CANCELLATION_BUDGET = 1e12


def _check_order(mu: float) -> float:
    mu = check_real('mu', mu)
    if not 0.0 < mu <= 1.0:
        raise DomainError(f"Mittag-Leffler order must lie in (0, 1]. Got: {mu}")
    return mu


def _check_argument(x: float) -> float:
    x = check_real('x', x)
    if x > 0.0:
        raise DomainError(f"Only the negative real axis is supported. Got x = {x}")
    return x


# ------------------------------------------
# ----------- Special functions ------------
# ------------------------------------------


def erfcx(x: float) -> float:
    """
    Scaled complementary error function e^{x²}erfc(x), x ≥ 0
    """
    x = check_real('x', x)
    if x < 0.0:
        raise DomainError(f"erfcx is only needed for x >= 0. Got: {x}")
    return float(special.erfcx(x))


def si(x: float) -> float:
    """
    Si(x) = ∫₀ˣ sin(u)/u du
    """
    x = check_real('x', x)
    if x < 0.0:
        raise DomainError(f"si expects x >= 0. Got: {x}")
    return float(special.sici(x)[0])


def ci(x: float) -> float:
    """
    Ci(x) = γ + ln x + ∫₀ˣ (cos u − 1)/u du, x > 0
    """
    x = check_real('x', x)
    if x <= 0.0:
        raise DomainError(f"ci expects x > 0. Got: {x}")
    return float(special.sici(x)[1])


def mittag_leffler(mu: float, x: float, max_terms: int = MAX_SERIES_TERMS) -> float:
    """
    E_μ(x) = Σ x^k / Γ(μk + 1) on the negative real axis.

    μ = 1 and μ = ½ use exp and erfcx. Otherwise the power series is used
    for |x| ≤ 5 when it converges within max_terms, and the integral
    representation everywhere else.

    Args:
        mu: Order in (0, 1]
        x: Argument, x ≤ 0
        max_terms: Term cap of the power series

    Returns:
        E_μ(x) in (0, 1]
    """
    mu = _check_order(mu)
    x = _check_argument(x)
    if x == 0.0:
        return 1.0
    if mu == 1.0:
        return math.exp(x)
    if mu == 0.5:
        return float(special.erfcx(-x))
    if -x <= SERIES_LIMIT:
        try:
            return mittag_leffler_series(mu, x, max_terms)
        except ConvergenceFailure as failure:
            logger.debug(f"E_{mu}({x}): series stalled at bound {failure.achieved_bound:.2e}, "
                         f"using the integral representation")
    return mittag_leffler_integral(mu, x)


def mittag_leffler_series(mu: float, x: float,
                          max_terms: int = MAX_SERIES_TERMS,
                          rel_tol: float = 1e-16) -> float:
    """
    Power series of E_μ(x) summed with mpmath.

    The terms alternate in sign, so once their magnitudes decrease the
    first omitted term bounds the remainder. The working precision is
    raised by the number of digits the largest term costs in cancellation.

    Raises:
        ConvergenceFailure: no remainder bound below rel_tol within max_terms
    """
    mu = _check_order(mu)
    x = _check_argument(x)
    if x == 0.0:
        return 1.0

    k = np.arange(max_terms + 1)
    log10_terms = (k * math.log(-x) - special.gammaln(mu * k + 1.0)) / math.log(10.0)
    peak = int(np.argmax(log10_terms))
    digits_lost = max(0.0, float(log10_terms[peak]))

    # Cheap rejection before going to extended precision: |E_μ(x)| ≤ 1, so a
    # last term above rel_tol cannot meet the relative bound
    if log10_terms[-1] > math.log10(rel_tol):
        raise ConvergenceFailure(f"Mittag-Leffler series for mu={mu}, x={x} did not converge "
                                 f"within {max_terms} terms",
                                 achieved_bound=10.0 ** min(float(log10_terms[-1]), 300.0))

    with mpmath.workdps(int(25 + digits_lost)):
        argument = mpmath.mpf(x)
        terms = []
        partial = mpmath.mpf(0)
        for index in range(max_terms + 1):
            term = argument ** index / mpmath.gamma(mu * index + 1)
            if index > peak and abs(term) <= rel_tol * abs(partial):
                return float(mpmath.fsum(terms))
            terms.append(term)
            partial += term
        bound = float(abs(terms[-1]) / abs(partial)) if partial != 0 else math.inf
    raise ConvergenceFailure(f"Mittag-Leffler series for mu={mu}, x={x} did not reach "
                             f"relative bound {rel_tol} within {max_terms} terms",
                             achieved_bound=bound)


def mittag_leffler_integral(mu: float, x: float, rel_tol: float = INTEGRAL_REL_TOL) -> float:
    """
    E_μ(−z) = sin(μπ)/(μπ) ∫₀^∞ exp(−z^{1/μ} u^{1/μ}) / (u² + 2u cos(μπ) + 1) du,
    valid for 0 < μ < 1 and z ≥ 0.

    After v = zu the exponential lives on v ~ 1 whatever z is, and the
    denominator (v/z + cos μπ)² + sin²μπ peaks at v = −z cos μπ with
    half-width z sin μπ. Both scales become break points. Past
    v^{1/μ} = INTEGRAL_EXPONENT_LIMIT the integrand is zero in double precision.

    Raises:
        ConvergenceFailure: the summed QUADPACK error estimate exceeds rel_tol
    """
    mu = _check_order(mu)
    x = _check_argument(x)
    if x == 0.0:
        return 1.0
    if mu == 1.0:
        return math.exp(x)

    z = -x
    inverse = 1.0 / mu
    cos_mu_pi = math.cos(mu * math.pi)
    sin_mu_pi = math.sin(mu * math.pi)
    v_max = INTEGRAL_EXPONENT_LIMIT ** mu

    def integrand(v):
        ratio = v / z
        return math.exp(-v ** inverse) / (ratio * ratio + 2.0 * ratio * cos_mu_pi + 1.0)

    peak = -z * cos_mu_pi
    candidates = (1.0, z, peak - z * sin_mu_pi, peak, peak + z * sin_mu_pi)
    edges = [0.0] + sorted({c for c in candidates if 0.0 < c < v_max}) + [v_max]

    total, error = 0.0, 0.0
    for lower, upper in zip(edges[:-1], edges[1:]):
        result = integrate.quad(integrand, lower, upper, epsabs=0.0, epsrel=1e-13,
                                limit=200, full_output=1)
        total += result[0]
        error += result[1]
    if not error <= rel_tol * abs(total):
        achieved = error / abs(total) if total else math.inf
        raise ConvergenceFailure(f"Mittag-Leffler integral for mu={mu}, x={x} reached relative "
                                 f"error {achieved:.2e}, above {rel_tol:g}",
                                 achieved_bound=achieved)
    return sin_mu_pi / (mu * math.pi) * total / z


# ------------------------------------------
# ----------- Laplace transforms -----------
# ------------------------------------------


def laplace_symbol(C: DiffusionParameter, s: np.ndarray) -> np.ndarray:
    """
    Φ(s) = ∫C(ν) s^ν dν on the principal branch, for complex s off the
    negative real axis.
    """
    s = np.asarray(s, dtype=complex)
    log_s = np.log(s)
    if C.kind == Kind.BAND:
        # ∫ e^{νℓ} dν = (e^{ν₂ℓ} − e^{ν₁ℓ})/ℓ, expanded when ℓ is tiny
        width = C.nu2 - C.nu1
        small = np.abs(log_s) < 1e-6
        safe_log = np.where(small, 1.0, log_s)
        exact = (np.exp(C.nu2 * safe_log) - np.exp(C.nu1 * safe_log)) / safe_log
        series = width + log_s * (C.nu2 ** 2 - C.nu1 ** 2) / 2.0 \
            + log_s ** 2 * (C.nu2 ** 3 - C.nu1 ** 3) / 6.0
        return C.density * np.where(small, series, exact)
    nodes, weights = C.order_quadrature()
    return np.exp(log_s[..., None] * nodes) @ weights


def kernel_transform(C: DiffusionParameter, kappa: float) -> t.Callable[[np.ndarray], np.ndarray]:
    """
    Laplace transform of the time kernel, b(s) = Φ(s) / (s (Φ(s) + κ²))
    """
    kappa_sq = check_positive('kappa', kappa) ** 2

    def transform(s):
        symbol = laplace_symbol(C, s)
        return symbol / (np.asarray(s) * (symbol + kappa_sq))
    return transform


def laplace_invert(transform: t.Callable[[np.ndarray], np.ndarray],
                   t_value: float,
                   degree: int = 32) -> float:
    """
    Fixed Talbot inversion of a Laplace transform.

    Nodes s_k = (r/t)θ_k(cot θ_k + i), θ_k = kπ/degree, r = 2·degree/5.
    The contour encloses the negative real axis, so transforms with a
    branch cut there are handled.

    Args:
        transform: Vectorised callable accepting complex arrays
        t_value: Time, t > 0
        degree: Number of contour nodes

    Raises:
        ContourFailure: result not finite or swamped by cancellation
    """
    t_value = check_real('t', t_value)
    if t_value <= 0.0:
        raise DomainError(f"Laplace inversion needs t > 0. Got: {t_value}")

    shift = 2.0 * degree / 5.0
    theta = np.arange(1, degree) * np.pi / degree
    cot = 1.0 / np.tan(theta)
    nodes = shift / t_value * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot

    first = 0.5 * np.exp(shift) * np.real(np.asarray(transform(np.array([shift / t_value + 0j])))[0])
    summands = np.real(np.exp(t_value * nodes) * np.asarray(transform(nodes)) * (1.0 + 1j * sigma))
    result = shift / degree * (first + float(np.sum(summands))) / t_value

    largest = max(abs(first), float(np.max(np.abs(summands)))) * shift / (degree * t_value)
    if not np.isfinite(result):
        raise ContourFailure(f"Talbot inversion at t = {t_value} is not finite",
                             errors={'t': t_value, 'degree': degree})
    if largest > CANCELLATION_BUDGET * abs(result):
        raise ContourFailure(f"Talbot inversion at t = {t_value} lost its significant digits: "
                             f"largest term {largest:.3e}, result {result:.3e}",
                             errors={'t': t_value, 'degree': degree})
    return float(result)


# ------------------------------------------
# ------------ Classical oracle ------------
# ------------------------------------------


def gaussian_heat_solution(x: np.ndarray, t_value: float, width: float,
                           center: float = 0.0, diffusivity: float = 1.0) -> np.ndarray:
    """
    Solution of u_t = D u_xx on the line with u(x, 0) = exp(−(x − c)²/(2w²))
    """
    variance = width * width + 2.0 * diffusivity * t_value
    x = np.asarray(x, dtype=float)
    return width / np.sqrt(variance) * np.exp(-(x - center) ** 2 / (2.0 * variance))


# ------------------------------------------
# ----------- Time-domain check ------------
# ------------------------------------------


def graded_grid(t_max: float, count: int, exponent: float = 2.0) -> np.ndarray:
    """
    t_j = t_max (j / (count − 1))^exponent, clustered towards t = 0
    """
    t_max = check_positive('t_max', t_max)
    if count < 3:
        raise ValueError(f"A graded grid needs at least 3 points. Got: {count}")
    return t_max * (np.arange(count) / (count - 1)) ** exponent


def l1_caputo_derivative(times: np.ndarray, values: np.ndarray, nu: float) -> np.ndarray:
    """
    Caputo derivative of order ν of the piecewise-linear interpolant of
    (times, values), evaluated at the interval midpoints.

    Each linear piece contributes its slope times the exact fractional
    integral of the kernel (t − s)^{−ν}/Γ(1 − ν) over the piece.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    slopes = np.diff(values) / np.diff(times)
    if nu == 1.0:
        return slopes

    midpoints = 0.5 * (times[:-1] + times[1:])
    exponent = 1.0 - nu
    # lag[n, k] = t*_n − t_k
    lag = midpoints[:, None] - times[None, :]
    reach = np.maximum(lag, 0.0) ** exponent
    weights = reach[:, :-1] - reach[:, 1:]
    return weights @ slopes / special.gamma(2.0 - nu)


def _relative_residual(C: DiffusionParameter, kappa_sq: float,
                       times: np.ndarray, values: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    nodes, weights = C.order_quadrature()
    derivative = np.zeros(times.size - 1)
    for nu, weight in zip(nodes, weights):
        derivative += weight * l1_caputo_derivative(times, values, nu)
    midpoint_values = 0.5 * (values[:-1] + values[1:])
    residual = (derivative + kappa_sq * midpoint_values) / (kappa_sq * midpoint_values)
    return 0.5 * (times[:-1] + times[1:]), residual


def caputo_residual(C: DiffusionParameter,
                    kappa: float,
                    curve: t.Any,
                    t_min: float = None,
                    tol: float = None) -> float:
    """
    Max relative residual of ∫C(ν) D_t^ν B dν + κ² B = 0 on a sampled curve.

    Args:
        C: Diffusion parameter
        kappa: Mode wavenumber
        curve: Object with 'times' (starting at 0) and 'values' (B(0) = 1)
        t_min: Residuals before t_min are ignored. The t^ν behaviour of B
            near 0 cannot be captured by a linear interpolant there.
            Defaults to 1% of the last time.
        tol: If given, raise GridTooCoarseError when the estimated
            discretisation error of the residual exceeds it

    Returns:
        max |residual| / (κ² B) over the midpoints at or after t_min
    """
    kappa_sq = check_positive('kappa', kappa) ** 2
    times = np.asarray(curve.times, dtype=float)
    values = np.asarray(curve.values, dtype=float)
    if times.size < 5 or times[0] != 0.0 or abs(values[0] - 1.0) > 1e-6:
        raise ValueError("caputo_residual needs a curve sampled from t = 0 with B(0) = 1 "
                         "and at least 5 points")
    if t_min is None:
        t_min = 1e-2 * times[-1]

    midpoints, residual = _relative_residual(C, kappa_sq, times, values)
    fine = float(np.max(np.abs(residual[midpoints >= t_min])))

    if tol is not None:
        coarse_midpoints, coarse_residual = _relative_residual(C, kappa_sq, times[::2], values[::2])
        coarse = float(np.max(np.abs(coarse_residual[coarse_midpoints >= t_min])))
        order = 2.0 - float(np.max(C.order_quadrature()[0]))
        estimate = abs(coarse - fine) / (2.0 ** order - 1.0)
        if estimate > tol:
            raise GridTooCoarseError(f"L1 error estimate {estimate:.3e} exceeds tolerance {tol:.3e} "
                                     f"on a {times.size}-point grid",
                                     errors={'estimate': estimate, 'residual': fine})
    return fine
