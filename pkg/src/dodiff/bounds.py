"""
Upper and lower envelopes of the central integral

    I(t) = ∫₀^∞ (e^{−rt}/r) h(r)/(g(r)² + h(r)²) dr = π B(t)/κ²

and comparisons of the decay produced by two diffusion parameters.

Upper:  h(r)/r ≤ M on [1, ∞), g² + h² ≥ m and, when every order is at
least ½, h(r)/r ≤ C̃ r^{−½} ≤ C̃(r − ln r)/√r on (0, 1] give

    U(t) = (C̃/m) J(t) + (M/m) e^{−t}/t,   J(t) = ∫₀¹ e^{−rt}(r − ln r)/√r dr

Orders below ½ make h(r)/r grow like r^{ν_min − 1} at the origin. The
envelope then fails near r = 0 and U(t) drops below I(t) at late times.

Lower:  h(r) ≥ M r e^{−r} and g² + h² ≤ Ω²r² + ω⁴ (density-type C only) give

    L(t) = M ∫₀^∞ e^{−r(t+1)}/(Ω²r² + ω⁴) dr
         = M/(Ω²a) [sin(ap)Ci(ap) + cos(ap)(π/2 − Si(ap))],  a = ω²/Ω, p = t + 1
"""
import math
import typing as t
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from . import dparam
from .debug import log_trace
from .dparam import DiffusionParameter
from .helper.exceptions import DeltaUnsupportedError, DomainError
from .helper.util import compensated_sum, get_logger
from .helper.validation import check_non_negative, check_positive
from .oracle import ci, si
from .spectral import DEFAULT_QUADRATURE, QuadratureSpec, SpectralContext, kernel, kernel_curve

logger = get_logger(__name__)

# Scan used to locate the minimum of g² + h²
SCAN_RANGE = (1e-8, 1e8)
SCAN_POINTS = 2001
# Default r grid of the pointwise sufficient condition
CONDITION_RANGE = (1e-6, 1e6)
CONDITION_POINTS = 200
SERIES_TERMS = 60
# Lowest order for which the small-r envelope of h(r)/r holds
ENVELOPE_MIN_ORDER = 0.5


class LowerMethod:
    QUADRATURE = 'quadrature'
    CLOSED_FORM = 'closed_form'


class EnvelopeForm:
    HOLDER = 'holder'
    RELAXED = 'relaxed'
    QUADRATIC = 'quadratic'


@dataclass(frozen=True)
class BoundsReport:
    kappa: float
    m: float
    r0: float
    # Minimum built from the minimiser of g² alone
    m_alternative: float
    # None for delta mixtures
    Omega: t.Optional[float]
    omega_sq: t.Optional[float]
    times: np.ndarray
    central: np.ndarray
    central_error: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    # False when orders below ½ void the upper envelope
    upper_valid: bool = True

    def sandwich_holds(self) -> bool:
        """
        lower ≤ I ≤ upper wherever the envelopes are defined,
        allowing for the quadrature error of I
        """
        slack = self.central_error
        lower_ok = np.isnan(self.lower) | (self.lower <= self.central + slack)
        upper_ok = np.isnan(self.upper) | (self.central - slack <= self.upper)
        return bool(np.all(lower_ok) and np.all(upper_ok))


@dataclass(frozen=True)
class CompareVerdict:
    holds_for_all_sampled_t: bool
    pointwise_margin: np.ndarray
    sufficient_condition_holds: bool
    times: np.ndarray = None
    first: np.ndarray = None
    second: np.ndarray = None
    # Combined quadrature error of each margin
    margin_error: np.ndarray = None

    @property
    def verdict(self) -> str:
        if self.holds_for_all_sampled_t:
            return 'SLOWER(C1)'
        if np.all(self.pointwise_margin < 0.0):
            return 'SLOWER(C2)'
        return 'MIXED'


# -----------------------------------
# -------- Private Functions --------
# -----------------------------------


def _denominator(C: DiffusionParameter, r: np.ndarray, kappa_sq: float) -> np.ndarray:
    cos_part, h = C.trig_moments(r)
    g = cos_part + kappa_sq
    return g * g + h * h


def _require_density(C: DiffusionParameter, operation: str) -> dparam.Moments:
    moments = dparam.moments(C)
    if moments.C_hat is None:
        raise DeltaUnsupportedError(f"{operation} needs a square-integrable density; "
                                    f"got a {C.kind} parameter", errors={'kind': C.kind})
    return moments


def _quadratic_coefficients(C: DiffusionParameter, kappa: float) -> t.Tuple[float, float]:
    """
    (Ω, ω²) of the envelope g² + h² ≤ Ω²r² + (ω²)²
    """
    c_hat = _require_density(C, 'The quadratic envelope').C_hat
    kappa_sq = kappa * kappa
    return math.sqrt(c_hat * c_hat / 3.0 + c_hat * kappa_sq), c_hat + kappa_sq


def _golden_refine(objective: t.Callable[[float], float], grid: np.ndarray, index: int) -> t.Tuple[float, float]:
    """
    Golden-section search in log r around grid[index]
    """
    if index == 0 or index == grid.size - 1:
        return float(grid[index]), objective(math.log(grid[index]))
    bracket = (math.log(grid[index - 1]), math.log(grid[index]), math.log(grid[index + 1]))
    try:
        found = optimize.minimize_scalar(objective, bracket=bracket, method='golden',
                                         options={'xtol': 1e-10})
    except ValueError:
        # Flat neighbourhood, the scan point is as good as it gets
        return float(grid[index]), objective(bracket[1])
    if found.fun <= objective(bracket[1]):
        return math.exp(found.x), float(found.fun)
    return float(grid[index]), objective(bracket[1])


# ------------------------------------------
# ------------ Central integral ------------
# ------------------------------------------


def central_integral(C: DiffusionParameter,
                     kappa: float,
                     t_value: float,
                     q: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """
    I(t) = π B(t)/κ². Equals π/κ², i.e. 1/(n²π) for κ = nπ, at t = 0.
    """
    ctx = SpectralContext(C, kappa)
    value, _ = kernel(ctx, t_value, q)
    return math.pi * value / ctx.kappa_sq


def central_integral_curve(C: DiffusionParameter,
                           kappa: float,
                           times: t.Sequence[float],
                           q: QuadratureSpec = DEFAULT_QUADRATURE) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    I and its error estimate on a sorted grid of times
    """
    ctx = SpectralContext(C, kappa)
    curve = kernel_curve(ctx, times, q)
    factor = math.pi / ctx.kappa_sq
    return factor * curve.values, factor * curve.abs_err_estimates


# ------------------------------------------
# ---------- Denominator minimum -----------
# ------------------------------------------


def find_m(C: DiffusionParameter, kappa: float) -> t.Tuple[float, float]:
    """
    Global minimum of g(r)² + h(r)² over r ≥ 0.

    A log-spaced scan over [1e-8, 1e8] is refined by golden-section search
    in log r. The value κ⁴ at r = 0 is always a candidate, so m ≤ κ⁴.

    Returns:
        (m, r0)
    """
    kappa_sq = check_positive('kappa', kappa) ** 2
    grid = np.logspace(math.log10(SCAN_RANGE[0]), math.log10(SCAN_RANGE[1]), SCAN_POINTS)
    values = _denominator(C, grid, kappa_sq)
    index = int(np.argmin(values))

    def objective(log_r):
        return float(_denominator(C, np.array(math.exp(log_r)), kappa_sq))

    r0, m = _golden_refine(objective, grid, index)
    at_zero = kappa_sq * kappa_sq
    if at_zero <= m:
        return at_zero, 0.0
    return m, r0


def find_m_alternative(C: DiffusionParameter, kappa: float) -> t.Tuple[float, float]:
    """
    The two-step construction: locate the minimiser r₀ of g(r)² alone, then
    m = min(κ⁴, g(r₀)² + h(r₀)²). Reported next to find_m; it is not a
    lower bound of g² + h² in general.
    """
    kappa_sq = check_positive('kappa', kappa) ** 2
    grid = np.logspace(math.log10(SCAN_RANGE[0]), math.log10(SCAN_RANGE[1]), SCAN_POINTS)

    def g_squared(log_r):
        cos_part, _ = C.trig_moments(np.array(math.exp(log_r)))
        return float((cos_part + kappa_sq) ** 2)

    cos_grid, _ = C.trig_moments(grid)
    index = int(np.argmin((cos_grid + kappa_sq) ** 2))
    r0, g_min = _golden_refine(g_squared, grid, index)
    if kappa_sq * kappa_sq <= g_min:
        return kappa_sq * kappa_sq, 0.0
    combined = float(_denominator(C, np.array(r0), kappa_sq))
    return min(kappa_sq * kappa_sq, combined), r0


# ------------------------------------------
# --------------- Envelopes ----------------
# ------------------------------------------


def upper_envelope_holds(C: DiffusionParameter) -> bool:
    """
    True when the support of C starts at or above ½, the condition under
    which h_upper_envelope bounds h(r)/r on all of (0, 1]
    """
    return C.nu_min >= ENVELOPE_MIN_ORDER


def h_upper_envelope(C: DiffusionParameter, r):
    """
    C̃(r − ln r)/√r on (0, 1] and M r on [1, ∞). Infinite at r = 0.

    The first piece bounds h(r)/r, the second h(r). The first only holds
    near r = 0 when upper_envelope_holds(C).
    """
    moments = dparam.moments(C)
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        small = moments.C_tilde * (r - np.log(r)) / np.sqrt(r)
    envelope = np.where(r <= 1.0, np.where(r > 0.0, small, np.inf), moments.M * r)
    return float(envelope) if scalar else envelope


def h_lower_envelope(C: DiffusionParameter, r):
    """
    M r e^{−r}, from r^μ ≥ r e^{−r} on μ ∈ [0, 1]
    """
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    envelope = dparam.moments(C).M * r * np.exp(-r)
    return float(envelope) if scalar else envelope


def denominator_envelope(C: DiffusionParameter, kappa: float, r, form: str = EnvelopeForm.QUADRATIC):
    """
    Upper envelopes of g(r)² + h(r)² for density-type C, each looser than the last:

        holder     Ĉ²q + 2Ĉκ²√q + κ⁴,  q = ∫₀¹ r^{2μ}dμ = (r² − 1)/(2 ln r)
        relaxed    Ĉ²(r² + 3)/3 + Ĉκ²(r + 1) + κ⁴
        quadratic  Ω²r² + ω⁴

    Raises:
        DeltaUnsupportedError
    """
    c_hat = _require_density(C, 'denominator_envelope').C_hat
    kappa_sq = check_positive('kappa', kappa) ** 2
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)

    if form == EnvelopeForm.HOLDER:
        with np.errstate(divide='ignore', invalid='ignore'):
            log_r = np.log(r)
            power_mean = np.where(np.abs(log_r) < 1e-8, 1.0 + log_r, (r * r - 1.0) / (2.0 * log_r))
        power_mean = np.where(r > 0.0, power_mean, 0.0)
        envelope = c_hat ** 2 * power_mean + 2.0 * c_hat * kappa_sq * np.sqrt(power_mean) + kappa_sq ** 2
    elif form == EnvelopeForm.RELAXED:
        envelope = c_hat ** 2 * (r * r + 3.0) / 3.0 + c_hat * kappa_sq * (r + 1.0) + kappa_sq ** 2
    elif form == EnvelopeForm.QUADRATIC:
        omega, omega_sq = _quadratic_coefficients(C, kappa)
        envelope = omega * omega * r * r + omega_sq * omega_sq
    else:
        raise ValueError(f"Unknown envelope form '{form}'. Expected one of "
                         f"{[EnvelopeForm.HOLDER, EnvelopeForm.RELAXED, EnvelopeForm.QUADRATIC]}")
    return float(envelope) if scalar else envelope


# ------------------------------------------
# ------------- Upper bound ----------------
# ------------------------------------------


def upper_envelope_integral(t_value: float) -> float:
    """
    J(t) = ∫₀¹ e^{−rt}(r − ln r)/√r dr, evaluated as
    2∫₀¹ e^{−z²t} z² dz − 4∫₀¹ e^{−z²t} ln z dz after r = z².
    J(0) = 14/3.
    """
    t_value = check_non_negative('t', t_value)
    polynomial = integrate.quad(lambda z: math.exp(-z * z * t_value) * z * z, 0.0, 1.0,
                                epsabs=0.0, epsrel=1e-13)[0]
    logarithmic = integrate.quad(lambda z: math.exp(-z * z * t_value), 0.0, 1.0,
                                 weight='alg-loga', wvar=(0.0, 0.0), epsabs=0.0, epsrel=1e-13)[0]
    return 2.0 * polynomial - 4.0 * logarithmic


def upper_series(t_value: float, terms: int = SERIES_TERMS) -> float:
    """
    Σ_k (−t)^k (k² + 2k + 7/4) / (k! (k + 3/2)(k + 1/2)²), the power series of J(t).
    Alternating, so only trustworthy for small t (t ≲ 2).
    """
    t_value = check_non_negative('t', t_value)
    summands = []
    power = 1.0
    for k in range(terms):
        if k:
            power *= -t_value / k
        summands.append(power * (k * k + 2 * k + 1.75) / ((k + 1.5) * (k + 0.5) ** 2))
    return compensated_sum(summands)


def _check_upper_validity(C: DiffusionParameter, strict: bool) -> None:
    if upper_envelope_holds(C):
        return
    message = (f"The upper bound needs every order >= {ENVELOPE_MIN_ORDER}; the support starts at "
               f"{C.nu_min:g}, so U(t) can fall below I(t) at late times")
    if strict:
        raise DomainError(message, errors={'nu_min': C.nu_min})
    logger.warning(message)


def _upper_value(moments: dparam.Moments, m: float, t_value: float) -> float:
    return moments.C_tilde / m * upper_envelope_integral(t_value) \
        + moments.M / m * math.exp(-t_value) / t_value


def upper_bound(C: DiffusionParameter,
                kappa: float,
                t_value: float,
                m: float = None,
                strict: bool = False) -> float:
    """
    U(t) = (C̃/m) J(t) + (M/m) e^{−t}/t

    Args:
        C: Diffusion parameter
        kappa: Mode wavenumber
        t_value: Time, t > 0
        m: Precomputed minimum of g² + h²
        strict: Raise instead of warning when orders below ½ void the bound

    Raises:
        DomainError: t ≤ 0, or strict and upper_envelope_holds(C) is False
    """
    if not t_value > 0.0:
        raise DomainError(f"The upper bound diverges at t = 0; need t > 0. Got: {t_value}")
    _check_upper_validity(C, strict)
    if m is None:
        m, _ = find_m(C, kappa)
    return _upper_value(dparam.moments(C), m, t_value)


# ------------------------------------------
# ------------- Lower bound ----------------
# ------------------------------------------


def _lower_quadrature(M: float, Omega: float, omega_sq: float, shift: float) -> float:
    def integrand(r):
        return math.exp(-r * shift) / (Omega * Omega * r * r + omega_sq * omega_sq)

    # e^{−rp} lives on the scale 1/p
    knee = 50.0 / shift
    total = integrate.quad(integrand, 0.0, knee, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    total += integrate.quad(integrand, knee, np.inf, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return M * total


def _lower_closed_form(M: float, Omega: float, omega_sq: float, shift: float) -> float:
    a = omega_sq / Omega
    x = a * shift
    return M / (Omega * Omega * a) * (math.sin(x) * ci(x) + math.cos(x) * (0.5 * math.pi - si(x)))


_LOWER_METHODS = {
    LowerMethod.QUADRATURE: _lower_quadrature,
    LowerMethod.CLOSED_FORM: _lower_closed_form,
}


def lower_bound(C: DiffusionParameter,
                kappa: float,
                t_value: float,
                method: str = LowerMethod.QUADRATURE) -> float:
    """
    L(t) = M ∫₀^∞ e^{−r(t+1)}/(Ω²r² + ω⁴) dr

    Args:
        C: Density-type diffusion parameter
        kappa: Mode wavenumber
        t_value: Time, t ≥ 0
        method: 'quadrature' or 'closed_form' (sine and cosine integrals)

    Raises:
        DeltaUnsupportedError: C is a delta mixture
    """
    t_value = check_non_negative('t', t_value)
    if method not in _LOWER_METHODS:
        raise ValueError(f"Unknown lower bound method '{method}'. Expected one of {list(_LOWER_METHODS)}")
    Omega, omega_sq = _quadratic_coefficients(C, check_positive('kappa', kappa))
    return _LOWER_METHODS[method](dparam.moments(C).M, Omega, omega_sq, t_value + 1.0)


# ------------------------------------------
# ---------------- Reports -----------------
# ------------------------------------------


@log_trace(__name__)
def bounds_report(C: DiffusionParameter,
                  kappa: float,
                  times: t.Sequence[float],
                  q: QuadratureSpec = DEFAULT_QUADRATURE) -> BoundsReport:
    """
    I, L and U on a sorted grid of times. U is NaN at t = 0 and L is NaN
    throughout for delta mixtures.
    """
    times = np.asarray(times, dtype=float)
    central, central_error = central_integral_curve(C, kappa, times, q)
    m, r0 = find_m(C, kappa)
    m_alternative, _ = find_m_alternative(C, kappa)

    upper_valid = upper_envelope_holds(C)
    _check_upper_validity(C, strict=False)
    moments = dparam.moments(C)
    upper = np.array([_upper_value(moments, m, t_value) if t_value > 0.0 else np.nan
                      for t_value in times])
    if C.is_density:
        Omega, omega_sq = _quadratic_coefficients(C, kappa)
        lower = np.array([lower_bound(C, kappa, t_value) for t_value in times])
    else:
        logger.warning("Lower bound needs a density-type parameter; reporting the upper bound only")
        Omega, omega_sq = None, None
        lower = np.full(times.shape, np.nan)

    return BoundsReport(kappa=float(kappa), m=m, r0=r0, m_alternative=m_alternative,
                        Omega=Omega, omega_sq=omega_sq, times=times,
                        central=central, central_error=central_error,
                        lower=lower, upper=upper, upper_valid=upper_valid)


def sufficient_condition(C1: DiffusionParameter,
                         C2: DiffusionParameter,
                         kappa: float,
                         r_grid: t.Sequence[float] = None) -> bool:
    """
    Pointwise check of h₁/(g₁² + h₁²) > h₂/(g₂² + h₂²) on an r grid,
    log-spaced over [1e-6, 1e6] by default. Sufficient for slower decay
    under C1, not necessary.
    """
    kappa_sq = check_positive('kappa', kappa) ** 2
    if r_grid is None:
        r_grid = np.logspace(math.log10(CONDITION_RANGE[0]), math.log10(CONDITION_RANGE[1]),
                             CONDITION_POINTS)
    r_grid = np.asarray(r_grid, dtype=float)

    def ratio(C):
        _, h = C.trig_moments(r_grid)
        return h / _denominator(C, r_grid, kappa_sq)

    return bool(np.all(ratio(C1) > ratio(C2)))


@log_trace(__name__)
def compare_decay(C1: DiffusionParameter,
                  C2: DiffusionParameter,
                  kappa: float,
                  t_grid: t.Sequence[float],
                  q: QuadratureSpec = DEFAULT_QUADRATURE) -> CompareVerdict:
    """
    Does C1 decay more slowly than C2, I₁(t) > I₂(t), on every sampled t?
    Lower orders relax faster at first and slower later, so the answer
    depends on the grid at early times.
    """
    times = np.asarray(t_grid, dtype=float)
    first, first_error = central_integral_curve(C1, kappa, times, q)
    second, second_error = central_integral_curve(C2, kappa, times, q)
    margin = first - second
    return CompareVerdict(holds_for_all_sampled_t=bool(np.all(margin > 0.0)),
                          pointwise_margin=margin,
                          sufficient_condition_holds=sufficient_condition(C1, C2, kappa),
                          times=times, first=first, second=second,
                          margin_error=first_error + second_error)
