"""
The time kernel B(t) of one spatial mode.

For a mode with wavenumber κ the kernel solves

    ∫₀¹ C(ν) D_t^ν B dν + κ² B = 0,    B(0) = 1,

and has the real integral representation

    B(t) = ∫₀^∞ e^{−rt} ρ(r) dr,    ρ(r) = (κ²/π) h(r) / (r (g(r)² + h(r)²))

with h and g from dparam. ρ is nonnegative, so B is completely monotone.

The r-axis is split at QuadratureSpec.split_point (p). On (0, p] the
substitution r = z^{1/ν_min} removes the r^{ν_min − 1} endpoint behaviour,
and h, g are evaluated from ln r = ln(z)/ν_min, which stays finite where
r underflows for tiny ν_min. On [p, ∞) the substitution r = p + (e^u − 1)/max(t, 1)
follows the e^{−rt} scale. Each piece goes to adaptive Gauss–Kronrod
(QUADPACK).
"""
import math
import typing as t
from collections import OrderedDict
from dataclasses import dataclass, field, replace

import numpy as np

from . import dparam
from .debug import log_trace
from .dparam import DiffusionParameter
from .helper.exceptions import DegenerateSupportError, QuadratureNonconvergenceError
from .helper.util import create_properties, get_logger
from .helper.validation import check_positive
from .quadrature import integrate

logger = get_logger(__name__)

# Largest r reached on the upper piece
R_MAX = 1e150
# e^{-69} ≈ 1e-30: beyond this the exponential factor is negligible
_EXPONENT_CUTOFF = 69.0
# Time scale below which the upper substitution stops stretching
TAU_0 = 1.0
# Break points carried from one time to the next by kernel_curve
WARM_START_POINTS = 16


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    split_point: float = 1.0
    max_subdivisions: int = 500

    # Key: (accepted types, default)
    PROPERTIES: t.ClassVar[OrderedDict] = OrderedDict({
        'rel_tol': ((float, int), 1e-10),
        'abs_tol': ((float, int), 1e-14),
        'split_point': ((float, int), 1.0),
        'max_subdivisions': (int, 500),
    })

    def __post_init__(self):
        for name in ('rel_tol', 'abs_tol', 'split_point'):
            object.__setattr__(self, name, check_positive(name, getattr(self, name)))
        if isinstance(self.max_subdivisions, bool) or not isinstance(self.max_subdivisions, int) \
                or self.max_subdivisions < 2:
            raise ValueError(f"'max_subdivisions' must be an integer >= 2. Got: {self.max_subdivisions}")

    @classmethod
    def from_dict(cls, doc: t.Mapping = None) -> 'QuadratureSpec':
        return cls(**create_properties(cls.PROPERTIES, **dict(doc or {})))

    def to_dict(self) -> t.Dict:
        return OrderedDict((key, getattr(self, key)) for key in self.PROPERTIES)

    def with_overrides(self, **overrides) -> 'QuadratureSpec':
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})

    def coarsened(self, rel_tol: float) -> 'QuadratureSpec':
        return replace(self, rel_tol=max(self.rel_tol, rel_tol))


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class SpectralContext:
    C: DiffusionParameter
    kappa: float
    # Route single deltas to the Mittag-Leffler function
    fast_path: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'kappa', check_positive('kappa', self.kappa))

    @property
    def moments(self) -> dparam.Moments:
        return dparam.moments(self.C)

    @property
    def kappa_sq(self) -> float:
        return self.kappa * self.kappa


@dataclass(frozen=True)
class KernelCurve:
    times: np.ndarray
    values: np.ndarray
    abs_err_estimates: np.ndarray
    kappa: float = None
    warnings: t.Tuple[str, ...] = field(default=(), compare=False)

    def __len__(self):
        return self.times.size

    @property
    def max_error(self) -> float:
        return float(np.max(self.abs_err_estimates)) if self.abs_err_estimates.size else 0.0

    def is_completely_monotone(self) -> bool:
        """
        Positive, strictly decreasing and convex on the sampled grid.
        Convexity is checked on divided differences so uneven grids qualify.
        """
        if np.any(self.values <= 0.0):
            return False
        slopes = np.diff(self.values) / np.diff(self.times)
        return bool(np.all(slopes < 0.0) and np.all(np.diff(slopes) > 0.0))


# -----------------------------------
# -------- Private Functions --------
# -----------------------------------


def _classical_weight(C: DiffusionParameter) -> float:
    return float(np.sum(C.weights))


def _check_spectral_support(C: DiffusionParameter) -> None:
    if C.kind == dparam.Kind.DELTA and not C.is_classical and np.any(C.orders == 1.0):
        raise DegenerateSupportError(
            "Delta mixtures with a component at order 1 and fractional components are not "
            "covered by the spectral route", errors={'orders': C.orders.tolist()})


def _density(ctx: SpectralContext, r: np.ndarray) -> np.ndarray:
    cos_part, h = ctx.C.trig_moments(r)
    g = cos_part + ctx.kappa_sq
    modulus = np.hypot(g, h)
    return ctx.kappa_sq / np.pi * (h / r) / modulus / modulus


def _lower_piece(ctx: SpectralContext, t_value: float, split: float):
    """
    Integrand on z ∈ (0, split^ν_min] for r = z^{1/ν_min}, dr = r/(ν_min z) dz
    """
    nu_min = ctx.C.nu_min

    def f(z):
        log_r = np.log(z) / nu_min
        r = np.exp(log_r)
        cos_part, h = ctx.C.log_trig_moments(log_r)
        g = cos_part + ctx.kappa_sq
        modulus = np.hypot(g, h)
        return np.exp(-r * t_value) * ctx.kappa_sq / np.pi * (h / (nu_min * z)) / modulus / modulus

    return f, split ** nu_min


def _upper_piece(ctx: SpectralContext, t_value: float, split: float):
    """
    Integrand on u ≥ 0 for r = split + (e^u − 1)/s, dr = e^u/s du
    """
    stretch = max(t_value, TAU_0)

    def f(u):
        growth = np.expm1(u)
        r = split + growth / stretch
        return np.exp(-r * t_value) * _density(ctx, r) * (growth + 1.0) / stretch

    u_cap = math.log1p((R_MAX - split) * stretch)
    if t_value > 0.0:
        u_cap = min(u_cap, math.log1p(_EXPONENT_CUTOFF * stretch / t_value))
    return f, u_cap, stretch


def _upper_tail(ctx: SpectralContext, t_value: float, split: float, u_cap: float, stretch: float) -> float:
    """
    Estimate of the integral beyond the truncation point of the upper piece
    """
    r_end = split + math.expm1(u_cap) / stretch
    density_end = float(_density(ctx, np.array(r_end)))
    if t_value > 0.0:
        return math.exp(-r_end * t_value) * density_end / t_value
    # ρ(r) ~ r^{-a}: fit a from one decade below the end
    density_before = float(_density(ctx, np.array(r_end / 10.0)))
    if density_end <= 0.0 or density_before <= 0.0:
        return 0.0
    decay = math.log(density_before / density_end) / math.log(10.0)
    if decay <= 1.0:
        return density_end * r_end
    return density_end * r_end / (decay - 1.0)


def _geometric_breaks(upper: float, count: int = 10) -> np.ndarray:
    return upper * 2.0 ** -np.arange(count, 0, -1)


def _doubling_breaks(upper: float) -> np.ndarray:
    points = [1.0]
    while points[-1] * 2.0 < upper:
        points.append(points[-1] * 2.0)
    return np.array(points)


def _thin(breaks: np.ndarray, limit: int) -> np.ndarray:
    if breaks is None or breaks.size <= limit:
        return breaks
    step = int(math.ceil(breaks.size / limit))
    return breaks[::step]


def _spectral_kernel(ctx: SpectralContext,
                     t_value: float,
                     q: QuadratureSpec,
                     warm_start: t.Dict = None) -> t.Tuple[float, float]:
    split = q.split_point
    warm_start = {} if warm_start is None else warm_start
    limit = WARM_START_POINTS

    lower_f, z_max = _lower_piece(ctx, t_value, split)
    upper_f, u_cap, stretch = _upper_piece(ctx, t_value, split)

    lower_breaks = warm_start.get('lower')
    if lower_breaks is None:
        lower_breaks = _geometric_breaks(z_max)
    upper_breaks = warm_start.get('upper')
    if upper_breaks is None:
        upper_breaks = _doubling_breaks(u_cap)

    lower = integrate(lower_f, 0.0, z_max, rel_tol=q.rel_tol, abs_tol=0.5 * q.abs_tol,
                      max_subdivisions=q.max_subdivisions, breaks=lower_breaks)
    upper = integrate(upper_f, 0.0, u_cap, rel_tol=q.rel_tol, abs_tol=0.5 * q.abs_tol,
                      max_subdivisions=q.max_subdivisions, breaks=upper_breaks)
    tail = _upper_tail(ctx, t_value, split, u_cap, stretch)

    warm_start['lower'] = _thin(lower.breaks, limit)
    warm_start['upper'] = _thin(upper.breaks, limit)

    value = lower.value + upper.value + tail
    error = lower.error + upper.error + tail
    return value, error


def _kernel_value(ctx: SpectralContext,
                  t_value: float,
                  q: QuadratureSpec,
                  warm_start: t.Dict = None) -> t.Tuple[float, float]:
    C = ctx.C
    if C.is_classical:
        return math.exp(-ctx.kappa_sq * t_value / _classical_weight(C)), 0.0
    if ctx.fast_path and C.kind == dparam.Kind.DELTA and C.orders.size == 1:
        # Imported here: the oracle is only a shortcut, never a dependency of the spectral route
        from .oracle import mittag_leffler
        mu, weight = float(C.orders[0]), float(C.weights[0])
        value = mittag_leffler(mu, -ctx.kappa_sq / weight * t_value ** mu)
        return value, 1e-12 * value
    _check_spectral_support(C)

    value, error = _spectral_kernel(ctx, t_value, q, warm_start)
    requested = max(q.abs_tol, q.rel_tol * abs(value))
    if error > requested:
        logger.warning(f"B(t={t_value}) for kappa={ctx.kappa}: achieved error {error:.3e} "
                       f"above requested {requested:.3e} (roundoff limited)")
    return value, error


# ------------------------------------
# --------- Public Functions ---------
# ------------------------------------


def kernel_density(ctx: SpectralContext, r: t.Union[float, np.ndarray]):
    """
    ρ(r) = (κ²/π) h(r) / (r (g(r)² + h(r)²)), r > 0

    Raises:
        DegenerateSupportError: the classical kernel has no density,
            only a point mass at r = κ²/W
    """
    if ctx.C.is_classical:
        raise DegenerateSupportError("C = Wδ(ν − 1) has no spectral density; "
                                     "its kernel is exp(−κ²t/W)")
    _check_spectral_support(ctx.C)
    scalar = np.ndim(r) == 0
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("kernel_density is defined for r > 0 only")
    density = _density(ctx, r)
    return float(density) if scalar else density


def kernel(ctx: SpectralContext,
           t_value: float,
           q: QuadratureSpec = DEFAULT_QUADRATURE) -> t.Tuple[float, float]:
    """
    B(t) = ∫₀^∞ e^{−rt} ρ(r) dr for a single time.

    Args:
        ctx: Parameter and mode
        t_value: Time, t ≥ 0
        q: Quadrature settings

    Returns:
        (value, error estimate)

    Raises:
        QuadratureNonconvergenceError, DegenerateSupportError
    """
    t_value = float(t_value)
    if not t_value >= 0.0:
        raise ValueError(f"Kernel time must be nonnegative. Got: {t_value}")
    return _kernel_value(ctx, t_value, q)


@log_trace(__name__)
def kernel_curve(ctx: SpectralContext,
                 times: t.Sequence[float],
                 q: QuadratureSpec = DEFAULT_QUADRATURE) -> KernelCurve:
    """
    B on a sorted grid of times. The adaptive partitions found at one time
    seed the next, which cuts the work on dense grids.
    """
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
        raise ValueError("Kernel times must be sorted and nonnegative")

    values = np.empty_like(times)
    errors = np.empty_like(times)
    warm_start = {}
    for index, t_value in enumerate(times):
        try:
            values[index], errors[index] = _kernel_value(ctx, float(t_value), q, warm_start)
        except QuadratureNonconvergenceError as error:
            # Retry once from a cold partition before giving up
            if not warm_start:
                raise
            logger.debug(f"warm start failed at t={t_value}: {error}; retrying cold")
            warm_start.clear()
            values[index], errors[index] = _kernel_value(ctx, float(t_value), q, warm_start)
    return KernelCurve(times, values, errors, kappa=ctx.kappa)


def central_kernel_integral(ctx: SpectralContext, t_value: float,
                            q: QuadratureSpec = DEFAULT_QUADRATURE) -> t.Tuple[float, float]:
    """
    ∫₀^∞ (e^{−rt}/r) h/(g² + h²) dr = π B(t)/κ², with its error estimate
    """
    value, error = kernel(ctx, t_value, q)
    factor = math.pi / ctx.kappa_sq
    return factor * value, factor * error
