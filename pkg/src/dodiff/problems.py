"""
Space-time solutions of the three boundary-value problems.

    dirichlet  u(0, t) = u(1, t) = 0   u = Σ_{n≥1} a_n B_n(t) sin(nπx)
    neumann    u_x = 0 at 0 and 1      u = a₀ + Σ_{n≥1} a_n B_n(t) cos(nπx)
    cauchy     x ∈ ℝ, u bounded        u = (1/π) ∫₀^∞ Re[F(λ) e^{iλx}] B_λ(t) dλ

B_n is the spectral kernel at κ = nπ and B_λ the kernel at κ = λ.
"""
import math
import typing as t
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from .debug import log_trace
from .dparam import DiffusionParameter
from .helper.exceptions import AliasWarning, DomainError, EndpointMismatchError
from .helper.util import get_logger
from .helper.validation import check_positive, check_real, check_strictly_increasing
from .quadrature import composite_gauss_legendre
from .spectral import DEFAULT_QUADRATURE, QuadratureSpec, SpectralContext, kernel, kernel_curve

logger = get_logger(__name__)

ENDPOINT_TOLERANCE = 1e-8
# |F(Λ)| < SPECTRAL_CUTOFF·|F(0)| fixes the end of the λ grid
SPECTRAL_CUTOFF = 1e-10
ALIAS_TOLERANCE = 1e-8
DEFAULT_MODE_CUTOFF = 64
DEFAULT_X_POINTS = 101
# Gaussian data is truncated this many widths away from its center
GAUSSIAN_REACH = 10.0
# Segments with |λ·width| below this use the Taylor series of their moments
SEGMENT_SERIES_LIMIT = 1e-2
SEGMENT_SERIES_TERMS = 10


class Boundary:
    DIRICHLET = 'dirichlet'
    NEUMANN = 'neumann'
    CAUCHY = 'cauchy'

    ALL = (DIRICHLET, NEUMANN, CAUCHY)


class Basis:
    SINE = 'sine'
    COSINE = 'cosine'


class InitialTag:
    SINE_MODE = 'sine_mode'
    COSINE_MODE = 'cosine_mode'
    PARABOLA = 'parabola'
    GAUSSIAN = 'gaussian'
    COEFFICIENTS = 'coefficients'
    SAMPLES = 'samples'


# ------------------------------------------
# ---------- Initial conditions ------------
# ------------------------------------------


@dataclass(frozen=True)
class ClosedForm:
    """
    sine_mode    sin(kπx)
    cosine_mode  cos(kπx), k = 0 is the constant 1
    parabola     x(1 − x)
    gaussian     exp(−(x − center)²/(2 width²))
    """
    tag: str
    k: int = 1
    center: float = 0.5
    width: float = 0.1

    def __post_init__(self):
        if self.tag not in (InitialTag.SINE_MODE, InitialTag.COSINE_MODE,
                            InitialTag.PARABOLA, InitialTag.GAUSSIAN):
            raise ValueError(f"Unknown closed-form initial condition '{self.tag}'")
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 0 \
                or (self.k == 0 and self.tag == InitialTag.SINE_MODE):
            raise ValueError(f"Mode number must be a nonnegative integer (positive for sine modes). "
                             f"Got: {self.k}")
        object.__setattr__(self, 'center', check_real('center', self.center))
        object.__setattr__(self, 'width', check_positive('width', self.width))

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.tag == InitialTag.SINE_MODE:
            return np.sin(self.k * np.pi * x)
        if self.tag == InitialTag.COSINE_MODE:
            return np.cos(self.k * np.pi * x)
        if self.tag == InitialTag.PARABOLA:
            return x * (1.0 - x)
        return np.exp(-(x - self.center) ** 2 / (2.0 * self.width ** 2))

    def to_dict(self) -> t.Dict:
        if self.tag in (InitialTag.SINE_MODE, InitialTag.COSINE_MODE):
            return {'type': self.tag, 'k': self.k}
        if self.tag == InitialTag.GAUSSIAN:
            return {'type': self.tag, 'center': self.center, 'width': self.width}
        return {'type': self.tag}


@dataclass(frozen=True)
class Coefficients:
    """
    Series coefficients: a_1..a_N for the sine basis, a_0..a_N for the cosine basis
    """
    values: t.Tuple[float, ...]
    basis: str = Basis.SINE

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(check_real('coefficient', v) for v in self.values))
        if self.basis not in (Basis.SINE, Basis.COSINE):
            raise ValueError(f"Unknown basis '{self.basis}'")
        if not self.values:
            raise ValueError("Coefficients need at least one value")

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        values = np.asarray(self.values)
        if self.basis == Basis.SINE:
            modes = np.arange(1, values.size + 1)
            return values @ np.sin(np.pi * np.multiply.outer(modes, x))
        modes = np.arange(values.size)
        return values @ np.cos(np.pi * np.multiply.outer(modes, x))

    def to_dict(self) -> t.Dict:
        return {'type': InitialTag.COEFFICIENTS, 'values': list(self.values), 'basis': self.basis}


@dataclass(frozen=True)
class Samples:
    x: t.Tuple[float, ...]
    f: t.Tuple[float, ...]

    def __post_init__(self):
        x = check_strictly_increasing('x', self.x)
        f = np.asarray(self.f, dtype=float)
        if x.size < 3 or f.shape != x.shape or not np.all(np.isfinite(f)):
            raise ValueError(f"Samples need at least 3 finite values, one per abscissa. "
                             f"Got {x.size} abscissae and {f.size} values")
        object.__setattr__(self, 'x', tuple(float(v) for v in x))
        object.__setattr__(self, 'f', tuple(float(v) for v in f))

    def evaluate(self, x) -> np.ndarray:
        """
        Linear interpolation, zero outside of the sampled range
        """
        return np.interp(np.asarray(x, dtype=float), self.x, self.f, left=0.0, right=0.0)

    def to_dict(self) -> t.Dict:
        return {'type': InitialTag.SAMPLES, 'x': list(self.x), 'f': list(self.f)}


InitialCondition = t.Union[ClosedForm, Coefficients, Samples]


def initial_from_dict(doc: t.Mapping) -> InitialCondition:
    """
    {"type": "sine_mode", "k": 1}, {"type": "gaussian", "center": 0, "width": 0.1},
    {"type": "coefficients", "values": [...], "basis": "sine"},
    {"type": "samples", "x": [...], "f": [...]}, ...
    """
    doc = dict(doc)
    kind = doc.pop('type', None)
    if kind == InitialTag.COEFFICIENTS:
        return Coefficients(tuple(doc['values']), doc.get('basis', Basis.SINE))
    if kind == InitialTag.SAMPLES:
        return Samples(tuple(doc['x']), tuple(doc['f']))
    return ClosedForm(kind, **doc)


# ------------------------------------------
# ---------- Problem description -----------
# ------------------------------------------


def _default_domain(boundary: str, initial: InitialCondition) -> t.Tuple[float, float]:
    if boundary != Boundary.CAUCHY:
        return 0.0, 1.0
    if isinstance(initial, ClosedForm) and initial.tag == InitialTag.GAUSSIAN:
        reach = abs(initial.center) + GAUSSIAN_REACH * initial.width
        return -reach, reach
    if isinstance(initial, Samples):
        reach = max(abs(initial.x[0]), abs(initial.x[-1]))
        return -reach, reach
    raise DomainError("The Cauchy problem needs gaussian or sampled initial data")


@dataclass(frozen=True)
class ProblemSpec:
    boundary: str
    initial: InitialCondition
    t_grid: t.Tuple[float, ...] = (0.0,)
    x_grid: t.Optional[t.Tuple[float, ...]] = None
    mode_cutoff: int = DEFAULT_MODE_CUTOFF
    # [0, 1] for series problems, the truncation [−L, L] of the real line for Cauchy
    domain: t.Optional[t.Tuple[float, float]] = None
    threads: int = 1

    def __post_init__(self):
        if self.boundary not in Boundary.ALL:
            raise ValueError(f"Unknown boundary '{self.boundary}'. Expected one of {Boundary.ALL}")
        for name in ('mode_cutoff', 'threads'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ValueError(f"'{name}' must be a positive integer. Got: {value}")

        times = np.asarray(self.t_grid, dtype=float).ravel()
        if times.size == 0 or np.any(times < 0.0) or np.any(np.diff(times) < 0.0):
            raise ValueError(f"t_grid must be nonempty, sorted and nonnegative. Got: {self.t_grid}")
        object.__setattr__(self, 't_grid', tuple(float(v) for v in times))

        domain = self.domain
        if domain is None:
            domain = _default_domain(self.boundary, self.initial)
        domain = (float(domain[0]), float(domain[1]))
        if self.boundary != Boundary.CAUCHY and domain != (0.0, 1.0):
            raise DomainError(f"Series problems live on [0, 1]. Got domain: {domain}")
        if self.boundary == Boundary.CAUCHY and not domain[0] < 0.0 < domain[1]:
            raise DomainError(f"The Cauchy truncation must contain 0. Got domain: {domain}")
        object.__setattr__(self, 'domain', domain)

        x_grid = self.x_grid
        if x_grid is None:
            x_grid = np.linspace(domain[0], domain[1], DEFAULT_X_POINTS)
        object.__setattr__(self, 'x_grid', tuple(float(v) for v in check_strictly_increasing('x_grid', x_grid)))

    @property
    def half_width(self) -> float:
        return max(abs(self.domain[0]), abs(self.domain[1]))

    def to_dict(self) -> t.Dict:
        return {'boundary': self.boundary, 'initial': self.initial.to_dict(),
                'mode_cutoff': self.mode_cutoff, 'domain': list(self.domain)}


@dataclass(frozen=True)
class SolutionField:
    x_grid: np.ndarray
    t_grid: np.ndarray
    # values[i, j] = u(x_j, t_i)
    values: np.ndarray
    truncation_error: np.ndarray
    quadrature_error: np.ndarray
    # Series coefficients, or the λ nodes used for the Cauchy problem
    modes: np.ndarray = field(default=None, compare=False)

    def at(self, t_index: int) -> np.ndarray:
        return self.values[t_index]

    def mass(self) -> np.ndarray:
        """
        ∫u dx over the x grid for each t (trapezoid rule)
        """
        return integrate.trapezoid(self.values, self.x_grid, axis=1)

    def sup_norm(self) -> np.ndarray:
        return np.max(np.abs(self.values), axis=1)


# ------------------------------------------
# --------- Fourier coefficients -----------
# ------------------------------------------


def _check_endpoints(values_at_ends: t.Sequence[float]) -> None:
    if max(abs(v) for v in values_at_ends) > ENDPOINT_TOLERANCE:
        raise EndpointMismatchError(f"Dirichlet data must vanish at x = 0 and x = 1. "
                                    f"Got f(0) = {values_at_ends[0]}, f(1) = {values_at_ends[1]}",
                                    errors={'f(0)': values_at_ends[0], 'f(1)': values_at_ends[1]})


def _closed_form_coefficients(initial: ClosedForm, basis: str, N: int) -> np.ndarray:
    n = np.arange(0, N + 1, dtype=float)
    coefficients = np.zeros(N + 1)
    k = initial.k

    if initial.tag == InitialTag.SINE_MODE:
        if basis == Basis.SINE:
            if k <= N:
                coefficients[k] = 1.0
        else:
            # 2∫ sin(kπx)cos(nπx)dx = 2k(1 − (−1)^{k+n}) / (π(k² − n²)), n ≠ k
            parity = 1.0 - (-1.0) ** (k + n)
            with np.errstate(divide='ignore', invalid='ignore'):
                coefficients = np.where(n == k, 0.0, 2.0 * k * parity / (np.pi * (k * k - n * n)))
            coefficients[0] = (1.0 - (-1.0) ** k) / (k * np.pi)

    elif initial.tag == InitialTag.COSINE_MODE:
        if basis == Basis.SINE:
            _check_endpoints([1.0, (-1.0) ** k])
        if k <= N:
            coefficients[k] = 1.0

    elif initial.tag == InitialTag.PARABOLA:
        if basis == Basis.SINE:
            odd = n % 2 == 1
            coefficients[odd] = 8.0 / (n[odd] * np.pi) ** 3
        else:
            coefficients[0] = 1.0 / 6.0
            coefficients[1:] = -2.0 * (1.0 + (-1.0) ** n[1:]) / (n[1:] * np.pi) ** 2

    else:
        if basis == Basis.SINE:
            _check_endpoints(initial.evaluate(np.array([0.0, 1.0])))
        weight = 'sin' if basis == Basis.SINE else 'cos'
        for index in range(0 if basis == Basis.COSINE else 1, N + 1):
            if index == 0:
                integral = integrate.quad(initial.evaluate, 0.0, 1.0, epsabs=1e-14, epsrel=1e-12,
                                          points=[initial.center] if 0.0 < initial.center < 1.0 else None)[0]
                coefficients[0] = integral
                continue
            integral = integrate.quad(initial.evaluate, 0.0, 1.0, weight=weight, wvar=index * np.pi,
                                      epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            coefficients[index] = 2.0 * integral
    return coefficients


def _sampled_coefficients(initial: Samples, basis: str, N: int) -> np.ndarray:
    x, f = np.asarray(initial.x), np.asarray(initial.f)
    if x[0] > 1e-12 or x[-1] < 1.0 - 1e-12:
        raise DomainError(f"Samples must cover [0, 1]. Got [{x[0]}, {x[-1]}]")
    inside = (x >= 0.0) & (x <= 1.0)
    x, f = x[inside], f[inside]
    if basis == Basis.SINE:
        _check_endpoints([f[0], f[-1]])

    modes = np.arange(0, N + 1)
    phase = np.pi * np.multiply.outer(modes, x)
    shapes = np.sin(phase) if basis == Basis.SINE else np.cos(phase)
    coefficients = 2.0 * integrate.simpson(shapes * f, x=x, axis=-1)
    if basis == Basis.COSINE:
        coefficients[0] *= 0.5
    else:
        coefficients[0] = 0.0
    return coefficients


def fourier_coefficients(initial: InitialCondition, boundary: str, N: int) -> np.ndarray:
    """
    Series coefficients of the initial data.

    Args:
        initial: Initial condition
        boundary: 'dirichlet' (sine series) or 'neumann' (cosine series)
        N: Mode cutoff

    Returns:
        [a_1, ..., a_N] for Dirichlet, [a_0, ..., a_N] for Neumann with a₀ = ∫₀¹f dx

    Raises:
        EndpointMismatchError: Dirichlet data does not vanish at 0 and 1
    """
    if boundary not in (Boundary.DIRICHLET, Boundary.NEUMANN):
        raise ValueError(f"Series coefficients need a dirichlet or neumann boundary. Got: '{boundary}'")
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ValueError(f"Mode cutoff must be a positive integer. Got: {N}")
    basis = Basis.SINE if boundary == Boundary.DIRICHLET else Basis.COSINE

    if isinstance(initial, Coefficients):
        if initial.basis != basis:
            raise ValueError(f"{initial.basis} coefficients cannot seed a {boundary} problem")
        offset = 1 if basis == Basis.SINE else 0
        coefficients = np.zeros(N + 1)
        values = np.asarray(initial.values)[:N + 1 - offset]
        coefficients[offset:offset + values.size] = values
    elif isinstance(initial, Samples):
        coefficients = _sampled_coefficients(initial, basis, N)
    else:
        coefficients = _closed_form_coefficients(initial, basis, N)

    return coefficients[1:] if basis == Basis.SINE else coefficients


def _segment_moments(theta: np.ndarray) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    ∫₀¹ e^{−iθs} ds and ∫₀¹ s e^{−iθs} ds, by Taylor series for small |θ|
    """
    small = np.abs(theta) < SEGMENT_SERIES_LIMIT
    safe = np.where(small, 1.0, theta)
    phase = np.exp(-1j * safe)
    constant = (1.0 - phase) / (1j * safe)
    linear = phase * (1j / safe + 1.0 / safe ** 2) - 1.0 / safe ** 2

    k = np.arange(SEGMENT_SERIES_TERMS)
    powers = (-1j * np.where(small, theta, 0.0)[..., None]) ** k / special.factorial(k)
    constant_series = np.sum(powers / (k + 1.0), axis=-1)
    linear_series = np.sum(powers / (k + 2.0), axis=-1)
    return np.where(small, constant_series, constant), np.where(small, linear_series, linear)


def fourier_transform(initial: InitialCondition, lam) -> np.ndarray:
    """
    F(λ) = ∫ f(x) e^{−iλx} dx.

    Closed form for gaussians. Samples are transformed as their piecewise
    linear interpolant, zero outside the sampled range, segment by segment
    and exactly, so |F| decays like λ⁻² instead of aliasing.
    """
    lam = np.asarray(lam, dtype=float)
    if isinstance(initial, ClosedForm) and initial.tag == InitialTag.GAUSSIAN:
        w, c = initial.width, initial.center
        return w * math.sqrt(2.0 * math.pi) * np.exp(-0.5 * (lam * w) ** 2) * np.exp(-1j * lam * c)
    if isinstance(initial, Samples):
        x, f = np.asarray(initial.x), np.asarray(initial.f)
        width = np.diff(x)
        constant, linear = _segment_moments(np.multiply.outer(lam, width))
        start = np.exp(-1j * np.multiply.outer(lam, x[:-1]))
        return np.sum(width * start * (f[:-1] * constant + np.diff(f) * linear), axis=-1)
    raise DomainError(f"No Fourier transform on the real line for {initial!r}")


# ------------------------------------------
# ----------------- Solvers ----------------
# ------------------------------------------


def _map_modes(function: t.Callable, items: t.Sequence, threads: int) -> t.List:
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(function, items))
    return [function(item) for item in items]


def _series_solution(C: DiffusionParameter,
                     spec: ProblemSpec,
                     q: QuadratureSpec,
                     coefficients: np.ndarray,
                     modes: np.ndarray,
                     basis: np.ndarray) -> SolutionField:
    """
    u = Σ a_n B_n(t) φ_n(x) over the given modes (n ≥ 1 only)
    """
    times = np.asarray(spec.t_grid)
    N = spec.mode_cutoff
    tail_weight = N * max(abs(coefficients[-1]), abs(coefficients[-2]) if coefficients.size > 1 else 0.0)

    needed = [int(n) for n, a in zip(modes, coefficients) if a != 0.0]
    if tail_weight > 0.0 and N not in needed:
        needed.append(N)

    def curve_of(n):
        return kernel_curve(SpectralContext(C, n * math.pi), times, q)

    curves = dict(zip(needed, _map_modes(curve_of, needed, spec.threads)))
    kernels = np.zeros((times.size, modes.size))
    errors = np.zeros((times.size, modes.size))
    for column, n in enumerate(modes):
        if int(n) in curves and coefficients[column] != 0.0:
            kernels[:, column] = curves[int(n)].values
            errors[:, column] = curves[int(n)].abs_err_estimates

    values = (kernels * coefficients) @ basis
    quadrature_error = errors @ np.abs(coefficients)
    truncation_error = tail_weight * curves[N].values if tail_weight > 0.0 else np.zeros(times.size)
    return SolutionField(np.asarray(spec.x_grid), times, values,
                         truncation_error, quadrature_error, modes=coefficients)


@log_trace(__name__)
def solve_dirichlet(C: DiffusionParameter, spec: ProblemSpec,
                    q: QuadratureSpec = DEFAULT_QUADRATURE) -> SolutionField:
    """
    u(x, t) = Σ_{n=1..N} a_n B_n(t) sin(nπx), exactly zero at x = 0 and x = 1
    """
    if spec.boundary != Boundary.DIRICHLET:
        raise ValueError(f"solve_dirichlet got a '{spec.boundary}' problem")
    coefficients = fourier_coefficients(spec.initial, Boundary.DIRICHLET, spec.mode_cutoff)
    modes = np.arange(1, spec.mode_cutoff + 1)
    x = np.asarray(spec.x_grid)
    basis = np.sin(np.pi * np.multiply.outer(modes, x))
    basis[:, (x == 0.0) | (x == 1.0)] = 0.0
    return _series_solution(C, spec, q, coefficients, modes, basis)


@log_trace(__name__)
def solve_neumann(C: DiffusionParameter, spec: ProblemSpec,
                  q: QuadratureSpec = DEFAULT_QUADRATURE) -> SolutionField:
    """
    u(x, t) = a₀ + Σ_{n=1..N} a_n B_n(t) cos(nπx). The constant mode never decays.
    """
    if spec.boundary != Boundary.NEUMANN:
        raise ValueError(f"solve_neumann got a '{spec.boundary}' problem")
    coefficients = fourier_coefficients(spec.initial, Boundary.NEUMANN, spec.mode_cutoff)
    modes = np.arange(1, spec.mode_cutoff + 1)
    x = np.asarray(spec.x_grid)
    basis = np.cos(np.pi * np.multiply.outer(modes, x))
    field_ = _series_solution(C, spec, q, coefficients[1:], modes, basis)
    return SolutionField(field_.x_grid, field_.t_grid, field_.values + coefficients[0],
                         field_.truncation_error, field_.quadrature_error, modes=coefficients)


def _spectral_cutoff(initial: InitialCondition, step: float) -> float:
    """
    Λ with |F(Λ)| < SPECTRAL_CUTOFF·|F(0)|. For samples Λ never exceeds the
    Nyquist wavenumber π/min Δx of the data.
    """
    if isinstance(initial, ClosedForm):
        return math.sqrt(-2.0 * math.log(SPECTRAL_CUTOFF)) / initial.width
    x = np.asarray(initial.x)
    nyquist = math.pi / float(np.min(np.diff(x)))
    lam = np.append(np.arange(0.0, nyquist, step), nyquist)
    magnitude = np.abs(fourier_transform(initial, lam))
    significant = np.nonzero(magnitude >= SPECTRAL_CUTOFF * magnitude[0])[0]
    if significant[-1] == lam.size - 1:
        logger.warning(f"Sampled data is not resolved: |F| stays above "
                       f"{SPECTRAL_CUTOFF:g}·|F(0)| up to the Nyquist wavenumber {nyquist:.4g}")
        return nyquist
    return float(lam[significant[-1] + 1])


def _check_alias(spec: ProblemSpec) -> None:
    edges = [spec.initial.evaluate(np.array(spec.domain))]
    if isinstance(spec.initial, Samples):
        # The interpolant drops to zero past the first and last sample
        edges.append(np.array([spec.initial.f[0], spec.initial.f[-1]]))
    ends = np.abs(np.concatenate(edges))
    peak = float(np.max(np.abs(spec.initial.evaluate(np.asarray(spec.x_grid)))))
    if isinstance(spec.initial, Samples):
        peak = max(peak, float(np.max(np.abs(spec.initial.f))))
    if np.max(ends) > ALIAS_TOLERANCE * max(peak, 1e-300):
        warnings.warn(f"Initial data is not negligible at the edge of {spec.domain}: "
                      f"|f| = {np.max(ends):.3e}", AliasWarning)


@log_trace(__name__)
def solve_cauchy(C: DiffusionParameter, spec: ProblemSpec,
                 q: QuadratureSpec = DEFAULT_QUADRATURE) -> SolutionField:
    """
    u(x, t) = (1/π) ∫₀^Λ Re[F(λ) e^{iλx}] B_λ(t) dλ by the trapezoid rule on a
    uniform λ grid. Δλ ≤ π/(2L) keeps the periodic images of u at least 4L apart.
    Rows at t = 0 are the initial data itself.
    """
    if spec.boundary != Boundary.CAUCHY:
        raise ValueError(f"solve_cauchy got a '{spec.boundary}' problem")
    _check_alias(spec)

    times = np.asarray(spec.t_grid)
    x = np.asarray(spec.x_grid)
    max_step = math.pi / (2.0 * spec.half_width)
    cutoff = _spectral_cutoff(spec.initial, max_step)
    count = int(math.ceil(cutoff / max_step)) + 1
    lam = np.linspace(0.0, cutoff, count)
    weights = np.full(count, lam[1] - lam[0])
    weights[[0, -1]] *= 0.5

    transform = fourier_transform(spec.initial, lam)

    def curve_of(wavenumber):
        return kernel_curve(SpectralContext(C, wavenumber), times, q)

    kernels = np.ones((times.size, count))
    errors = np.zeros((times.size, count))
    # λ = 0 is the conserved mode, B ≡ 1
    for column, curve in enumerate(_map_modes(curve_of, lam[1:], spec.threads), start=1):
        kernels[:, column] = curve.values
        errors[:, column] = curve.abs_err_estimates

    phase = np.multiply.outer(lam, x)
    shapes = transform.real[:, None] * np.cos(phase) - transform.imag[:, None] * np.sin(phase)
    values = (kernels * weights) @ shapes / math.pi
    quadrature_error = (errors * weights) @ np.abs(transform) / math.pi
    truncation_error = np.full(times.size, abs(transform[-1]) * cutoff / math.pi)
    # B(0) = 1, so the inversion returns f itself at t = 0
    at_start = times == 0.0
    values[at_start] = spec.initial.evaluate(x)
    truncation_error[at_start] = 0.0
    quadrature_error[at_start] = 0.0
    return SolutionField(x, times, values, truncation_error, quadrature_error, modes=lam)


_SOLVERS = {
    Boundary.DIRICHLET: solve_dirichlet,
    Boundary.NEUMANN: solve_neumann,
    Boundary.CAUCHY: solve_cauchy,
}


def solve(C: DiffusionParameter, spec: ProblemSpec,
          q: QuadratureSpec = DEFAULT_QUADRATURE) -> SolutionField:
    return _SOLVERS[spec.boundary](C, spec, q)


# ------------------------------------------
# ------------ Green's function ------------
# ------------------------------------------


GREEN_QUADRATURE = QuadratureSpec(rel_tol=1e-6)
GREEN_LAMBDA_MAX = 100.0
GREEN_PANEL_ORDER = 10


@dataclass(frozen=True)
class GreenFunction:
    x_grid: np.ndarray
    t: float
    values: np.ndarray
    error_estimate: float
    # Set when the inner kernels were computed at the default, loose tolerance
    coarse_tolerance: bool

    def second_difference(self) -> np.ndarray:
        """
        −∂²ₓG on the interior of a uniform x grid. Equals π times the
        fundamental solution and is nonnegative.
        """
        step = np.diff(self.x_grid)
        if not np.allclose(step, step[0], rtol=1e-9, atol=0.0):
            raise ValueError("second_difference needs a uniform x grid")
        return -(self.values[2:] - 2.0 * self.values[1:-1] + self.values[:-2]) / step[0] ** 2


def _tail_integral(a: np.ndarray) -> np.ndarray:
    """
    K(a) = ∫_a^∞ (cos u − 1)/u⁴ du, a > 0
    """
    a = np.asarray(a, dtype=float)
    small = a < 1e-3
    safe = np.where(small, 1.0, a)
    sine_integral, _ = special.sici(safe)
    cos_over_u2 = np.cos(safe) / safe - (0.5 * np.pi - sine_integral)
    sin_over_u3 = np.sin(safe) / (2.0 * safe ** 2) + 0.5 * cos_over_u2
    cos_over_u4 = np.cos(safe) / (3.0 * safe ** 3) - sin_over_u3 / 3.0
    exact = cos_over_u4 - 1.0 / (3.0 * safe ** 3)
    return np.where(small, -0.5 / np.where(small, a, 1.0) + np.pi / 12.0 - a / 24.0, exact)


@log_trace(__name__)
def green_function(C: DiffusionParameter,
                   x_grid: t.Sequence[float],
                   t_value: float,
                   q: QuadratureSpec = GREEN_QUADRATURE,
                   threads: int = 1,
                   lambda_max: float = GREEN_LAMBDA_MAX) -> GreenFunction:
    """
    G(x, t) = ∫₀^∞ B_λ(t)(cos λx − 1)/λ² dλ.

    The unrenormalised integral diverges at λ → 0; subtracting G(0, t)
    leaves ∂²ₓG unchanged, and u = −(1/π) f ∗ ∂²ₓG. This route is slow and
    only used to cross-check solve_cauchy.

    The λ integral uses Gauss–Legendre panels of width π/max|x| up to
    lambda_max, with one kernel evaluation per node. Beyond lambda_max
    B_λ ≈ B_Λ Λ²/λ² is integrated exactly.
    """
    t_value = check_real('t', t_value)
    if t_value <= 0.0:
        raise DomainError(f"green_function needs t > 0. Got: {t_value}")
    x = np.asarray(x_grid, dtype=float)
    reach = float(np.max(np.abs(x))) if x.size else 0.0
    panel = math.pi / reach if reach > 0.0 else lambda_max
    panels = max(1, int(math.ceil(lambda_max / panel)))
    nodes, weights = composite_gauss_legendre(np.linspace(0.0, lambda_max, panels + 1), GREEN_PANEL_ORDER)

    def kernel_at(wavenumber):
        return kernel(SpectralContext(C, wavenumber), t_value, q)

    results = _map_modes(kernel_at, list(nodes), threads)
    kernels = np.array([value for value, _ in results])
    errors = np.array([error for _, error in results])
    last_value, _ = kernel_at(lambda_max)

    # (cos λx − 1)/λ² = −2 sin²(λx/2)/λ², free of cancellation at small λ
    shapes = -2.0 * np.sin(0.5 * np.multiply.outer(nodes, x)) ** 2 / (nodes ** 2)[:, None]
    values = (kernels * weights) @ shapes
    tail = np.zeros_like(x)
    off_center = x != 0.0
    reach_x = np.abs(x[off_center])
    tail[off_center] = last_value * lambda_max ** 2 * reach_x ** 3 * _tail_integral(lambda_max * reach_x)
    values = values + tail
    error_estimate = float((errors * weights) @ np.max(np.abs(shapes), axis=1))
    return GreenFunction(x, t_value, values, error_estimate, coarse_tolerance=q.rel_tol >= 1e-6)
