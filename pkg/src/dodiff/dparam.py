"""
The diffusion parameter C(ν): the weight given to each derivative order
ν in the distributed-order time operator ∫₀¹ C(ν) D_t^ν u dν.

Three shapes are supported, all immutable and hashable:

    DeltaMixture      Σ w_i δ(ν − ν_i), ν_i ∈ (0, 1]
    UniformBand       constant density W / (ν₂ − ν₁) on [ν₁, ν₂]
    TabulatedDensity  piecewise-linear density through (ν_j, c_j)

Everything downstream only needs the two weighted power integrals

    ∫ C(μ) r^μ cos(θμ) dμ,    ∫ C(μ) r^μ sin(θμ) dμ

evaluated at θ = π (where they give g − κ² and h), plus a handful of
scalar moments. Each shape evaluates them in closed form.
"""
import abc
import typing as t
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .helper.exceptions import (
    EmptySupportError,
    InvalidDiffusionParameterError,
    NegativeWeightError,
    NormalizationError,
    SupportOutOfRangeError,
)
from .helper.validation import check_positive, check_real
from .quadrature import composite_gauss_legendre, gauss_legendre

NORMALIZATION_TOLERANCE = 1e-12

# Below this angle the closed forms lose their denominator; integrate instead.
_SMALL_ANGLE = 1e-3
# Width of the Gauss panels used on tabulated segments
_PANEL_WIDTH = 0.05


class Kind:
    DELTA = 'delta'
    BAND = 'band'
    TABULATED = 'tabulated'


@dataclass(frozen=True)
class Moments:
    M: float
    C_tilde: float
    # sqrt(∫C²), only defined for densities
    C_hat: t.Optional[float] = None


ArrayLike = t.Union[float, t.Sequence[float], np.ndarray]


def _as_output(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


class DiffusionParameter(abc.ABC):
    """
    Common interface of the three shapes of C(ν)
    """
    kind: str = None

    @abc.abstractmethod
    def trig_moments(self, r: np.ndarray, theta: float = np.pi) -> t.Tuple[np.ndarray, np.ndarray]:
        """
        Args:
            r: Nonnegative array
            theta: Angle in [0, π]

        Returns:
            (∫C(μ)r^μcos(θμ)dμ, ∫C(μ)r^μsin(θμ)dμ), each shaped like r
        """

    @abc.abstractmethod
    def log_trig_moments(self, log_r: np.ndarray, theta: float = np.pi) -> t.Tuple[np.ndarray, np.ndarray]:
        """
        trig_moments at r = e^{log_r}. Finite where r itself underflows.
        """

    @abc.abstractmethod
    def order_quadrature(self) -> t.Tuple[np.ndarray, np.ndarray]:
        """
        Nodes ν_i and weights w_i with Σ w_i φ(ν_i) ≈ ∫C(ν)φ(ν)dν
        for smooth φ. Exact for deltas.
        """

    @abc.abstractmethod
    def scaled(self, factor: float) -> 'DiffusionParameter':
        """
        The parameter factor·C(ν)
        """

    @abc.abstractmethod
    def to_dict(self) -> t.Dict:
        ...

    @property
    @abc.abstractmethod
    def nu_min(self) -> float:
        """
        Infimum of the support
        """

    @property
    @abc.abstractmethod
    def nu_max(self) -> float:
        ...

    @property
    def is_density(self) -> bool:
        return self.kind != Kind.DELTA

    @property
    def is_classical(self) -> bool:
        """
        True when C is a point mass at ν = 1, i.e. the ordinary heat equation
        """
        return False


# ------------------------------------------
# ------------- Delta mixtures -------------
# ------------------------------------------


@dataclass(frozen=True)
class DeltaMixture(DiffusionParameter):
    # (weight, order) pairs
    components: t.Tuple[t.Tuple[float, float], ...]
    normalized: bool = False
    kind: str = field(default=Kind.DELTA, init=False, repr=False, compare=False)

    def __post_init__(self):
        components = tuple((check_real('weight', w), check_real('order', nu))
                           for w, nu in self.components)
        object.__setattr__(self, 'components', components)
        validate(self)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.components if w > 0.0])

    @property
    def orders(self) -> np.ndarray:
        return np.array([nu for w, nu in self.components if w > 0.0])

    @property
    def nu_min(self) -> float:
        return float(np.min(self.orders))

    @property
    def nu_max(self) -> float:
        return float(np.max(self.orders))

    @property
    def is_classical(self) -> bool:
        return bool(np.all(self.orders == 1.0))

    def trig_moments(self, r, theta=np.pi):
        r = np.asarray(r, dtype=float)
        powers = np.power(r[..., None], self.orders)
        weighted = powers * self.weights
        angles = theta * self.orders
        return weighted @ np.cos(angles), weighted @ np.sin(angles)

    def log_trig_moments(self, log_r, theta=np.pi):
        log_r = np.asarray(log_r, dtype=float)
        weighted = np.exp(log_r[..., None] * self.orders) * self.weights
        angles = theta * self.orders
        return weighted @ np.cos(angles), weighted @ np.sin(angles)

    def order_quadrature(self):
        return self.orders, self.weights

    def scaled(self, factor):
        factor = check_positive('factor', factor)
        return DeltaMixture(tuple((factor * w, nu) for w, nu in self.components))

    def to_dict(self):
        doc = {'type': Kind.DELTA, 'components': [[w, nu] for w, nu in self.components]}
        if self.normalized:
            doc['normalized'] = True
        return doc


# ------------------------------------------
# ------------- Uniform bands --------------
# ------------------------------------------


@dataclass(frozen=True)
class UniformBand(DiffusionParameter):
    nu1: float
    nu2: float
    weight: float = 1.0
    normalized: bool = False
    kind: str = field(default=Kind.BAND, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ('nu1', 'nu2', 'weight'):
            object.__setattr__(self, name, check_real(name, getattr(self, name)))
        validate(self)

    @property
    def density(self) -> float:
        return self.weight / (self.nu2 - self.nu1)

    @property
    def nu_min(self) -> float:
        return self.nu1

    @property
    def nu_max(self) -> float:
        return self.nu2

    def trig_moments(self, r, theta=np.pi):
        return _from_log_moments(self, r, theta)

    def log_trig_moments(self, log_r, theta=np.pi):
        log_r = np.asarray(log_r, dtype=float)
        if abs(theta) < _SMALL_ANGLE:
            return _integrate_by_orders(self, log_r, theta)

        # ∫ r^μ e^{iθμ} dμ = (A₂ − A₁)/(ln r + iθ) with A_j = r^{ν_j} e^{iθν_j}
        upper = np.exp(self.nu2 * log_r)
        lower = np.exp(self.nu1 * log_r)
        delta_cos = upper * np.cos(theta * self.nu2) - lower * np.cos(theta * self.nu1)
        delta_sin = upper * np.sin(theta * self.nu2) - lower * np.sin(theta * self.nu1)
        scale = self.density / (log_r * log_r + theta * theta)
        cos_part = scale * (log_r * delta_cos + theta * delta_sin)
        sin_part = scale * (log_r * delta_sin - theta * delta_cos)
        return cos_part, sin_part

    def order_quadrature(self):
        nodes, weights = gauss_legendre(24)
        half = 0.5 * (self.nu2 - self.nu1)
        return self.nu1 + half * (nodes + 1.0), half * weights * self.density

    def scaled(self, factor):
        factor = check_positive('factor', factor)
        return UniformBand(self.nu1, self.nu2, factor * self.weight)

    def to_dict(self):
        doc = {'type': Kind.BAND, 'nu1': self.nu1, 'nu2': self.nu2, 'weight': self.weight}
        if self.normalized:
            doc['normalized'] = True
        return doc


# ------------------------------------------
# ---------- Tabulated densities -----------
# ------------------------------------------


@dataclass(frozen=True)
class TabulatedDensity(DiffusionParameter):
    nodes: t.Tuple[float, ...]
    values: t.Tuple[float, ...]
    normalized: bool = False
    kind: str = field(default=Kind.TABULATED, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'nodes', tuple(check_real('node', x) for x in self.nodes))
        object.__setattr__(self, 'values', tuple(check_real('value', v) for v in self.values))
        validate(self)

    @property
    def nu_min(self) -> float:
        return self.nodes[0]

    @property
    def nu_max(self) -> float:
        return self.nodes[-1]

    def _segments(self) -> t.Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        nodes = np.asarray(self.nodes)
        values = np.asarray(self.values)
        slopes = np.diff(values) / np.diff(nodes)
        intercepts = values[:-1] - slopes * nodes[:-1]
        return nodes[:-1], nodes[1:], intercepts, slopes

    def trig_moments(self, r, theta=np.pi):
        return _from_log_moments(self, r, theta)

    def log_trig_moments(self, log_r, theta=np.pi):
        log_r = np.asarray(log_r, dtype=float)
        if abs(theta) < _SMALL_ANGLE:
            return _integrate_by_orders(self, log_r, theta)

        # Antiderivative of (p + sμ)e^{zμ}: e^{zμ}[(p + sμ)/z − s/z²], z = ln r + iθ
        left, right, intercepts, slopes = self._segments()
        z = log_r[..., None] + 1j * theta

        def antiderivative(mu):
            return np.exp(z * mu) * ((intercepts + slopes * mu) / z - slopes / (z * z))

        total = np.sum(antiderivative(right) - antiderivative(left), axis=-1)
        return total.real, total.imag

    def order_quadrature(self):
        # Panels no wider than _PANEL_WIDTH, aligned with the tabulation nodes
        breaks = [self.nodes[0]]
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            pieces = max(1, int(np.ceil((b - a) / _PANEL_WIDTH)))
            breaks.extend(np.linspace(a, b, pieces + 1)[1:])
        nodes, weights = composite_gauss_legendre(breaks, 15)
        return nodes, weights * np.interp(nodes, self.nodes, self.values)

    def scaled(self, factor):
        factor = check_positive('factor', factor)
        return TabulatedDensity(self.nodes, tuple(factor * v for v in self.values))

    def to_dict(self):
        doc = {'type': Kind.TABULATED, 'nodes': list(self.nodes), 'values': list(self.values)}
        if self.normalized:
            doc['normalized'] = True
        return doc


def _from_log_moments(C: DiffusionParameter, r, theta: float):
    # Zero moments at r = 0
    r = np.asarray(r, dtype=float)
    positive = r > 0.0
    cos_part, sin_part = C.log_trig_moments(np.log(np.where(positive, r, 1.0)), theta)
    return np.where(positive, cos_part, 0.0), np.where(positive, sin_part, 0.0)


def _integrate_by_orders(C: DiffusionParameter, log_r: np.ndarray, theta: float):
    nodes, weights = C.order_quadrature()
    powers = np.exp(log_r[..., None] * nodes) * weights
    return powers @ np.cos(theta * nodes), powers @ np.sin(theta * nodes)


# ------------------------------------------
# -------------- Validation ----------------
# ------------------------------------------


def _validate_delta(C: DeltaMixture) -> None:
    if not len(C.components):
        raise EmptySupportError("DeltaMixture needs at least one component.")
    for weight, order in C.components:
        if weight < 0.0:
            raise NegativeWeightError(f"Negative weight {weight} at order {order}.",
                                      errors={'weight': weight, 'order': order})
        if not 0.0 < order <= 1.0:
            raise SupportOutOfRangeError(f"Delta order {order} outside of (0, 1].",
                                         errors={'order': order})
    if not any(weight > 0.0 for weight, _ in C.components):
        raise EmptySupportError("All delta weights are zero.")


def _validate_band(C: UniformBand) -> None:
    if C.weight < 0.0:
        raise NegativeWeightError(f"Negative band weight {C.weight}.", errors={'weight': C.weight})
    if C.weight == 0.0:
        raise EmptySupportError("Band weight is zero.")
    if not 0.0 < C.nu1 < C.nu2 <= 1.0:
        raise SupportOutOfRangeError(f"Band [{C.nu1}, {C.nu2}] must satisfy 0 < nu1 < nu2 <= 1.",
                                     errors={'nu1': C.nu1, 'nu2': C.nu2})


def _validate_tabulated(C: TabulatedDensity) -> None:
    nodes, values = np.asarray(C.nodes), np.asarray(C.values)
    if nodes.size < 2 or nodes.size != values.size:
        raise InvalidDiffusionParameterError(
            f"Tabulated density needs at least two nodes and one value per node. "
            f"Got {nodes.size} nodes and {values.size} values.")
    if np.any(np.diff(nodes) <= 0.0):
        raise SupportOutOfRangeError(f"Tabulation nodes must be strictly increasing. Got: {C.nodes}")
    if nodes[0] <= 0.0 or nodes[-1] >= 1.0:
        raise SupportOutOfRangeError(f"Tabulation nodes must lie in (0, 1). Got: {C.nodes}",
                                     errors={'nodes': C.nodes})
    if np.any(values < 0.0):
        raise NegativeWeightError(f"Negative tabulated density value in {C.values}.")
    if not np.any(values > 0.0):
        raise EmptySupportError("Tabulated density is zero everywhere.")


_VALIDATORS = {
    Kind.DELTA: _validate_delta,
    Kind.BAND: _validate_band,
    Kind.TABULATED: _validate_tabulated,
}


def validate(C: DiffusionParameter) -> bool:
    """
    Check the invariants of C.

    Returns:
        True when C is valid

    Raises:
        NegativeWeightError, EmptySupportError, SupportOutOfRangeError,
        NormalizationError or InvalidDiffusionParameterError naming the
        violated invariant
    """
    if not isinstance(C, DiffusionParameter):
        raise TypeError(f"Expected a DiffusionParameter. Got: {type(C)}")
    _VALIDATORS[C.kind](C)
    if C.normalized:
        total = _total_weight(C)
        if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
            raise NormalizationError(f"Parameter flagged as normalized integrates to {total!r}.",
                                     errors={'integral': total})
    return True


# ------------------------------------------
# ---------- Moments and spectra -----------
# ------------------------------------------


def _total_weight(C: DiffusionParameter) -> float:
    if C.kind == Kind.DELTA:
        return float(np.sum(C.weights))
    if C.kind == Kind.BAND:
        return C.weight
    nodes, values = np.asarray(C.nodes), np.asarray(C.values)
    return float(np.sum(0.5 * (values[:-1] + values[1:]) * np.diff(nodes)))


def _square_integral(C: DiffusionParameter) -> float:
    if C.kind == Kind.BAND:
        return C.weight * C.density
    nodes, values = np.asarray(C.nodes), np.asarray(C.values)
    left, right = values[:-1], values[1:]
    return float(np.sum(np.diff(nodes) * (left * left + left * right + right * right) / 3.0))


@lru_cache(maxsize=256)
def moments(C: DiffusionParameter) -> Moments:
    """
    M = ∫C(μ)sin(πμ)dμ, C̃ = ∫C(μ)dμ and, for densities, Ĉ = sqrt(∫C(μ)²dμ).
    Exact for every shape; cached per parameter.
    """
    _, sin_part = C.trig_moments(np.array(1.0))
    c_hat = np.sqrt(_square_integral(C)) if C.is_density else None
    return Moments(M=float(sin_part), C_tilde=_total_weight(C),
                   C_hat=None if c_hat is None else float(c_hat))


def eval_h(C: DiffusionParameter, r: ArrayLike):
    """
    h(r) = ∫C(μ) r^μ sin(πμ) dμ
    """
    scalar = np.ndim(r) == 0
    _, sin_part = C.trig_moments(np.asarray(r, dtype=float))
    return _as_output(sin_part, scalar)


def eval_g(C: DiffusionParameter, r: ArrayLike, kappa: float):
    """
    g(r) = ∫C(μ) r^μ cos(πμ) dμ + κ²
    """
    scalar = np.ndim(r) == 0
    cos_part, _ = C.trig_moments(np.asarray(r, dtype=float))
    return _as_output(cos_part + kappa * kappa, scalar)


def eval_sin_weighted(C: DiffusionParameter, r: ArrayLike, theta: float):
    """
    ∫C(μ) r^μ sin(θμ) dμ. Positive for θ ∈ (0, π) and r > 0, which
    keeps the zeros of Φ(s) + κ² off the cut plane.
    """
    scalar = np.ndim(r) == 0
    _, sin_part = C.trig_moments(np.asarray(r, dtype=float), theta)
    return _as_output(sin_part, scalar)


def order_quadrature(C: DiffusionParameter) -> t.Tuple[np.ndarray, np.ndarray]:
    return C.order_quadrature()


def scaled(C: DiffusionParameter, factor: float) -> DiffusionParameter:
    return C.scaled(factor)


# ------------------------------------------
# -------------- Constructors --------------
# ------------------------------------------


def delta(*components: t.Tuple[float, float], normalized: bool = False) -> DeltaMixture:
    """
    delta((0.5, 0.3), (0.5, 0.7)) is 0.5δ(ν − 0.3) + 0.5δ(ν − 0.7)
    """
    return DeltaMixture(tuple(tuple(c) for c in components), normalized=normalized)


def single_order(mu: float, c: float = 1.0) -> DeltaMixture:
    """
    (1/c)δ(ν − μ): the single-order equation D^μ u = c u_xx
    """
    return DeltaMixture(((1.0 / check_positive('c', c), mu),))


def two_order_mixture(c: float, nu1: float, nu2: float) -> DeltaMixture:
    """
    cδ(ν − ν₁) + (1 − c)δ(ν − ν₂), 0 < c < 1
    """
    c = check_real('c', c)
    if not 0.0 < c < 1.0:
        raise InvalidDiffusionParameterError(f"Mixture fraction must lie in (0, 1). Got: {c}")
    return DeltaMixture(((c, nu1), (1.0 - c, nu2)), normalized=True)


def band(nu1: float, nu2: float, weight: float = 1.0, normalized: bool = False) -> UniformBand:
    return UniformBand(nu1, nu2, weight, normalized)


def tabulated(nodes: t.Sequence[float], values: t.Sequence[float],
              normalized: bool = False) -> TabulatedDensity:
    return TabulatedDensity(tuple(nodes), tuple(values), normalized)


def from_dict(doc: t.Mapping) -> DiffusionParameter:
    """
    Build a parameter from its JSON form, e.g.

        {"type": "delta", "components": [[1.0, 0.5]]}
        {"type": "band", "nu1": 0.2, "nu2": 0.8, "weight": 1.0}
        {"type": "tabulated", "nodes": [...], "values": [...]}
    """
    if not isinstance(doc, t.Mapping) or 'type' not in doc:
        raise InvalidDiffusionParameterError(f"Diffusion parameter needs a 'type' key. Got: {doc}")
    kind = doc['type']
    normalized = bool(doc.get('normalized', False))
    try:
        if kind == Kind.DELTA:
            return delta(*doc['components'], normalized=normalized)
        if kind == Kind.BAND:
            return band(doc['nu1'], doc['nu2'], doc.get('weight', 1.0), normalized)
        if kind == Kind.TABULATED:
            return tabulated(doc['nodes'], doc['values'], normalized)
    except InvalidDiffusionParameterError:
        raise
    except (KeyError, TypeError, ValueError) as error:
        raise InvalidDiffusionParameterError(f"Malformed '{kind}' parameter {doc}: {error}") from error
    raise InvalidDiffusionParameterError(f"Unknown diffusion parameter type '{kind}'. "
                                         f"Expected one of {list(_VALIDATORS)}")
