"""
Adaptive quadrature on top of QUADPACK (scipy.integrate.quad, 21-point
Gauss–Kronrod with extrapolation) and cached Gauss–Legendre rules.

integrate keeps the final partition so that a later call on a nearby
integrand can start from it.
"""
import typing as t
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as quadpack
from scipy.special import roots_legendre

from .helper.exceptions import QuadratureNonconvergenceError
from .helper.util import get_logger

logger = get_logger(__name__)


class Status:
    """
    QUADPACK ier codes
    """
    CONVERGED = 0
    SUBDIVISION_LIMIT = 1
    ROUNDOFF = 2
    BAD_INTEGRAND = 3
    EXTRAPOLATION_ROUNDOFF = 4
    DIVERGENT = 5

    # The estimate is as good as double precision allows
    ROUNDOFF_LIMITED = (ROUNDOFF, EXTRAPOLATION_ROUNDOFF)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    # Sorted endpoints of the final partition, reusable as a warm start
    breaks: np.ndarray
    evaluations: int


def integrate(f: t.Callable[[float], float],
              lower: float,
              upper: float,
              rel_tol: float = 1e-10,
              abs_tol: float = 1e-14,
              max_subdivisions: int = 500,
              breaks: t.Optional[t.Sequence[float]] = None) -> QuadratureResult:
    """
    Adaptive integration of f over [lower, upper].

    Args:
        f: Integrand, called with one abscissa at a time
        lower: Lower limit
        upper: Upper limit, finite
        rel_tol: Relative tolerance on the total
        abs_tol: Absolute tolerance on the total
        max_subdivisions: Maximum number of intervals in the partition
        breaks: Initial partition. Points outside of (lower, upper) are dropped.

    Returns:
        QuadratureResult. A roundoff-limited result is returned with its
        achieved error; the caller decides whether that is good enough.

    Raises:
        QuadratureNonconvergenceError: subdivision limit reached, or the
            integrand is too irregular or divergent
    """
    if upper <= lower:
        return QuadratureResult(0.0, 0.0, np.array([lower, upper]), 0)

    points = None
    if breaks is not None:
        inside = sorted({float(b) for b in breaks if lower < b < upper})
        points = inside[:max(0, max_subdivisions - 2)] or None

    output = quadpack.quad(lambda x: float(f(x)), lower, upper, epsabs=abs_tol, epsrel=rel_tol,
                           limit=max_subdivisions, points=points, full_output=1)
    value, error, info = output[0], output[1], output[2]
    status = Status.CONVERGED if len(output) == 3 else _status_of(output[3], error, abs_tol, rel_tol, value)

    intervals = int(info['last'])
    final_breaks = np.unique(np.concatenate([[lower, upper], info['alist'][:intervals], info['blist'][:intervals]]))
    result = QuadratureResult(float(value), float(error), final_breaks, int(info['neval']))

    if status == Status.CONVERGED:
        return result
    if status in Status.ROUNDOFF_LIMITED:
        logger.debug(f"Quadrature on [{lower}, {upper}] is roundoff limited at error {error:.3e}")
        return result
    raise QuadratureNonconvergenceError(
        f"Adaptive quadrature on [{lower}, {upper}] failed ({output[3]!r}). Achieved error: "
        f"{error:.3e}, requested: {max(abs_tol, rel_tol * abs(value)):.3e}",
        achieved_error=float(error),
        errors={'value': float(value), 'intervals': intervals, 'status': status})


def _status_of(message: str, error: float, abs_tol: float, rel_tol: float, value: float) -> int:
    """
    QUADPACK only reports its ier code through the message text when
    full_output is set
    """
    text = str(message).lower()
    if 'maximum number of subdivisions' in text:
        return Status.SUBDIVISION_LIMIT
    if 'divergent' in text:
        return Status.DIVERGENT
    if 'extremely bad integrand behavior' in text:
        return Status.BAD_INTEGRAND
    if 'roundoff' in text:
        return Status.ROUNDOFF if 'extrapolation' not in text else Status.EXTRAPOLATION_ROUNDOFF
    # Unknown message: trust the estimate only when it meets the tolerance
    return Status.CONVERGED if error <= max(abs_tol, rel_tol * abs(value)) else Status.BAD_INTEGRAND


@lru_cache(maxsize=64)
def gauss_legendre(order: int) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Gauss–Legendre nodes and weights on [-1, 1]
    """
    nodes, weights = roots_legendre(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def composite_gauss_legendre(breaks: t.Sequence[float],
                             order: int) -> t.Tuple[np.ndarray, np.ndarray]:
    """
    Nodes and weights of the Gauss–Legendre rule of the given order
    applied on every panel [breaks[i], breaks[i + 1]].
    """
    breaks = np.asarray(breaks, dtype=float)
    nodes, weights = gauss_legendre(order)
    center = 0.5 * (breaks[:-1] + breaks[1:])
    half_length = 0.5 * np.diff(breaks)
    panel_nodes = center[:, None] + half_length[:, None] * nodes[None, :]
    panel_weights = half_length[:, None] * weights[None, :]
    return panel_nodes.ravel(), panel_weights.ravel()
