"""
The acceptance suite run by `dodiff validate`.

Every check compares the spectral kernel, the solvers or the bounds
against an independent reference from oracle.py, or against a property
any correct kernel must have. A check passes or fails; it never raises.
"""
import math
import typing as t
from collections import OrderedDict

import numpy as np
from scipy import integrate

from . import bounds, dparam, oracle, problems
from .debug import stopwatch, try_except
from .dparam import DiffusionParameter
from .helper.exceptions import DodiffError
from .helper.util import get_logger
from .spectral import DEFAULT_QUADRATURE, QuadratureSpec, SpectralContext, kernel, kernel_curve

logger = get_logger(__name__)


class CheckResult(t.NamedTuple):
    name: str
    passed: bool
    seconds: float
    detail: str


# Name -> (description, check function)
CHECKS: t.Dict[str, t.Tuple[str, t.Callable]] = OrderedDict()


def acceptance_check(name: str, description: str) -> t.Callable:
    def wrapper(check: t.Callable) -> t.Callable:
        CHECKS[name] = (description, check)
        return check
    return wrapper


def reference_suite() -> t.List[DiffusionParameter]:
    """
    Three single orders, three bands and one tabulated density
    """
    return [
        dparam.delta((1.0, 0.25)),
        dparam.delta((1.0, 0.5)),
        dparam.delta((1.0, 0.75)),
        dparam.band(0.2, 0.8),
        dparam.band(0.3, 0.7),
        dparam.band(0.5, 0.9),
        dparam.tabulated((0.1, 0.4, 0.6, 0.9), (0.5, 1.5, 1.5, 0.5)),
    ]


def _relative_gap(value: float, reference: float) -> float:
    return abs(value - reference) / abs(reference)


# ------------------------------------------
# ----------------- Checks -----------------
# ------------------------------------------


@acceptance_check('mittag_leffler', 'single order kernel equals E_μ(−(nπ)²t^μ)')
def check_mittag_leffler(q: QuadratureSpec) -> t.Tuple[bool, str]:
    worst = 0.0
    for mu in (0.25, 0.5, 0.75):
        C = dparam.delta((1.0, mu))
        for n in (1, 2, 3):
            kappa = n * math.pi
            curve = kernel_curve(SpectralContext(C, kappa), (0.01, 0.1, 1.0, 10.0), q)
            for t_value, value in zip(curve.times, curve.values):
                reference = oracle.mittag_leffler(mu, -kappa * kappa * t_value ** mu)
                worst = max(worst, _relative_gap(value, reference))
    return worst <= 1e-6, f"max relative gap {worst:.2e}"


@acceptance_check('erfcx_half_order', 'order ½ kernel equals erfcx(π²√t)')
def check_half_order(q: QuadratureSpec) -> t.Tuple[bool, str]:
    ctx = SpectralContext(dparam.delta((1.0, 0.5)), math.pi)
    worst = 0.0
    for t_value in (0.001, 0.01, 0.1):
        value, _ = kernel(ctx, t_value, q)
        worst = max(worst, _relative_gap(value, oracle.erfcx(math.pi ** 2 * math.sqrt(t_value))))
    return worst <= 1e-8, f"max relative gap {worst:.2e}"


@acceptance_check('normalization', 'B_n(0) = 1 for the reference suite, n = 1..5')
def check_normalization(q: QuadratureSpec) -> t.Tuple[bool, str]:
    worst = 0.0
    for C in reference_suite():
        for n in range(1, 6):
            value, _ = kernel(SpectralContext(C, n * math.pi), 0.0, q)
            worst = max(worst, abs(value - 1.0))
    return worst <= 1e-6, f"max |B(0) − 1| {worst:.2e}"


@acceptance_check('complete_monotonicity', 'B positive, decreasing and convex on t ∈ [1e-3, 1e3]')
def check_monotonicity(q: QuadratureSpec) -> t.Tuple[bool, str]:
    times = np.logspace(-3.0, 3.0, 50)
    failures = [repr(C) for C in reference_suite()
                if not kernel_curve(SpectralContext(C, math.pi), times, q).is_completely_monotone()]
    return not failures, "all monotone" if not failures else f"failed for {failures}"


@acceptance_check('bound_sandwich', 'lower ≤ I ≤ upper, both envelopes nonincreasing')
def check_sandwich(q: QuadratureSpec) -> t.Tuple[bool, str]:
    times = np.logspace(-1.0, 2.0, 20)
    problems_found = []
    for C in (dparam.band(0.2, 0.8), dparam.band(0.3, 0.7), dparam.band(0.5, 0.9)):
        for n in (1, 2):
            kappa = n * math.pi
            report = bounds.bounds_report(C, kappa, times, q)
            if not report.sandwich_holds():
                problems_found.append(f"{C!r}, n={n}: sandwich broken")
            if np.any(np.diff(report.lower) > 0.0) or np.any(np.diff(report.upper) > 0.0):
                problems_found.append(f"{C!r}, n={n}: envelope increases")
            # The closed form in Si and Ci must agree with direct quadrature
            for t_value in (times[0], times[-1]):
                quadrature = bounds.lower_bound(C, kappa, t_value, bounds.LowerMethod.QUADRATURE)
                closed = bounds.lower_bound(C, kappa, t_value, bounds.LowerMethod.CLOSED_FORM)
                if _relative_gap(closed, quadrature) > 1e-9:
                    problems_found.append(f"{C!r}, n={n}: closed-form lower bound {closed:.6e} "
                                          f"!= quadrature {quadrature:.6e} at t={t_value:g}")
    return not problems_found, "; ".join(problems_found) or "sandwich holds"


@acceptance_check('comparative_decay', 'the four slower-decay orderings hold on t ∈ [10, 1e3]')
def check_comparative_decay(q: QuadratureSpec) -> t.Tuple[bool, str]:
    times = np.logspace(1.0, 3.0, 20)
    pairs = [
        (dparam.delta((1.0, 0.3)), dparam.delta((1.0, 0.7))),
        (dparam.two_order_mixture(0.5, 0.3, 0.7), dparam.delta((1.0, 0.7))),
        (dparam.delta((1.0, 0.3)), dparam.band(0.3, 0.7)),
        (dparam.band(0.3, 0.7), dparam.delta((1.0, 0.7))),
    ]
    failures = [f"{C1!r} vs {C2!r}" for C1, C2 in pairs
                if bounds.compare_decay(C1, C2, math.pi, times, q).verdict != 'SLOWER(C1)']
    return not failures, "all orderings hold" if not failures else f"failed: {failures}"


@acceptance_check('talbot_inversion', 'spectral kernel agrees with Talbot inversion of b(s)')
def check_talbot(q: QuadratureSpec) -> t.Tuple[bool, str]:
    C = dparam.band(0.2, 0.8)
    transform = oracle.kernel_transform(C, math.pi)
    ctx = SpectralContext(C, math.pi)
    worst = 0.0
    for t_value in (0.1, 1.0, 10.0):
        value, _ = kernel(ctx, t_value, q)
        worst = max(worst, _relative_gap(value, oracle.laplace_invert(transform, t_value)))
    return worst <= 1e-5, f"max relative gap {worst:.2e}"


@acceptance_check('caputo_residual', 'the kernel satisfies the distributed-order ODE')
def check_residual(q: QuadratureSpec) -> t.Tuple[bool, str]:
    times = oracle.graded_grid(1.0, 2001)
    worst = 0.0
    for C in (dparam.single_order(0.5), dparam.band(0.3, 0.7)):
        curve = kernel_curve(SpectralContext(C, math.pi), times, q)
        worst = max(worst, oracle.caputo_residual(C, math.pi, curve, t_min=0.05))
    return worst <= 1e-3, f"max relative residual {worst:.2e}"


@acceptance_check('pole_freeness', '∫C(μ)r^μ sin(μθ)dμ > 0 on the cut plane')
def check_pole_freeness(q: QuadratureSpec) -> t.Tuple[bool, str]:
    theta_grid = np.linspace(0.0, math.pi, 52)[1:-1]
    r_grid = np.logspace(-4.0, 4.0, 81)
    smallest = min(float(np.min(dparam.eval_sin_weighted(C, r_grid, theta)))
                   for C in reference_suite() for theta in theta_grid)
    return smallest > 0.0, f"smallest value {smallest:.3e}"


@acceptance_check('boundary_problems', 'Neumann, Dirichlet and Cauchy solutions')
def check_boundary_problems(q: QuadratureSpec) -> t.Tuple[bool, str]:
    C = dparam.band(0.3, 0.7)
    failures = []

    neumann = problems.solve(C, problems.ProblemSpec(
        problems.Boundary.NEUMANN, problems.ClosedForm(problems.InitialTag.COSINE_MODE, k=0),
        t_grid=(0.0, 0.1, 1.0)), q)
    if np.any(neumann.values != 1.0):
        failures.append("Neumann constant mode decays")

    dirichlet = problems.solve(C, problems.ProblemSpec(
        problems.Boundary.DIRICHLET, problems.ClosedForm(problems.InitialTag.PARABOLA),
        t_grid=(0.0, 0.1, 1.0), mode_cutoff=16), q)
    if np.any(dirichlet.values[:, [0, -1]] != 0.0):
        failures.append("Dirichlet endpoints are not zero")

    x_grid = tuple(np.linspace(-15.0, 15.0, 601))
    gaussian = problems.ClosedForm(problems.InitialTag.GAUSSIAN, center=0.0, width=0.5)
    cauchy = problems.solve(C, problems.ProblemSpec(
        problems.Boundary.CAUCHY, gaussian, t_grid=(0.0, 0.1, 1.0),
        x_grid=x_grid, domain=(-15.0, 15.0)), q)
    mass = cauchy.mass()
    drift = float(np.max(np.abs(mass - mass[0]))) / mass[0]
    if drift > 1e-4:
        failures.append(f"Cauchy mass drifts by {drift:.2e}")

    heat = problems.solve(dparam.delta((1.0, 1.0)), problems.ProblemSpec(
        problems.Boundary.CAUCHY, gaussian, t_grid=(0.1,), x_grid=x_grid, domain=(-15.0, 15.0)), q)
    reference = oracle.gaussian_heat_solution(np.asarray(x_grid), 0.1, 0.5)
    gap = float(np.max(np.abs(heat.values[0] - reference)))
    if gap > 1e-4:
        failures.append(f"classical Cauchy solution off by {gap:.2e}")
    return not failures, "; ".join(failures) or f"mass drift {drift:.1e}, heat gap {gap:.1e}"


@acceptance_check('band_closed_forms', 'band moments match direct quadrature on r ∈ [1e-6, 1e6]')
def check_band_closed_forms(q: QuadratureSpec) -> t.Tuple[bool, str]:
    C = dparam.band(0.2, 0.8)
    r_grid = np.concatenate([np.logspace(-6.0, 6.0, 25), [1.0]])
    worst = 0.0
    for r in r_grid:
        cos_part, sin_part = C.trig_moments(np.array(r))
        log_r = math.log(r)
        for closed, shape in ((cos_part, math.cos), (sin_part, math.sin)):
            reference = integrate.quad(lambda mu: C.density * math.exp(mu * log_r) * shape(math.pi * mu),
                                       C.nu1, C.nu2, epsabs=0.0, epsrel=1e-13, limit=200)[0]
            scale = integrate.quad(lambda mu: C.density * math.exp(mu * log_r),
                                   C.nu1, C.nu2, epsabs=0.0, epsrel=1e-13)[0]
            worst = max(worst, abs(float(closed) - reference) / scale)
    return worst <= 1e-10, f"max scaled gap {worst:.2e}"


# ------------------------------------------
# ----------------- Runner -----------------
# ------------------------------------------


def run_check(name: str, q: QuadratureSpec = DEFAULT_QUADRATURE) -> CheckResult:
    """
    Run one check, timing it and turning any error into a failure
    """
    description, check = CHECKS[name]
    elapsed = []

    def on_error(error, tb):
        logger.debug(f"acceptance check '{name}' raised:\n{tb}")
        return False, f"{type(error).__name__}: {error}"

    guarded = stopwatch(elapsed.append)(
        try_except((DodiffError, ArithmeticError, ValueError), on_error)(check))
    passed, detail = guarded(q)
    logger.info(f"{name}: {'PASS' if passed else 'FAIL'} ({detail})")
    return CheckResult(name, bool(passed), elapsed[0], detail)


def run_all(q: QuadratureSpec = DEFAULT_QUADRATURE,
            names: t.Sequence[str] = None) -> t.List[CheckResult]:
    names = list(CHECKS) if names is None else list(names)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise KeyError(f"Unknown acceptance checks: {unknown}. Expected some of {list(CHECKS)}")
    return [run_check(name, q) for name in names]


def format_table(results: t.Sequence[CheckResult]) -> str:
    width = max([len(result.name) for result in results] + [5])
    lines = [f"{'check':<{width}}  result  seconds  detail"]
    for result in results:
        lines.append(f"{result.name:<{width}}  {'PASS' if result.passed else 'FAIL':<6}  "
                     f"{result.seconds:7.2f}  {result.detail}")
    passed = sum(result.passed for result in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
