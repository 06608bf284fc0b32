# Local imports
from .__version__ import __version__, PROJECT_NAME

from .dparam import (
    DiffusionParameter,
    DeltaMixture,
    UniformBand,
    TabulatedDensity,
    Moments,
    validate,
    moments,
    eval_h,
    eval_g,
    eval_sin_weighted,
    delta,
    single_order,
    two_order_mixture,
    band,
    tabulated,
)

from .spectral import (
    QuadratureSpec,
    SpectralContext,
    KernelCurve,
    kernel_density,
    kernel,
    kernel_curve,
    central_kernel_integral,
)

from .problems import (
    ProblemSpec,
    SolutionField,
    GreenFunction,
    fourier_coefficients,
    fourier_transform,
    solve,
    solve_dirichlet,
    solve_neumann,
    solve_cauchy,
    green_function,
)

from .bounds import (
    BoundsReport,
    CompareVerdict,
    central_integral,
    find_m,
    upper_bound,
    lower_bound,
    bounds_report,
    compare_decay,
    sufficient_condition,
)

from .config import RunConfig, load_config

from .debug import (
    try_except,
    stopwatch,
    log_trace,
)
