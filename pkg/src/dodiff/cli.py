"""
Command line front end.

    dodiff kernel   --config run.json [--out prefix] [--rel-tol x] [--threads k]
    dodiff solve    --config run.json
    dodiff bounds   --config run.json
    dodiff compare  --config run.json
    dodiff validate [--config run.json]

Each command writes one CSV file named <prefix><command>.csv with
17 significant digits per value. --dump-config prints the effective
configuration as JSON and exits without computing anything.

Exit codes: 0 success, 1 failed validation, 2 bad configuration,
3 numerical failure.
"""
import argparse
import csv
import os
import sys
import typing as t
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import acceptance, bounds, problems
from .__version__ import __version__
from .app import App, ExitCode
from .config import RunConfig, load_config
from .debug import log_trace
from .helper.exceptions import ConfigError, InvalidDiffusionParameterError
from .helper.util import format_float, get_logger
from .spectral import DEFAULT_QUADRATURE, SpectralContext, kernel_curve

logger = get_logger(__name__)


class FileName:
    KERNEL = 'kernel.csv'
    SOLUTION = 'solution.csv'
    BOUNDS = 'bounds.csv'
    COMPARE = 'compare.csv'


class Header:
    KERNEL = ('t', 'n', 'B', 'err')
    SOLUTION = ('t', 'x', 'u')
    BOUNDS = ('t', 'I', 'lower', 'upper', 'm', 'r0')
    COMPARE = ('t', 'I1', 'I2', 'margin')


# -----------------------------------
# -------- Private Functions --------
# -----------------------------------


def _output_path(run_config: RunConfig, file_name: str) -> str:
    path = f"{run_config.output}{file_name}"
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    return path


def _write_csv(path: str, header: t.Sequence[str], rows: t.Iterable[t.Sequence[float]]) -> int:
    """
    Returns:
        The number of rows written
    """
    count = 0
    with open(path, 'w', newline='') as csv_file:
        writer = csv.DictWriter(csv_file, fieldnames=header, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({key: format_float(value) for key, value in zip(header, row)})
            count += 1
    logger.info(f"wrote {count} rows to {path}")
    return count


def _sorted_times(run_config: RunConfig) -> np.ndarray:
    return np.unique(run_config.t_grid.values())


def _first_wavenumber(run_config: RunConfig, command: str) -> t.Tuple[float, float]:
    wavenumbers = run_config.wavenumbers
    if len(wavenumbers) > 1:
        logger.warning(f"{command} uses one mode per run; "
                       f"ignoring all but n = {wavenumbers[0][0]:g}")
    return wavenumbers[0]


# -----------------------------------
# ------------ Commands -------------
# -----------------------------------


@log_trace(__name__)
def kernel_command(app: App, run_config: RunConfig) -> int:
    """
    B_n(t) for every (t, n); rows sorted by t, then n
    """
    times = _sorted_times(run_config)
    wavenumbers = sorted(run_config.wavenumbers)
    C = run_config.parameter

    def curve_of(wavenumber):
        return kernel_curve(SpectralContext(C, wavenumber[1]), times, run_config.quadrature)

    if run_config.threads > 1 and len(wavenumbers) > 1:
        with ThreadPoolExecutor(max_workers=run_config.threads) as pool:
            curves = list(pool.map(curve_of, wavenumbers))
    else:
        curves = [curve_of(wavenumber) for wavenumber in wavenumbers]

    rows = [(t_value, label, curve.values[index], curve.abs_err_estimates[index])
            for index, t_value in enumerate(times)
            for (label, _), curve in zip(wavenumbers, curves)]
    _write_csv(_output_path(run_config, FileName.KERNEL), Header.KERNEL, rows)
    return ExitCode.SUCCESS


@log_trace(__name__)
def solve_command(app: App, run_config: RunConfig) -> int:
    spec = run_config.problem_spec()
    solution = problems.solve(run_config.parameter, spec, run_config.quadrature)
    rows = [(t_value, x_value, solution.values[i, j])
            for i, t_value in enumerate(solution.t_grid)
            for j, x_value in enumerate(solution.x_grid)]
    _write_csv(_output_path(run_config, FileName.SOLUTION), Header.SOLUTION, rows)
    return ExitCode.SUCCESS


@log_trace(__name__)
def bounds_command(app: App, run_config: RunConfig) -> int:
    _, kappa = _first_wavenumber(run_config, 'bounds')
    report = bounds.bounds_report(run_config.parameter, kappa, _sorted_times(run_config),
                                  run_config.quadrature)
    rows = [(t_value, central, lower, upper, report.m, report.r0)
            for t_value, central, lower, upper
            in zip(report.times, report.central, report.lower, report.upper)]
    _write_csv(_output_path(run_config, FileName.BOUNDS), Header.BOUNDS, rows)
    return ExitCode.SUCCESS


@log_trace(__name__)
def compare_command(app: App, run_config: RunConfig) -> int:
    if len(run_config.parameters) != 2:
        raise ConfigError(f"compare needs two diffusion parameters. Got: {len(run_config.parameters)}")
    _, kappa = _first_wavenumber(run_config, 'compare')
    C1, C2 = run_config.parameters
    verdict = bounds.compare_decay(C1, C2, kappa, _sorted_times(run_config), run_config.quadrature)
    rows = zip(verdict.times, verdict.first, verdict.second, verdict.pointwise_margin)
    _write_csv(_output_path(run_config, FileName.COMPARE), Header.COMPARE, rows)
    print(f"verdict: {verdict.verdict}")
    print(f"sufficient condition: {'holds' if verdict.sufficient_condition_holds else 'does not hold'}")
    return ExitCode.SUCCESS


@log_trace(__name__)
def validate_command(app: App, run_config: t.Optional[RunConfig], rel_tol: float = None) -> int:
    quadrature = DEFAULT_QUADRATURE if run_config is None else run_config.quadrature
    quadrature = quadrature.with_overrides(rel_tol=rel_tol)
    results = acceptance.run_all(quadrature)
    print(acceptance.format_table(results))
    return ExitCode.SUCCESS if all(result.passed for result in results) else ExitCode.VALIDATION_FAILURE


# name -> (handler, help, needs a configuration document)
COMMANDS = {
    'kernel': (kernel_command, 'Tabulate the time kernel B_n(t)', True),
    'solve': (solve_command, 'Solve the configured boundary-value problem', True),
    'bounds': (bounds_command, 'Central integral with its lower and upper bounds', True),
    'compare': (compare_command, 'Which of two parameters decays more slowly', True),
    'validate': (validate_command, 'Run the acceptance suite', False),
}


# -----------------------------------
# --------- Public Functions --------
# -----------------------------------


def create_app(debug: bool = False, verbose: bool = False,
               log_path: str = None, threads: int = 1) -> App:
    app = App(debug=debug, verbose=verbose, log_path=log_path, threads=threads)
    for name, (handler, help_text, needs_config) in COMMANDS.items():
        app.command(name, help=help_text, needs_config=needs_config)(handler)
    return app


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="Path to the JSON run configuration")
    common.add_argument('--out', default=None, help="Output path prefix, overrides 'output'")
    common.add_argument('--rel-tol', type=float, default=None, help="Relative quadrature tolerance")
    common.add_argument('--threads', type=int, default=None, help="Worker threads")
    common.add_argument('--dump-config', action='store_true',
                        help="Print the effective configuration and exit")
    common.add_argument('--debug', action='store_true', help="Log at DEBUG level")
    common.add_argument('--verbose', action='store_true', help="Log at INFO level")
    common.add_argument('--log-file', default=None, help="Also append log records to this file")

    parser = argparse.ArgumentParser(prog='dodiff',
                                     description="Distributed-order sub-diffusion kernels, "
                                                 "solutions and bounds")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)
    for name, (_, help_text, _) in COMMANDS.items():
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def main(argv: t.Sequence[str] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is not None and args.threads < 1:
        print(f"dodiff: --threads must be positive. Got: {args.threads}", file=sys.stderr)
        return ExitCode.CONFIG_ERROR
    if args.rel_tol is not None and not args.rel_tol > 0.0:
        print(f"dodiff: --rel-tol must be positive. Got: {args.rel_tol}", file=sys.stderr)
        return ExitCode.CONFIG_ERROR

    app = create_app(debug=args.debug, verbose=args.verbose,
                     log_path=args.log_file, threads=args.threads or 1)

    run_config = None
    try:
        if args.config is not None:
            run_config = load_config(args.config).with_overrides(output=args.out,
                                                                 rel_tol=args.rel_tol,
                                                                 threads=args.threads)
    except (ConfigError, InvalidDiffusionParameterError) as error:
        app.logger.error(f"{args.command}: {error}")
        return ExitCode.CONFIG_ERROR

    if args.dump_config:
        if run_config is None:
            app.logger.error("--dump-config needs --config")
            return ExitCode.CONFIG_ERROR
        print(run_config.dumps())
        return ExitCode.SUCCESS

    if args.command == 'validate':
        return app.run(args.command, run_config, rel_tol=args.rel_tol)
    return app.run(args.command, run_config)


if __name__ == '__main__':
    sys.exit(main())
