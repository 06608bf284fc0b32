import logging
import os

import pytest

from definitions import ITEMS_TO_EXCLUDE_IN_TEST, ROOT_DIR, SRC_DIR, TESTS_TO_EXCLUDE
from src.dodiff.app import App, ExitCode
from src.dodiff.helper.exceptions import (
    ConfigError,
    DeltaUnsupportedError,
    DomainError,
    NegativeWeightError,
    QuadratureNonconvergenceError,
)
from tests.common.fixtures import app_fixture
from tests.common.util import cleanup_files


def get_src_python_files(root_folder: str, exclude) -> set:
    src_files = set()
    for _, _, files in os.walk(root_folder):
        for file in files:
            if file.endswith(".py") and file != "__init__.py" and file not in exclude:
                src_files.add(file)
    return src_files


def get_test_python_files(root_folder: str) -> set:
    test_files = set()
    for subdir, dirs, files in os.walk(root_folder):
        dirs[:] = [d for d in dirs if d not in ITEMS_TO_EXCLUDE_IN_TEST]
        for file in files:
            if file.startswith("test_") and file.endswith(".py"):
                test_files.add(file.replace("test_", "", 1))
    return test_files


# -----------------------------------------
# ------------ Begin Unit Test ------------
# -----------------------------------------


def test_unit_test_count():
    """
    Every source file has a test_{name}.py somewhere under tests/
    """
    test_path = os.path.join(ROOT_DIR, "tests")
    assert os.path.exists(SRC_DIR), f"source folder does not exist in path: {SRC_DIR}"

    src_files = get_src_python_files(SRC_DIR, exclude=TESTS_TO_EXCLUDE)
    test_files = get_test_python_files(test_path)
    missing_unit_tests = sorted(src_files - test_files)
    assert not missing_unit_tests, f"Missing unit tests for: {missing_unit_tests}"


def test_set_debug(app_fixture):
    assert not app_fixture.debug
    assert app_fixture.logging_level == logging.WARNING
    app_fixture.debug = True
    assert app_fixture.debug
    assert app_fixture.logger.level == logging.DEBUG
    app_fixture.debug = False
    assert app_fixture.logger.level == logging.WARNING


@pytest.mark.parametrize("debug_mode", [
    1, "True", None, [],
])
def test_invalid_set_debug(app_fixture, debug_mode):
    with pytest.raises(TypeError):
        app_fixture.debug = debug_mode


@pytest.mark.parametrize("threads", [0, -2, 1.5, True])
def test_invalid_threads(app_fixture, threads):
    with pytest.raises(TypeError):
        app_fixture.threads = threads


def test_configs_are_independent():
    first = App(__name__, verbose=True, threads=4)
    second = App(__name__)
    assert first.logging_level == logging.INFO
    assert first.threads == 4
    assert second.threads == App.DEFAULT_CONFIGS['threads']
    assert first.config is not second.config


def test_log_file(tmp_path):
    log_path = os.path.join(str(tmp_path), "dodiff_app.log")
    app = App(f"{__name__}.file", debug=True, log_path=log_path)
    app.log_debug("debug line")
    app.logger.warning("warning line")
    for handler in app.logger.handlers:
        handler.flush()
    with open(log_path) as log_file:
        content = log_file.read()
    assert "debug line" in content
    assert "warning line" in content
    for handler in list(app.logger.handlers):
        app.logger.removeHandler(handler)
        handler.close()
    assert cleanup_files(log_path)


# -----------------------------------------
# --------------- Commands ----------------
# -----------------------------------------


def test_command_registration(app_fixture):
    @app_fixture.command('echo', help='Echo the options', needs_config=False)
    def echo(app, run_config, **options):
        return options['code']

    assert app_fixture.commands['echo'].help == 'Echo the options'
    assert not app_fixture.commands['echo'].needs_config
    assert app_fixture.run('echo', code=ExitCode.SUCCESS) == ExitCode.SUCCESS

    with pytest.raises(ValueError):
        app_fixture.command('echo')(echo)
    with pytest.raises(KeyError):
        app_fixture.command('other', hint='unknown property')
    with pytest.raises(TypeError):
        app_fixture.command(42)


def test_unknown_command(app_fixture):
    with pytest.raises(KeyError):
        app_fixture.run('missing')


def test_missing_configuration(app_fixture):
    calls = []
    app_fixture.command('needs')(lambda app, run_config: calls.append(run_config))
    assert app_fixture.run('needs') == ExitCode.CONFIG_ERROR
    assert not calls


@pytest.mark.parametrize("error, code", [
    (ConfigError("bad document"), ExitCode.CONFIG_ERROR),
    (NegativeWeightError("negative weight", errors={'weight': -1.0}), ExitCode.CONFIG_ERROR),
    (ValueError("bad value"), ExitCode.CONFIG_ERROR),
    (TypeError("bad type"), ExitCode.CONFIG_ERROR),
    (DomainError("outside"), ExitCode.NUMERICAL_FAILURE),
    (DeltaUnsupportedError("needs a density"), ExitCode.NUMERICAL_FAILURE),
    (QuadratureNonconvergenceError("no convergence", achieved_error=1.0), ExitCode.NUMERICAL_FAILURE),
])
def test_error_mapping(app_fixture, error, code):
    @app_fixture.command('fail', needs_config=False)
    def fail(app, run_config):
        raise error

    assert app_fixture.run('fail') == code


def test_unexpected_errors_propagate(app_fixture):
    @app_fixture.command('crash', needs_config=False)
    def crash(app, run_config):
        raise RuntimeError("not a dodiff error")

    with pytest.raises(RuntimeError):
        app_fixture.run('crash')
