import glob
import json
import math
import os

import numpy as np
import pytest

from definitions import SAMPLES_DIR
from src.dodiff import dparam
from src.dodiff.config import GridSpec, ProblemConfig, RunConfig, Spacing, load_config
from src.dodiff.helper.exceptions import ConfigError, InvalidDiffusionParameterError
from src.dodiff.problems import Boundary, ClosedForm, InitialTag
from src.dodiff.spectral import QuadratureSpec
from tests.common.util import write_config

BAND_DOC = {
    "diffusion_parameter": {"type": "band", "nu1": 0.2, "nu2": 0.8},
    "modes": [1, 3],
    "t_grid": {"min": 0.001, "max": 1000.0, "count": 7, "spacing": "log"},
    "x_grid": {"values": [0.0, 0.25, 0.5]},
    "problem": {"boundary": "dirichlet", "initial": {"type": "sine_mode", "k": 1}, "mode_cutoff": 8},
    "quadrature": {"rel_tol": 1e-8},
    "output": "runs/band_",
}


# ------------------------------------------
# ------------------ Grids -----------------
# ------------------------------------------


def test_grid_values():
    assert np.allclose(GridSpec.from_dict({'min': 0.001, 'max': 1000.0, 'count': 7, 'spacing': 'log'}).values(),
                       [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3], rtol=1e-13)
    assert np.allclose(GridSpec(0.0, 1.0, 5).values(), [0.0, 0.25, 0.5, 0.75, 1.0])
    assert np.array_equal(GridSpec(2.0, 5.0, 1).values(), [2.0])
    assert np.array_equal(GridSpec.from_dict({'values': [3, 1, 2]}).values(), [3.0, 1.0, 2.0])


def test_grid_to_dict():
    grid = GridSpec(0.1, 10.0, 3, Spacing.LOG)
    assert GridSpec.from_dict(grid.to_dict()) == grid
    assert GridSpec(explicit=(1.0, 2.0)).to_dict() == {'values': [1.0, 2.0]}


@pytest.mark.parametrize("kwargs", [
    {'minimum': 0.0, 'maximum': 1.0},
    {'minimum': 0.0, 'maximum': 1.0, 'count': 0},
    {'minimum': 2.0, 'maximum': 1.0, 'count': 3},
    {'minimum': 0.0, 'maximum': 1.0, 'count': 3, 'spacing': 'cubic'},
    {'minimum': 0.0, 'maximum': 1.0, 'count': 3, 'spacing': Spacing.LOG},
    {'explicit': ()},
])
def test_invalid_grid(kwargs):
    with pytest.raises(ConfigError):
        GridSpec(**kwargs)


def test_grid_key_typos():
    with pytest.raises(KeyError):
        GridSpec.from_dict({'min': 0.0, 'max': 1.0, 'points': 3})
    with pytest.raises(TypeError):
        GridSpec.from_dict({'min': 0.0, 'max': 1.0, 'count': 3.0})


# ------------------------------------------
# --------------- Problems -----------------
# ------------------------------------------


def test_problem_config():
    problem = ProblemConfig.from_dict({'boundary': 'cauchy', 'initial': {'type': 'gaussian', 'width': 0.5},
                                       'domain': [-5, 5]})
    assert problem.boundary == Boundary.CAUCHY
    assert problem.initial == ClosedForm(InitialTag.GAUSSIAN, width=0.5)
    assert problem.domain == (-5, 5)
    assert ProblemConfig.from_dict(problem.to_dict()) == problem


@pytest.mark.parametrize("doc", [
    {'boundary': 'robin', 'initial': {'type': 'parabola'}},
    {'boundary': 'dirichlet'},
])
def test_invalid_problem_config(doc):
    with pytest.raises(ConfigError):
        ProblemConfig.from_dict(doc)


# ------------------------------------------
# ------------ Run configuration -----------
# ------------------------------------------


def test_from_dict():
    config = RunConfig.from_dict(BAND_DOC)
    assert config.parameter == dparam.band(0.2, 0.8)
    assert config.modes == (1, 3)
    assert config.quadrature == QuadratureSpec(rel_tol=1e-8)
    assert config.threads == 1
    assert config.wavenumbers == [(1.0, math.pi), (3.0, 3.0 * math.pi)]


def test_round_trip():
    config = RunConfig.from_dict(BAND_DOC)
    assert RunConfig.from_dict(config.to_dict()) == config
    assert RunConfig.from_dict(json.loads(config.dumps())) == config


def test_two_parameters_and_kappa():
    config = RunConfig.from_dict({
        "diffusion_parameter": [{"type": "delta", "components": [[1.0, 0.3]]},
                                {"type": "delta", "components": [[1.0, 0.7]]}],
        "kappa": [2.0 * math.pi],
        "t_grid": {"values": [1.0]},
    })
    assert len(config.parameters) == 2
    label, kappa = config.wavenumbers[0]
    assert label == pytest.approx(2.0)
    assert kappa == 2.0 * math.pi
    assert RunConfig.from_dict(config.to_dict()) == config


def test_default_mode():
    config = RunConfig.from_dict({"diffusion_parameter": {"type": "band", "nu1": 0.2, "nu2": 0.8},
                                  "t_grid": {"values": [1.0]}})
    assert config.wavenumbers == [(1.0, math.pi)]
    assert config.output == ''


@pytest.mark.parametrize("changes", [
    {"diffusion_parameter": None},
    {"t_grid": None},
    {"kappa": [1.0]},
    {"modes": [0]},
    {"modes": []},
    {"threads": 0},
    {"threads": "2"},
    {"frequency": 2},
    {"t_grid": {"min": 1.0}},
    {"quadrature": {"rel_tol": -1.0}},
    {"problem": {"boundary": "robin", "initial": {"type": "parabola"}}},
    {"problem": {"boundary": "dirichlet", "initial": {"type": "triangle"}}},
])
def test_invalid_run_config(changes):
    doc = {key: value for key, value in {**BAND_DOC, **changes}.items() if value is not None}
    with pytest.raises(ConfigError):
        RunConfig.from_dict(doc)


def test_invalid_parameter_is_reported_as_such():
    doc = {**BAND_DOC, "diffusion_parameter": {"type": "band", "nu1": 0.8, "nu2": 0.2}}
    with pytest.raises(InvalidDiffusionParameterError):
        RunConfig.from_dict(doc)


def test_too_many_parameters():
    parameter = {"type": "band", "nu1": 0.2, "nu2": 0.8}
    with pytest.raises(ConfigError):
        RunConfig.from_dict({**BAND_DOC, "diffusion_parameter": [parameter] * 3})
    with pytest.raises(ConfigError):
        RunConfig.from_dict([BAND_DOC])


def test_problem_spec():
    spec = RunConfig.from_dict({**BAND_DOC, "t_grid": {"values": [1.0, 0.0]}}).problem_spec()
    assert spec.t_grid == (0.0, 1.0)
    assert spec.x_grid == (0.0, 0.25, 0.5)
    assert spec.mode_cutoff == 8

    without_problem = {key: value for key, value in BAND_DOC.items() if key != 'problem'}
    with pytest.raises(ConfigError):
        RunConfig.from_dict(without_problem).problem_spec()

    outside = {**BAND_DOC, "problem": {"boundary": "dirichlet", "initial": {"type": "parabola"},
                                       "domain": [0.0, 2.0]}}
    with pytest.raises(ConfigError):
        RunConfig.from_dict(outside).problem_spec()


def test_overrides():
    config = RunConfig.from_dict(BAND_DOC)
    assert config.with_overrides() == config
    changed = config.with_overrides(output="out/", rel_tol=1e-6, threads=4)
    assert changed.output == "out/"
    assert changed.quadrature.rel_tol == 1e-6
    assert changed.threads == 4
    with pytest.raises(ConfigError):
        config.with_overrides(rel_tol=-1.0)
    with pytest.raises(ConfigError):
        config.with_overrides(threads=0)


# ------------------------------------------
# --------------- Loading ------------------
# ------------------------------------------


def test_load_config(tmp_path):
    path = write_config(tmp_path, BAND_DOC)
    assert load_config(path) == RunConfig.from_dict(BAND_DOC)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(os.path.join(str(tmp_path), "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{\"t_grid\": ")
    with pytest.raises(ConfigError):
        load_config(str(broken))


def test_sample_configs_load():
    paths = sorted(glob.glob(os.path.join(SAMPLES_DIR, "configs", "*.json")))
    assert paths
    for path in paths:
        assert isinstance(load_config(path), RunConfig)
