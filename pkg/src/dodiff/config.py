"""
Run configuration: one JSON document per run.

    {
        "diffusion_parameter": {"type": "band", "nu1": 0.2, "nu2": 0.8},
        "modes": [1, 2, 3],
        "t_grid": {"min": 1e-3, "max": 1e3, "count": 50, "spacing": "log"},
        "x_grid": {"values": [0.0, 0.25, 0.5]},
        "problem": {"boundary": "dirichlet", "initial": {"type": "sine_mode", "k": 1}},
        "quadrature": {"rel_tol": 1e-10},
        "output": "runs/band_"
    }
"""
import json
import math
import typing as t
from collections import OrderedDict
from dataclasses import dataclass, replace

import numpy as np

from . import dparam
from .dparam import DiffusionParameter
from .helper.exceptions import ConfigError, InvalidDiffusionParameterError
from .helper.util import create_properties
from .problems import DEFAULT_MODE_CUTOFF, Boundary, InitialCondition, ProblemSpec, initial_from_dict
from .spectral import QuadratureSpec


class Spacing:
    LINEAR = 'linear'
    LOG = 'log'


@dataclass(frozen=True)
class GridSpec:
    minimum: float = None
    maximum: float = None
    count: int = None
    spacing: str = Spacing.LINEAR
    # Explicit values take precedence over the range description
    explicit: t.Optional[t.Tuple[float, ...]] = None

    PROPERTIES: t.ClassVar[OrderedDict] = OrderedDict({
        'min': ((float, int), None),
        'max': ((float, int), None),
        'count': (int, None),
        'spacing': (str, Spacing.LINEAR),
        'values': (list, None),
    })

    def __post_init__(self):
        if self.explicit is not None:
            if not len(self.explicit):
                raise ConfigError("Grid 'values' must not be empty")
            object.__setattr__(self, 'explicit', tuple(float(v) for v in self.explicit))
            return
        if self.minimum is None or self.maximum is None or self.count is None:
            raise ConfigError("A grid needs either 'values' or all of 'min', 'max' and 'count'")
        if self.count < 1:
            raise ConfigError(f"Grid 'count' must be positive. Got: {self.count}")
        if self.maximum < self.minimum:
            raise ConfigError(f"Grid 'max' {self.maximum} is below 'min' {self.minimum}")
        if self.spacing not in (Spacing.LINEAR, Spacing.LOG):
            raise ConfigError(f"Unknown grid spacing '{self.spacing}'")
        if self.spacing == Spacing.LOG and self.minimum <= 0.0:
            raise ConfigError(f"Log spacing needs 'min' > 0. Got: {self.minimum}")

    @classmethod
    def from_dict(cls, doc: t.Mapping) -> 'GridSpec':
        properties = create_properties(cls.PROPERTIES, **dict(doc))
        if properties['values'] is not None:
            return cls(explicit=tuple(properties['values']))
        return cls(properties['min'], properties['max'], properties['count'], properties['spacing'])

    def to_dict(self) -> t.Dict:
        if self.explicit is not None:
            return {'values': list(self.explicit)}
        return {'min': self.minimum, 'max': self.maximum, 'count': self.count, 'spacing': self.spacing}

    def values(self) -> np.ndarray:
        if self.explicit is not None:
            return np.array(self.explicit)
        if self.count == 1:
            return np.array([float(self.minimum)])
        if self.spacing == Spacing.LOG:
            return np.logspace(math.log10(self.minimum), math.log10(self.maximum), self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True)
class ProblemConfig:
    boundary: str
    initial: InitialCondition
    mode_cutoff: int = DEFAULT_MODE_CUTOFF
    domain: t.Optional[t.Tuple[float, float]] = None

    PROPERTIES: t.ClassVar[OrderedDict] = OrderedDict({
        'boundary': (str, None),
        'initial': (dict, None),
        'mode_cutoff': (int, DEFAULT_MODE_CUTOFF),
        'domain': (list, None),
    })

    @classmethod
    def from_dict(cls, doc: t.Mapping) -> 'ProblemConfig':
        properties = create_properties(cls.PROPERTIES, **dict(doc))
        if properties['boundary'] not in Boundary.ALL:
            raise ConfigError(f"Problem 'boundary' must be one of {Boundary.ALL}. "
                              f"Got: {properties['boundary']}")
        if properties['initial'] is None:
            raise ConfigError("Problem needs an 'initial' condition")
        domain = properties['domain']
        return cls(properties['boundary'], initial_from_dict(properties['initial']),
                   properties['mode_cutoff'], None if domain is None else tuple(domain))

    def to_dict(self) -> t.Dict:
        doc = {'boundary': self.boundary, 'initial': self.initial.to_dict(),
               'mode_cutoff': self.mode_cutoff}
        if self.domain is not None:
            doc['domain'] = list(self.domain)
        return doc


@dataclass(frozen=True)
class RunConfig:
    parameters: t.Tuple[DiffusionParameter, ...]
    t_grid: GridSpec
    modes: t.Optional[t.Tuple[int, ...]] = None
    kappa: t.Optional[t.Tuple[float, ...]] = None
    x_grid: t.Optional[GridSpec] = None
    problem: t.Optional[ProblemConfig] = None
    quadrature: QuadratureSpec = QuadratureSpec()
    output: str = ''
    threads: int = 1

    # Key: (accepted types, default)
    PROPERTIES: t.ClassVar[OrderedDict] = OrderedDict({
        'diffusion_parameter': ((dict, list), None),
        'modes': (list, None),
        'kappa': (list, None),
        't_grid': (dict, None),
        'x_grid': (dict, None),
        'problem': (dict, None),
        'quadrature': (dict, None),
        'output': (str, ''),
        'threads': (int, 1),
    })

    def __post_init__(self):
        if not 1 <= len(self.parameters) <= 2:
            raise ConfigError(f"Expected one or two diffusion parameters. Got: {len(self.parameters)}")
        if self.modes is not None and self.kappa is not None:
            raise ConfigError("Give either 'modes' or 'kappa', not both")
        if self.modes is not None and (not self.modes or any(n < 1 for n in self.modes)):
            raise ConfigError(f"'modes' must be a nonempty list of positive integers. Got: {self.modes}")
        if self.kappa is not None and (not self.kappa or any(k <= 0.0 for k in self.kappa)):
            raise ConfigError(f"'kappa' must be a nonempty list of positive reals. Got: {self.kappa}")
        if self.threads < 1:
            raise ConfigError(f"'threads' must be positive. Got: {self.threads}")

    # ------------------------
    # ------ Properties ------
    # ------------------------

    @property
    def parameter(self) -> DiffusionParameter:
        return self.parameters[0]

    @property
    def wavenumbers(self) -> t.List[t.Tuple[float, float]]:
        """
        (label, κ) pairs: label n for κ = nπ, or κ/π when κ is given directly
        """
        if self.kappa is not None:
            return [(k / math.pi, k) for k in self.kappa]
        modes = self.modes if self.modes is not None else (1,)
        return [(float(n), n * math.pi) for n in modes]

    def problem_spec(self) -> ProblemSpec:
        if self.problem is None:
            raise ConfigError("This command needs a 'problem' section")
        x_grid = None if self.x_grid is None else tuple(self.x_grid.values())
        try:
            return ProblemSpec(boundary=self.problem.boundary, initial=self.problem.initial,
                               t_grid=tuple(np.sort(self.t_grid.values())), x_grid=x_grid,
                               mode_cutoff=self.problem.mode_cutoff, domain=self.problem.domain,
                               threads=self.threads)
        except (TypeError, ValueError) as error:
            raise ConfigError(f"Invalid problem section: {error}") from error

    # --------------------------
    # ----- Public Methods -----
    # --------------------------

    @classmethod
    def from_dict(cls, doc: t.Mapping) -> 'RunConfig':
        """
        Raises:
            ConfigError, or InvalidDiffusionParameterError for a bad parameter
        """
        if not isinstance(doc, t.Mapping):
            raise ConfigError(f"A run configuration must be a JSON object. Got: {type(doc).__name__}")
        try:
            properties = create_properties(cls.PROPERTIES, **dict(doc))
            raw_parameters = properties['diffusion_parameter']
            if raw_parameters is None:
                raise ConfigError("Missing 'diffusion_parameter'")
            if isinstance(raw_parameters, dict):
                raw_parameters = [raw_parameters]
            if properties['t_grid'] is None:
                raise ConfigError("Missing 't_grid'")

            return cls(
                parameters=tuple(dparam.from_dict(item) for item in raw_parameters),
                t_grid=GridSpec.from_dict(properties['t_grid']),
                modes=None if properties['modes'] is None else tuple(int(n) for n in properties['modes']),
                kappa=None if properties['kappa'] is None else tuple(float(k) for k in properties['kappa']),
                x_grid=None if properties['x_grid'] is None else GridSpec.from_dict(properties['x_grid']),
                problem=None if properties['problem'] is None else ProblemConfig.from_dict(properties['problem']),
                quadrature=QuadratureSpec.from_dict(properties['quadrature']),
                output=properties['output'],
                threads=properties['threads'],
            )
        except (ConfigError, InvalidDiffusionParameterError):
            raise
        except (KeyError, TypeError, ValueError) as error:
            raise ConfigError(f"Invalid run configuration: {error}") from error

    def to_dict(self) -> OrderedDict:
        doc = OrderedDict()
        doc['diffusion_parameter'] = [C.to_dict() for C in self.parameters]
        if self.modes is not None:
            doc['modes'] = list(self.modes)
        if self.kappa is not None:
            doc['kappa'] = list(self.kappa)
        doc['t_grid'] = self.t_grid.to_dict()
        if self.x_grid is not None:
            doc['x_grid'] = self.x_grid.to_dict()
        if self.problem is not None:
            doc['problem'] = self.problem.to_dict()
        doc['quadrature'] = dict(self.quadrature.to_dict())
        doc['output'] = self.output
        doc['threads'] = self.threads
        return doc

    def with_overrides(self, output: str = None, rel_tol: float = None, threads: int = None) -> 'RunConfig':
        """
        Apply command-line overrides on top of the document
        """
        changes = {}
        if output is not None:
            changes['output'] = output
        if threads is not None:
            changes['threads'] = threads
        if rel_tol is not None:
            try:
                changes['quadrature'] = self.quadrature.with_overrides(rel_tol=rel_tol)
            except (TypeError, ValueError) as error:
                raise ConfigError(f"Invalid --rel-tol: {error}") from error
        return replace(self, **changes)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load_config(file_path: str) -> RunConfig:
    try:
        with open(file_path, 'r') as config_file:
            doc = json.load(config_file)
    except OSError as error:
        raise ConfigError(f"Cannot read configuration '{file_path}': {error}") from error
    except json.JSONDecodeError as error:
        raise ConfigError(f"Configuration '{file_path}' is not valid JSON: {error}") from error
    return RunConfig.from_dict(doc)
