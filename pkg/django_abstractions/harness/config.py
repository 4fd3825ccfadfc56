# -*- coding: utf-8 -*-
"""Workspace INI files and JSON experiment configurations."""
import configparser
import itertools
import json
import os
from collections import OrderedDict

from ..envs.base import EnvSpec
from ..errors import AbstractionError, ConfigurationError
from ..extensions import coerce_value
from ..logging import LOG_LEVELS

__all__ = [
    'WorkspaceConfig', 'ExperimentConfig', 'load_experiments', 'DEFAULT_OUTPUT_DIR',
    'WORKSPACE_OPTIONS',
]

DEFAULT_OUTPUT_DIR = 'results'

# section -> (option, type, default)
WORKSPACE_OPTIONS = OrderedDict([
    ('workspace', [
        ('log_level', 'string', 'warning'),
        ('log_file', 'string', None),
        ('root_seed', 'int', 0),
        ('jobs', 'int', 1),
        ('output_dir', 'string', DEFAULT_OUTPUT_DIR),
    ]),
    ('planning', [
        ('delta', 'float', 1e-6),
        ('max_iterations', 'int', 100000),
    ]),
    ('experiments', [
        ('directory', 'string', None),
    ]),
])


class WorkspaceConfig(object):
    """Values of a workspace INI file, defaults filled in.

    Relative paths are resolved against the directory of the file."""

    def __init__(self, values=None, base_dir=None):
        self.base_dir = base_dir or os.getcwd()
        self.values = OrderedDict()
        values = values or {}
        for section, options in WORKSPACE_OPTIONS.items():
            given = values.get(section, {})
            unknown = set(given) - set(name for name, _, _ in options)
            if unknown:
                raise ConfigurationError("Unknown option '%s' in section [%s]"
                                         % (sorted(unknown)[0], section))
            self.values[section] = OrderedDict(
                (name, coerce_value(given.get(name, default), type_name,
                                    '%s.%s' % (section, name)))
                for name, type_name, default in options
            )
        if self.jobs < 1:
            raise ConfigurationError("Option 'workspace.jobs' must be at least 1")
        if self.delta <= 0:
            raise ConfigurationError("Option 'planning.delta' must be positive")
        if self.log_level is not None and self.log_level.lower() not in LOG_LEVELS:
            raise ConfigurationError("Unknown log level '%s' (known: %s)"
                                     % (self.log_level, ', '.join(sorted(LOG_LEVELS))))

    @classmethod
    def from_file(cls, path):
        parser = configparser.ConfigParser()
        try:
            with open(path) as stream:
                parser.read_file(stream)
        except (IOError, OSError) as e:
            raise ConfigurationError("Cannot read workspace config '%s': %s" % (path, e))
        except configparser.Error as e:
            raise ConfigurationError("Malformed workspace config '%s': %s" % (path, e))
        values = dict((section, dict((key, value or None)
                                     for key, value in parser.items(section)))
                      for section in parser.sections())
        unknown = set(values) - set(WORKSPACE_OPTIONS)
        if unknown:
            raise ConfigurationError("Unknown section [%s] in '%s'" % (sorted(unknown)[0], path))
        return cls(values, base_dir=os.path.dirname(os.path.abspath(path)))

    def _path(self, value):
        if value is None:
            return None
        return value if os.path.isabs(value) else os.path.join(self.base_dir, value)

    @property
    def log_level(self):
        return self.values['workspace']['log_level']

    @property
    def log_file(self):
        return self._path(self.values['workspace']['log_file'])

    @property
    def root_seed(self):
        return self.values['workspace']['root_seed']

    @property
    def jobs(self):
        return self.values['workspace']['jobs']

    @property
    def output_dir(self):
        return self._path(self.values['workspace']['output_dir'])

    @property
    def delta(self):
        return self.values['planning']['delta']

    @property
    def max_iterations(self):
        return self.values['planning']['max_iterations']

    @property
    def experiments_dir(self):
        return self._path(self.values['experiments']['directory'])

    def override(self, **values):
        """A copy with [workspace] values replaced, skipping None."""
        merged = OrderedDict((section, OrderedDict(options))
                             for section, options in self.values.items())
        for name, value in values.items():
            if value is not None:
                merged['workspace'][name] = value
        return WorkspaceConfig(merged, self.base_dir)

    def to_dict(self):
        return OrderedDict((section, OrderedDict(options))
                           for section, options in self.values.items())


class ExperimentConfig(object):
    """One experiment: its kind, environment, parameters and sweep grid.

    The document looks like::

        {"name": "eps-random", "kind": "abstract",
         "env": {"variant": "random", "n_states": 20},
         "params": {"predicate": "q_star_eps"},
         "grid": {"eps": [0.0, 0.05, 0.1]},
         "n_seeds": 5, "root_seed": 0, "output_dir": "results/eps"}
    """

    def __init__(self, name, kind, env, params=None, grid=None, n_seeds=1, root_seed=0,
                 output_dir=None):
        from .experiments import get_experiment

        experiment = get_experiment(kind)
        if not isinstance(env, EnvSpec):
            try:
                env = EnvSpec.from_dict(env) if isinstance(env, dict) else EnvSpec(env)
            except AbstractionError as e:
                raise ConfigurationError("Experiment '%s' has an invalid env: %s" % (name, e))
        self.name = name
        self.kind = kind
        self.experiment = experiment
        self.env = env
        self.params = experiment.coerce_options(params or {})
        self.grid = experiment.coerce_grid(grid or {})
        try:
            self.n_seeds = int(n_seeds)
            self.root_seed = int(root_seed)
        except (TypeError, ValueError):
            raise ConfigurationError("Experiment '%s': n_seeds and root_seed must be integers"
                                     % name)
        if self.n_seeds < 1:
            raise ConfigurationError("Experiment '%s': n_seeds must be at least 1" % name)
        self.output_dir = output_dir

    @classmethod
    def from_dict(cls, data, name=None):
        data = dict(data)
        name = data.pop("name", name)
        if not name:
            raise ConfigurationError("Experiment config needs a 'name'")
        for key in ("kind", "env"):
            if key not in data:
                raise ConfigurationError("Experiment '%s' is missing key '%s'" % (name, key))
        known = ("kind", "env", "params", "grid", "n_seeds", "root_seed", "output_dir")
        unknown = set(data) - set(known)
        if unknown:
            raise ConfigurationError("Experiment '%s' has unknown key '%s' (known: %s)"
                                     % (name, sorted(unknown)[0], ', '.join(known)))
        return cls(name, **data)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as stream:
                data = json.load(stream)
        except (IOError, OSError) as e:
            raise ConfigurationError("Cannot read experiment config '%s': %s" % (path, e))
        except ValueError as e:
            raise ConfigurationError("Experiment config '%s' is not valid JSON: %s" % (path, e))
        name = os.path.splitext(os.path.basename(path))[0]
        return cls.from_dict(data, name=name)

    def cells(self):
        """Grid cells in a fixed order: keys in declaration order, values in
        the order given."""
        keys = list(self.grid)
        return [OrderedDict(zip(keys, values))
                for values in itertools.product(*[self.grid[key] for key in keys])]

    def replace(self, **changes):
        data = self.to_dict()
        data.update(changes)
        return ExperimentConfig.from_dict(data)

    def to_dict(self):
        return OrderedDict([
            ("name", self.name),
            ("kind", self.kind),
            ("env", self.env.to_dict()),
            ("params", OrderedDict(self.params)),
            ("grid", OrderedDict((key, list(values)) for key, values in self.grid.items())),
            ("n_seeds", self.n_seeds),
            ("root_seed", self.root_seed),
            ("output_dir", self.output_dir),
        ])

    def __repr__(self):
        return "<ExperimentConfig %s kind=%s cells=%d seeds=%d>" % (
            self.name, self.kind, len(self.cells()), self.n_seeds)


def load_experiments(directory):
    """All *.json experiment configs of `directory`, by name."""
    if not directory or not os.path.isdir(directory):
        raise ConfigurationError("Experiments directory '%s' does not exist" % directory)
    experiments = OrderedDict()
    for filename in sorted(os.listdir(directory)):
        if filename.endswith('.json'):
            config = ExperimentConfig.from_file(os.path.join(directory, filename))
            experiments[config.name] = config
    return experiments
