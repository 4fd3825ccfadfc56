# -*- coding: utf-8 -*-
"""The workspace: configuration, the shared logger and the registries
the API and the command line browse."""
import os
from collections import OrderedDict

from . import __version__
from .agents.base import agent_names, describe_agents
from .envs.base import EnvSpec, build_env, describe_environments, environment_names
from .envs.grids import GridEnvironment, ascii_map
from .errors import ConfigurationError, ModelError, NoSuchExperimentError
from .harness.config import WorkspaceConfig, load_experiments
from .harness.experiments import experiment_names
from .harness.targets import describe_targets, get_target, target_names
from .logging import create_logger
from .mdp import greedy_policy, q_from_v, start_value, value_iteration

__all__ = ['Workspace']


class Workspace(object):
    """Loads the INI file at `config` (defaults when None) and sets up the
    package logger from it. `experiments_dir` is used when the INI file
    does not name one."""

    def __init__(self, config=None, experiments_dir=None):
        if isinstance(config, WorkspaceConfig):
            self.config = config
        elif config:
            self.config = WorkspaceConfig.from_file(config)
        else:
            self.config = WorkspaceConfig()
        self.experiments_dir = self.config.experiments_dir or experiments_dir
        self.logger = create_logger(self.config.log_level, self.config.log_file)
        self._experiments = None

    def info(self):
        return OrderedDict([
            ("version", __version__),
            ("root_seed", self.config.root_seed),
            ("jobs", self.config.jobs),
            ("delta", self.config.delta),
            ("output_dir", self.config.output_dir),
            ("environments", environment_names()),
            ("agents", agent_names()),
            ("experiment_kinds", experiment_names()),
            ("targets", target_names()),
        ])

    def list_environments(self):
        return describe_environments()

    def list_agents(self):
        return describe_agents()

    def env_spec(self, variant, options=None):
        return EnvSpec(variant, **dict(options or {}))

    def model(self, spec):
        return build_env(spec).to_dict()

    def plan(self, spec):
        """V*, its greedy policy and the sweeps value iteration needed at
        the workspace tolerance."""
        mdp = build_env(spec)
        v, iterations = value_iteration(mdp, self.config.delta,
                                        max_iterations=self.config.max_iterations)
        policy = greedy_policy(q_from_v(mdp, v))
        return OrderedDict([
            ("env", spec.to_dict()),
            ("iterations", iterations),
            ("start_value", start_value(mdp, v)),
            ("v", v.tolist()),
            ("policy", policy.actions.tolist()),
        ])

    def ascii_map(self, spec):
        if not issubclass(spec.environment_class, GridEnvironment):
            raise ModelError("'%s' is not a grid environment" % spec.variant)
        return ascii_map(spec)

    def experiments(self):
        if self._experiments is None:
            if not self.experiments_dir:
                raise ConfigurationError("No experiments directory is configured")
            if not os.path.isdir(self.experiments_dir):
                raise ConfigurationError("Experiments directory '%s' does not exist"
                                         % self.experiments_dir)
            self._experiments = load_experiments(self.experiments_dir)
        return self._experiments

    def list_experiments(self):
        return [OrderedDict([("name", config.name), ("kind", config.kind),
                             ("env", config.env.to_dict()), ("cells", len(config.cells())),
                             ("n_seeds", config.n_seeds)])
                for config in self.experiments().values()]

    def experiment(self, name):
        try:
            return self.experiments()[name]
        except KeyError:
            raise NoSuchExperimentError("Unknown experiment '%s'" % name)

    def list_targets(self):
        return describe_targets()

    def target(self, name):
        return get_target(name).describe()
