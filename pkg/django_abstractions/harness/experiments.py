# -*- coding: utf-8 -*-
"""Experiment kinds.

An experiment kind turns one grid cell and one seed into raw result rows.
Kinds declare their parameters in `__options__`, their sweepable values
in `__grid__` (each with a default list), the columns worth summarising
in `__metrics__` and the axes of their plot in `__plot__`."""
from collections import OrderedDict

from ..abstraction.clustering import epsilon_sweep
from ..abstraction.core import StateAbstraction
from ..agents.base import AgentParams
from ..agents.runs import run_agent
from ..bottleneck import beta_sweep, default_demonstrator
from ..discovery.planning import a_mimo, a_momi, planning_iterations
from ..discovery.spectral import (LAPLACIANS, covering_options, eigenoptions, estimate_cover_time,
                                  walk_loops)
from ..envs.base import build_env
from ..envs.grids import room_abstraction
from ..errors import ConfigurationError, NoSuchExperimentError
from ..extensions import (Extension, coerce_value, describe_extensions, extension_names,
                          get_extension, register)
from ..graphs import TransitionGraph
from ..hierarchy.classes import certify_pair, construct_q_eps_set
from ..hierarchy.levels import branching_experiment
from ..mdp import solve_mdp, start_value, value_iteration
from ..options.smdp import elm_mtm_value_gap

__all__ = [
    'Experiment', 'get_experiment', 'experiment_names', 'describe_experiments', 'EXPERIMENT',
    'build_abstraction',
]

EXPERIMENT = 'experiment'


def get_experiment(kind):
    return get_extension(EXPERIMENT, kind, lambda name: NoSuchExperimentError(
        "Unknown experiment kind '%s' (known: %s)" % (name, ', '.join(experiment_names()))))


def experiment_names():
    return extension_names(EXPERIMENT)


def describe_experiments():
    return describe_extensions(EXPERIMENT)


def build_abstraction(env, name, mdp):
    if name == 'rooms':
        return room_abstraction(env)
    if name == 'identity':
        return StateAbstraction.identity(mdp.n_states)
    if name == 'none':
        return None
    raise ConfigurationError("Unknown abstraction '%s' (known: rooms, identity, none)" % name)


class Experiment(Extension):
    __grid__ = []
    __metrics__ = []
    __plot__ = None

    @classmethod
    def coerce_grid(cls, grid):
        declared = OrderedDict((item["name"], item) for item in cls.__grid__)
        unknown = set(grid) - set(declared)
        if unknown:
            raise ConfigurationError("Unknown grid key '%s' for experiment '%s' (known: %s)"
                                     % (sorted(unknown)[0], cls.__extension_name__,
                                        ', '.join(declared) or 'none'))
        result = OrderedDict()
        for name, item in declared.items():
            values = grid.get(name, item["default"])
            if not isinstance(values, (list, tuple)) or not values:
                raise ConfigurationError("Grid key '%s' needs a non-empty list of values" % name)
            result[name] = [coerce_value(value, item["type"], name) for value in values]
        return result

    @classmethod
    def describe(cls):
        result = super(Experiment, cls).describe()
        result["grid"] = [dict(item) for item in cls.__grid__]
        result["metrics"] = list(cls.__metrics__)
        return result

    def __init__(self, env, params):
        self.env = env
        self.params = params

    def build(self, seed):
        """The cell's MDP; environments with a `seed` option get the run's
        seed so random instances vary across seeds."""
        if "seed" in self.env.options:
            return build_env(self.env, seed=seed)
        return build_env(self.env)

    def run(self, cell, seed):
        raise NotImplementedError


@register(EXPERIMENT)
class PlanExperiment(Experiment):
    """Value iteration sweeps and start value for each tolerance."""
    __extension_name__ = 'plan'
    __grid__ = [
        {"name": "delta", "type": "float", "default": [1e-6], "description": "sweep tolerance"},
    ]
    __metrics__ = ['iterations', 'start_value']
    __plot__ = ('delta', 'iterations', None)

    def run(self, cell, seed):
        mdp = self.build(seed)
        v, iterations = value_iteration(mdp, cell["delta"])
        return [{"iterations": iterations, "start_value": start_value(mdp, v)}]


@register(EXPERIMENT)
class LearnExperiment(Experiment):
    """Learning curves of tabular agents, optionally behind an abstraction."""
    __extension_name__ = 'learn'
    __options__ = [
        {"name": "episodes", "type": "int", "default": 100, "description": "episodes per run"},
        {"name": "horizon", "type": "int", "default": 100, "description": "steps per episode"},
        {"name": "alpha", "type": "float", "default": 0.1, "description": "learning rate"},
        {"name": "epsilon", "type": "float", "default": 0.1, "description": "exploration rate"},
        {"name": "q_init", "type": "string", "default": "zero",
         "description": "zero or optimistic"},
        {"name": "m", "type": "int", "default": 5, "description": "R-Max known-ness count"},
        {"name": "abstraction", "type": "string", "default": "none",
         "description": "none, rooms or identity"},
    ]
    __grid__ = [
        {"name": "agent", "type": "string", "default": ["q_learning"],
         "description": "agent kind"},
    ]
    __metrics__ = ['reward', 'cumulative_reward']
    __plot__ = ('episode', 'cumulative_reward', 'agent')

    def run(self, cell, seed):
        mdp = self.build(seed)
        params = AgentParams(alpha=self.params["alpha"], epsilon=self.params["epsilon"],
                             q_init=self.params["q_init"], m=self.params["m"],
                             episodes=self.params["episodes"], horizon=self.params["horizon"],
                             seed=seed)
        phi = build_abstraction(self.env, self.params["abstraction"], mdp)
        record = run_agent(cell["agent"], mdp, params, phi=phi)
        cumulative = record.cumulative()
        return [{"episode": i, "reward": reward, "cumulative_reward": float(cumulative[i])}
                for i, reward in enumerate(record.rewards)]


@register(EXPERIMENT)
class AbstractExperiment(Experiment):
    """Greedy approximate abstractions over a grid of eps."""
    __extension_name__ = 'abstract'
    __options__ = [
        {"name": "predicate", "type": "string", "default": "q_star_eps",
         "description": "similarity predicate kind"},
    ]
    __grid__ = [
        {"name": "eps", "type": "float", "default": [0.0, 0.05, 0.1],
         "description": "predicate tolerance"},
    ]
    __metrics__ = ['n_abstract', 'abstract_value', 'value_loss']
    __plot__ = ('eps', 'n_abstract', None)

    def run(self, cell, seed):
        mdp = self.build(seed)
        row = epsilon_sweep([mdp], self.params["predicate"], [cell["eps"]])[0]
        return [dict((key, row[key]) for key in ('n_states', 'n_abstract', 'optimal_value',
                                                 'abstract_value', 'value_loss'))]


@register(EXPERIMENT)
class DibsExperiment(Experiment):
    """Rate-distortion sweep of the deterministic bottleneck."""
    __extension_name__ = 'dibs'
    __options__ = [
        {"name": "softening", "type": "float", "default": 0.05,
         "description": "uniform mass mixed into the demonstrator"},
        {"name": "delta_conv", "type": "float", "default": 0.001,
         "description": "convergence tolerance"},
        {"name": "starts", "type": "string", "default": "start",
         "description": "episode starts weighting the states: start or uniform"},
    ]
    __grid__ = [
        {"name": "beta", "type": "float", "default": [0.0, 1.0, 2.0, 20.0],
         "description": "trade-off parameter"},
    ]
    __metrics__ = ['used_codes', 'entropy_bits', 'expected_kl', 'policy_value']
    __plot__ = ('beta', 'used_codes', None)

    def run(self, cell, seed):
        mdp = self.build(seed)
        demonstrator = default_demonstrator(mdp, self.params["softening"])
        if self.params["starts"] not in ('start', 'uniform'):
            raise ConfigurationError("Unknown episode starts '%s' (known: start, uniform)"
                                     % self.params["starts"])
        starts = None if self.params["starts"] == 'start' else self.params["starts"]
        rows = beta_sweep(mdp, demonstrator, [cell["beta"]], seeds=(seed,),
                          delta_conv=self.params["delta_conv"], starts=starts)
        for row in rows:
            del row["beta"], row["seed"]
        return rows


@register(EXPERIMENT)
class OptionsExperiment(Experiment):
    """Point options for faster planning: sweeps of value iteration they
    need, against primitives alone."""
    __extension_name__ = 'options'
    __options__ = [
        {"name": "method", "type": "string", "default": "mimo",
         "description": "mimo (k is the option budget) or momi (k is the sweep budget)"},
        {"name": "eps", "type": "float", "default": 0.01, "description": "optimality tolerance"},
        {"name": "elm", "type": "bool", "default": False,
         "description": "also report the expected-length model value gap"},
    ]
    __grid__ = [
        {"name": "k", "type": "int", "default": [1, 2, 4], "description": "budget"},
    ]
    __metrics__ = ['n_options', 'iterations', 'baseline_iterations', 'elm_gap']
    __plot__ = ('k', 'iterations', None)

    def run(self, cell, seed):
        mdp = self.build(seed)
        eps = self.params["eps"]
        solution = solve_mdp(mdp)
        method = self.params["method"]
        if method == 'mimo':
            options = a_mimo(mdp, eps, cell["k"])
        elif method == 'momi':
            options = a_momi(mdp, eps, cell["k"])
        else:
            raise ConfigurationError("Unknown option method '%s' (known: mimo, momi)" % method)
        row = {
            "n_options": len(options),
            "iterations": planning_iterations(mdp, options, eps, solution.v),
            "baseline_iterations": planning_iterations(mdp, (), eps, solution.v),
            "elm_gap": None,
        }
        if self.params["elm"] and options:
            row["elm_gap"] = elm_mtm_value_gap(mdp, options)[0]
        return [row]


@register(EXPERIMENT)
class CoverExperiment(Experiment):
    """Algebraic connectivity and cover time as options are added."""
    __extension_name__ = 'cover'
    __options__ = [
        {"name": "method", "type": "string", "default": "covering",
         "description": "covering or eigen"},
        {"name": "n_trajectories", "type": "int", "default": 1000,
         "description": "random walks per cover-time estimate"},
        {"name": "laplacian", "type": "string", "default": "normalized",
         "description": "normalized or combinatorial"},
        {"name": "stay_on_bump", "type": "bool", "default": False,
         "description": "walk over actions, staying put on blocked ones"},
    ]
    __grid__ = [
        {"name": "k", "type": "int", "default": [0, 2, 4, 8],
         "description": "number of options (even)"},
    ]
    __metrics__ = ['lambda2', 'cover_time']
    __plot__ = ('k', 'lambda2', None)

    def run(self, cell, seed):
        mdp = self.build(seed)
        discover = {'covering': covering_options, 'eigen': eigenoptions}.get(self.params["method"])
        if discover is None:
            raise ConfigurationError("Unknown cover method '%s' (known: covering, eigen)"
                                     % self.params["method"])
        if self.params["laplacian"] not in LAPLACIANS:
            raise ConfigurationError("Unknown Laplacian '%s' (known: %s)"
                                     % (self.params["laplacian"], ', '.join(sorted(LAPLACIANS))))
        result = discover(mdp, cell["k"], kind=self.params["laplacian"])
        loops = None
        if self.params["stay_on_bump"]:
            loops = walk_loops(TransitionGraph.from_mdp(mdp), mdp.n_actions)
        cover = estimate_cover_time(result.graph, self.params["n_trajectories"], seed=seed,
                                    loops=loops)
        return [{"lambda2": result.lambda2_after, "cover_time": cover.mean,
                 "cover_half_width": cover.half_width, "max_hitting_time": cover.hitting}]


@register(EXPERIMENT)
class CertifyExperiment(Experiment):
    """Loss bounds of the four pair classes against the measured loss of
    constructed pairs."""
    __extension_name__ = 'certify'
    __options__ = [
        {"name": "abstraction", "type": "string", "default": "rooms",
         "description": "rooms or identity"},
        {"name": "n_distractors", "type": "int", "default": 1,
         "description": "random options per block"},
    ]
    __grid__ = [
        {"name": "eps_q", "type": "float", "default": [0.0, 0.05, 0.1],
         "description": "near-optimality of the best option per block"},
    ]
    __metrics__ = ['bound', 'measured_loss']
    __plot__ = ('eps_q', 'measured_loss', 'class')

    def run(self, cell, seed):
        mdp = self.build(seed)
        solution = solve_mdp(mdp)
        phi = build_abstraction(self.env, self.params["abstraction"], mdp)
        if phi is None:
            raise ConfigurationError("certify needs an abstraction")
        pair = construct_q_eps_set(mdp, phi, cell["eps_q"], self.params["n_distractors"],
                                   seed=seed, solution=solution)
        rows = certify_pair(mdp, pair, solution=solution)
        for row in rows:
            row["holds"] = int(row["holds"])
        return rows


@register(EXPERIMENT)
class HierarchyExperiment(Experiment):
    """Value found by budgeted learners over relative options as the number
    of options per block grows."""
    __extension_name__ = 'hierarchy'
    __options__ = [
        {"name": "agents", "type": "list", "default": ["q_learning", "rmax"],
         "description": "agent kinds"},
        {"name": "eps_q", "type": "float", "default": 0.0,
         "description": "near-optimality of the best option per block"},
        {"name": "abstraction", "type": "string", "default": "rooms",
         "description": "rooms or identity"},
        {"name": "horizon", "type": "int", "default": 100,
         "description": "ground steps per episode"},
    ]
    __grid__ = [
        {"name": "n_distractors", "type": "int", "default": [0, 1, 2, 4],
         "description": "random options per block"},
        {"name": "budget", "type": "int", "default": [1000],
         "description": "ground steps of experience"},
    ]
    __metrics__ = ['value']
    __plot__ = ('n_distractors', 'value', 'agent')

    def run(self, cell, seed):
        mdp = self.build(seed)
        phi = build_abstraction(self.env, self.params["abstraction"], mdp)
        if phi is None:
            raise ConfigurationError("hierarchy needs an abstraction")
        rows = branching_experiment(mdp, phi, [cell["n_distractors"]], [cell["budget"]],
                                    seeds=(seed,), agents=self.params["agents"],
                                    eps_q=self.params["eps_q"],
                                    params=AgentParams(horizon=self.params["horizon"]))
        for row in rows:
            del row["n_distractors"], row["budget"], row["seed"]
        return rows
