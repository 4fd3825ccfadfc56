# -*- coding: utf-8 -*-
"""Pinned reproductions with expected values.

A target measures a handful of named quantities and compares each one
with its registered expectation. `reproduce` runs targets, writes every
comparison to ``comparisons.csv`` and reports whether all of them passed.

Expectations are dicts with a `check`:

* ``relative``: |measured - expected| <= tolerance * |expected|
* ``absolute``: |measured - expected| <= tolerance
* ``at_most`` / ``at_least``: one-sided against `expected`
* ``range``: `expected` is a [low, high] pair
* ``report``: informational, always passes
"""
import math
import os
from collections import OrderedDict, namedtuple

import numpy as np

from ..abstraction.clustering import (brute_force_min_partition, greedy_cluster,
                                      transitive_cluster)
from ..abstraction.core import StateAbstraction, abstraction_value_loss
from ..abstraction.pac import pac_abstraction, pac_sample_size
from ..abstraction.predicates import PredicateSpec, abstraction_loss_bound, compatibility_matrix
from ..agents.base import AgentParams
from ..agents.runs import run_agent
from ..bottleneck import (abstract_policy_value, default_demonstrator, episode_distribution,
                          run_dibs)
from ..discovery.planning import (DEFAULT_EPS, a_mimo, a_momi, brute_force_min_options,
                                  iteration_distance, planning_iterations)
from ..discovery.spectral import (correlation_study, covering_options, eigenoptions,
                                  estimate_cover_time, expected_hitting_times, walk_loops)
from ..envs.base import EnvSpec, build_env
from ..envs.grids import hallway_options
from ..envs.randoms import build_random_mdp
from ..envs.tasks import TaskDistribution
from ..errors import ArgumentError, BoundViolationError, NoSuchTargetError
from ..extensions import Extension, describe_extensions, extension_names, get_extension, register
from ..graphs import TransitionGraph
from ..hierarchy.classes import best_abstract_policy, certify_pair, construct_q_eps_set
from ..hierarchy.pairs import ground_abstract_policy
from ..logging import get_logger
from ..mdp import evaluate_policy_exact, solve_mdp, start_value
from ..options.smdp import elm_mtm_value_gap
from ..seeding import derive_seed
from .runner import run_experiment, write_rows

__all__ = [
    'Target', 'Comparison', 'ReproduceReport', 'TARGET', 'get_target', 'target_names',
    'describe_targets', 'compare', 'reproduce', 'COMPARISON_COLUMNS',
]

TARGET = 'target'
COMPARISONS_FILE = 'comparisons.csv'
CHECKS = ('relative', 'absolute', 'at_most', 'at_least', 'range', 'report')

Comparison = namedtuple('Comparison', ['target', 'name', 'measured', 'expected', 'tolerance',
                                       'check', 'passed'])
COMPARISON_COLUMNS = Comparison._fields

ReproduceReport = namedtuple('ReproduceReport', ['comparisons', 'passed', 'path'])


def get_target(name):
    return get_extension(TARGET, name, NoSuchTargetError)


def target_names(extended=True):
    return [name for name in extension_names(TARGET)
            if extended or not get_target(name).__extended__]


def describe_targets():
    return describe_extensions(TARGET)


def compare(expectation, measured):
    """True when `measured` satisfies `expectation`."""
    check = expectation.get("check", "relative")
    expected = expectation.get("expected")
    tolerance = expectation.get("tolerance", 0.0)
    if check == 'report':
        return True
    if measured is None or (isinstance(measured, float) and math.isnan(measured)):
        return False
    if check == 'relative':
        return abs(measured - expected) <= tolerance * abs(expected) + 1e-12
    if check == 'absolute':
        return abs(measured - expected) <= tolerance + 1e-12
    if check == 'at_most':
        return measured <= expected + tolerance
    if check == 'at_least':
        return measured >= expected - tolerance
    if check == 'range':
        low, high = expected
        return low <= measured <= high
    raise ArgumentError("unknown check '%s' (known: %s)" % (check, ', '.join(CHECKS)))


class Target(Extension):
    """Base class: subclasses declare `__expected__` and implement
    `measure(seed, out)` returning measured values by name."""
    __expected__ = []
    __extended__ = False

    def __init__(self, eigenoptions=False):
        self.eigenoptions = eigenoptions

    @classmethod
    def describe(cls):
        result = super(Target, cls).describe()
        result["extended"] = cls.__extended__
        result["expected"] = [dict(item) for item in cls.__expected__]
        return result

    def expectations(self):
        return list(self.__expected__)

    def measure(self, seed, out):
        raise NotImplementedError

    def run(self, seed=0, out=None):
        measured = self.measure(seed, out)
        comparisons = []
        for expectation in self.expectations():
            value = measured.get(expectation["name"])
            comparisons.append(Comparison(
                self.__extension_name__, expectation["name"], value,
                expectation.get("expected"), expectation.get("tolerance"),
                expectation.get("check", "relative"), compare(expectation, value)))
        return comparisons


def _lambda2_pair(variant, k, discover=covering_options, kind='combinatorial'):
    mdp = build_env(EnvSpec(variant))
    result = discover(mdp, k, kind=kind)
    return result.lambda2_before, result.lambda2_after


@register(TARGET)
class CoveringConnectivity(Target):
    """Algebraic connectivity before and after eight covering options.

    The expected values are eigenvalues of D - A; the normalized
    Laplacian's are reported next to them."""
    __extension_name__ = 'table-covering-connectivity'
    __expected__ = [
        {"name": "four_rooms_lambda2", "expected": 0.023, "tolerance": 0.15,
         "check": "relative"},
        {"name": "four_rooms_lambda2_covering", "expected": 0.065, "tolerance": 0.15,
         "check": "relative"},
        {"name": "grid9_lambda2", "expected": 0.12, "tolerance": 0.10, "check": "relative"},
        {"name": "grid9_lambda2_covering", "expected": 0.24, "tolerance": 0.10,
         "check": "relative"},
        {"name": "four_rooms_lambda2_normalized", "check": "report"},
        {"name": "grid9_lambda2_normalized", "check": "report"},
    ]
    k = 8

    def expectations(self):
        expected = list(self.__expected__)
        if self.eigenoptions:
            expected.extend([
                {"name": "four_rooms_lambda2_eigen", "check": "report"},
                {"name": "grid9_lambda2_eigen", "check": "report"},
            ])
        return expected

    def measure(self, seed, out):
        measured = {}
        for variant in ('four_rooms', 'grid9'):
            before, after = _lambda2_pair(variant, self.k)
            measured['%s_lambda2' % variant] = before
            measured['%s_lambda2_covering' % variant] = after
            measured['%s_lambda2_normalized' % variant] = _lambda2_pair(
                variant, 0, kind='normalized')[0]
            if self.eigenoptions:
                measured['%s_lambda2_eigen' % variant] = _lambda2_pair(
                    variant, self.k, eigenoptions)[1]
        return measured


@register(TARGET)
class CoverTimeGrid9(Target):
    """Exploration time of the 9x9 grid from its start corner, with and
    without covering options.

    The walk picks one of the four actions uniformly and stays put when
    it bumps into the border; an option adds one more choice at its
    endpoints. The compared quantity is the largest mean first-visit
    time over the states. The mean time to visit every state is
    reported alongside."""
    __extension_name__ = 'cover-time-grid9'
    __expected__ = [
        {"name": "cover_time", "expected": 460.5, "tolerance": 0.05, "check": "relative"},
        {"name": "cover_time_covering", "expected": 258.6, "tolerance": 0.05,
         "check": "relative"},
        {"name": "exact_hitting_time", "check": "report"},
        {"name": "walk_cover_time", "check": "report"},
        {"name": "walk_cover_time_covering", "check": "report"},
    ]
    n_trajectories = 10000
    k = 8

    def measure(self, seed, out):
        mdp = build_env(EnvSpec('grid9'))
        start = int(np.argmax(mdp.start_dist))
        plain = TransitionGraph.from_mdp(mdp)
        loops = walk_loops(plain, mdp.n_actions)
        result = covering_options(mdp, self.k, kind='combinatorial')
        before = estimate_cover_time(plain, self.n_trajectories, derive_seed(seed, 0),
                                     start=start, loops=loops)
        after = estimate_cover_time(result.graph, self.n_trajectories, derive_seed(seed, 1),
                                    start=start, loops=loops)
        return {
            "cover_time": before.hitting,
            "cover_time_covering": after.hitting,
            "exact_hitting_time": float(expected_hitting_times(plain, loops)[start].max()),
            "walk_cover_time": before.mean,
            "walk_cover_time_covering": after.mean,
        }


@register(TARGET)
class DibsFourRooms(Target):
    """Abstract states used by the deterministic bottleneck on Four Rooms
    as beta grows, and the value kept by its abstract policy.

    States are weighted by the demonstrator's episode occupancy with
    episodes starting anywhere, so rooms off the demonstrated route keep
    some mass."""
    __extension_name__ = 'fig-dibs-fourrooms'
    # value gaps are held to 0.05 VMax, VMax = 100 at gamma = 0.99
    __expected__ = [
        {"name": "used_codes_beta_0", "expected": 1, "tolerance": 0, "check": "absolute"},
        {"name": "used_codes_beta_1", "expected": [3, 6], "check": "range"},
        {"name": "used_codes_beta_20", "check": "report"},
        {"name": "value_gap_beta_2", "expected": 0.0, "tolerance": 5.0, "check": "at_most"},
        {"name": "value_gap_beta_20", "expected": 0.0, "tolerance": 5.0, "check": "at_most"},
    ]
    n_seeds = 20
    betas = (0.0, 1.0, 2.0, 20.0)
    starts = 'uniform'

    def measure(self, seed, out):
        mdp = build_env(EnvSpec('four_rooms'))
        demonstrator = default_demonstrator(mdp)
        rho = episode_distribution(mdp, demonstrator, starts=self.starts)
        demonstrator_value = start_value(mdp, evaluate_policy_exact(mdp, demonstrator))
        measured = {}
        for beta in self.betas:
            codes, values = [], []
            for index in range(self.n_seeds):
                result = run_dibs(mdp, demonstrator, beta, seed=derive_seed(seed, index), rho=rho)
                codes.append(result.used_codes)
                values.append(abstract_policy_value(mdp, result.phi, result.policy))
            label = ('%g' % beta).replace('.', '_')
            measured['used_codes_beta_%s' % label] = float(np.mean(codes))
            measured['value_gap_beta_%s' % label] = demonstrator_value - float(np.mean(values))
        return measured


@register(TARGET)
class ElmMtmFourRooms(Target):
    """Expected-length against multi-time models of the hallway options."""
    __extension_name__ = 'elm-mtm-fourrooms'
    __expected__ = [
        {"name": "value_gap", "expected": 0.0, "tolerance": 0.05, "check": "at_most"},
        {"name": "same_policy", "expected": 1, "tolerance": 0, "check": "absolute"},
    ]
    slip = 0.2

    def measure(self, seed, out):
        spec = EnvSpec('four_rooms', slip=self.slip)
        gap, same = elm_mtm_value_gap(build_env(spec), hallway_options(spec))
        return {"value_gap": gap, "same_policy": int(same)}


@register(TARGET)
class ChainRmaxPathology(Target):
    """R-Max on the three-state chain with s0 and s1 merged, against
    R-Max on the ground chain: reward ratio over 250 steps."""
    __extension_name__ = 'chain-rmax-pathology'
    __expected__ = [
        {"name": "reward_ratio", "expected": 0.05, "tolerance": 0.0, "check": "at_most"},
        {"name": "ground_reward", "check": "report"},
    ]
    n_runs = 50

    def measure(self, seed, out):
        mdp = build_env(EnvSpec('three_chain'))
        phi = StateAbstraction([0, 0, 1, 2])
        ground, abstracted = [], []
        for index in range(self.n_runs):
            params = AgentParams(episodes=25, horizon=10, seed=derive_seed(seed, index))
            ground.append(run_agent('rmax', mdp, params).total_reward)
            abstracted.append(run_agent('rmax', mdp, params, phi=phi).total_reward)
        ground_mean = float(np.mean(ground))
        ratio = float(np.mean(abstracted)) / ground_mean if ground_mean > 0 else float('nan')
        return {"reward_ratio": ratio, "ground_reward": ground_mean}


@register(TARGET)
class BoundAudits(Target):
    """Measured value loss against the abstraction and option-class bounds
    over seeded random MDPs."""
    __extension_name__ = 'bound-audits'
    __expected__ = [
        {"name": "abstraction_violations", "expected": 0, "tolerance": 0, "check": "at_most"},
        {"name": "class_violations", "expected": 0, "tolerance": 0, "check": "at_most"},
        {"name": "zero_parameter_loss", "expected": 0.0, "tolerance": 1e-6,
         "check": "at_most"},
    ]
    n_mdps = 50
    eps_grid = (0.0, 0.01, 0.05, 0.1)
    eps_q_grid = (0.0, 0.05, 0.1)

    def measure(self, seed, out):
        abstraction_violations = class_violations = 0
        zero_loss = 0.0
        for index in range(self.n_mdps):
            mdp = build_random_mdp(8, 2, seed=derive_seed(seed, index))
            solution = solve_mdp(mdp)
            for kind in ('q_star_eps', 'model_eps'):
                for eps in self.eps_grid:
                    spec = PredicateSpec(kind, eps=eps, eps_r=eps, eps_t=eps)
                    phi = greedy_cluster(solution, spec, order_seed=index)
                    loss = abstraction_value_loss(mdp, phi, solution=solution)
                    bound = abstraction_loss_bound(kind, eps, mdp.r_max, mdp.gamma,
                                                   phi.n_abstract, mdp.n_actions)
                    abstraction_violations += loss > bound + 1e-9
                    if eps == 0.0:
                        zero_loss = max(zero_loss, loss)
            phi = StateAbstraction([s % 3 for s in range(mdp.n_states)])
            for eps_q in self.eps_q_grid:
                pair = construct_q_eps_set(mdp, phi, eps_q, n_distractors=1,
                                           seed=derive_seed(seed, index, 1), solution=solution)
                rows = certify_pair(mdp, pair, solution=solution)
                class_violations += sum(not row["holds"] for row in rows)
                if eps_q == 0.0:
                    zero_loss = max(zero_loss, rows[0]["measured_loss"])
        return {"abstraction_violations": abstraction_violations,
                "class_violations": class_violations, "zero_parameter_loss": zero_loss}


@register(TARGET)
class OracleEquivalence(Target):
    """Fast routines against exhaustive search on small instances."""
    __extension_name__ = 'oracle-equivalence'
    __expected__ = [
        {"name": "partition_mismatches", "expected": 0, "tolerance": 0, "check": "at_most"},
        {"name": "pair_loss_mismatches", "expected": 0, "tolerance": 0, "check": "at_most"},
        {"name": "momi_ratio_violations", "expected": 0, "tolerance": 0, "check": "at_most"},
    ]
    n_instances = 30

    def measure(self, seed, out):
        partitions = pairs = momi = smdp_gaps = 0
        for index in range(self.n_instances):
            n_states = 4 + index % 5
            mdp = build_random_mdp(n_states, 2, seed=derive_seed(seed, 0, index))
            solution = solve_mdp(mdp)
            spec = PredicateSpec('q_star_d', d=0.5)
            phi = transitive_cluster(solution, spec)
            oracle = brute_force_min_partition(compatibility_matrix(solution, spec))
            partitions += phi.n_abstract != oracle.n_abstract

            blocks = StateAbstraction([s % 2 for s in range(n_states)])
            pair = construct_q_eps_set(mdp, blocks, 0.05, n_distractors=2,
                                       seed=derive_seed(seed, 1, index), solution=solution)
            found = best_abstract_policy(mdp, pair, solution)
            smdp_gaps += not found.consistent
            enumerated = min(
                float((solution.v - evaluate_policy_exact(
                    mdp, ground_abstract_policy(pair, choice))).max())
                for choice in pair.abstract_policies())
            pairs += abs(found.best_loss - max(0.0, enumerated)) > 1e-8

        for n_states in range(4, 11):
            mdp = build_env(EnvSpec('chain', n_states=n_states))
            distance = iteration_distance(mdp, DEFAULT_EPS)
            for ell in range(1, int(distance.plain.max())):
                greedy = len(a_momi(mdp, DEFAULT_EPS, ell, distance))
                best = len(brute_force_min_options(mdp, DEFAULT_EPS, ell))
                momi += greedy > max(1.0, math.log(n_states)) * best
        return {"partition_mismatches": partitions, "pair_loss_mismatches": pairs,
                "momi_ratio_violations": momi, "smdp_policy_gaps": smdp_gaps}


@register(TARGET)
class MimoAcceleration(Target):
    """Sweeps saved on Four Rooms by four A-MIMO options, and whether every
    A-MOMI set meets its sweep budget."""
    __extension_name__ = 'mimo-acceleration'
    __expected__ = [
        {"name": "mimo_reduction", "expected": 0.25, "tolerance": 0.0, "check": "at_least"},
        {"name": "momi_failures", "expected": 0, "tolerance": 0, "check": "at_most"},
    ]

    def measure(self, seed, out):
        mdp = build_env(EnvSpec('four_rooms'))
        solution = solve_mdp(mdp)
        distance = iteration_distance(mdp, DEFAULT_EPS, solution)
        baseline = planning_iterations(mdp, (), DEFAULT_EPS, solution.v)
        options = a_mimo(mdp, DEFAULT_EPS, 4, distance)
        iterations = planning_iterations(mdp, options, DEFAULT_EPS, solution.v)
        failures = 0
        for ell in sorted(set([max(1, baseline // 4), max(1, baseline // 2), baseline - 1])):
            try:
                a_momi(mdp, DEFAULT_EPS, ell, distance)
            except BoundViolationError:
                failures += 1
        return {"mimo_reduction": 1.0 - iterations / float(baseline),
                "momi_failures": failures}


@register(TARGET)
class PacSampleSize(Target):
    """Tasks consumed by the PAC abstraction and how often it merges the
    colour variants of every Color Rooms cell."""
    __extension_name__ = 'pac-sample-size'
    __expected__ = [
        {"name": "tasks", "expected": 300, "tolerance": 0, "check": "absolute"},
        {"name": "colour_recovery", "expected": 0.95, "tolerance": 0.0, "check": "at_least"},
    ]
    repetitions = 20

    def measure(self, seed, out):
        spec = EnvSpec('color_rooms')
        tasks = TaskDistribution(spec, 'far_corners')
        predicate = PredicateSpec('q_star_eps', eps=1e-6)
        labels = tasks.task(tasks.goals[0]).state_labels
        variants = {}
        for s, (x, y, _) in enumerate(labels):
            variants.setdefault((x, y), []).append(s)
        recovered = 0
        m = pac_sample_size(0.1, 0.1)
        for index in range(self.repetitions):
            phi, m = pac_abstraction(tasks, predicate, 0.1, 0.1, seed=derive_seed(seed, index))
            recovered += all(len(set(phi.mapping[states])) == 1 for states in variants.values())
        return {"tasks": m, "colour_recovery": recovered / float(self.repetitions)}


@register(TARGET)
class CoverTimeCorrelation(Target):
    """Rank correlation of algebraic connectivity and cover time over
    random graphs."""
    __extension_name__ = 'cover-time-correlation'
    __expected__ = [
        {"name": "spearman_rho", "expected": -0.6, "tolerance": 0.0, "check": "at_most"},
    ]

    def measure(self, seed, out):
        _, _, rho = correlation_study(100, 10, 0.3, n_trajectories=1000, seed=seed)
        return {"spearman_rho": rho}


class ExperimentTarget(Target):
    """Runs a pinned experiment configuration and reads the comparison
    values off its summary rows."""
    __extended__ = True
    config = None

    def measure(self, seed, out):
        directory = os.path.join(out, self.__extension_name__) if out else None
        artifacts = run_experiment(self.config, out=directory, seed=seed)
        return self.read(artifacts.summaries)

    @staticmethod
    def mean_of(summaries, metric, **cell):
        values = [summary.mean for summary in summaries if summary.metric == metric and all(
            summary.cell.get(key) == value for key, value in cell.items())]
        return float(np.mean(values)) if values else None

    def read(self, summaries):
        raise NotImplementedError


@register(TARGET)
class LearningCurvesGrid9(ExperimentTarget):
    """Learners against the random agent on the open 9x9 grid."""
    __extension_name__ = 'learning-curves-grid9'
    __expected__ = [
        {"name": "rmax_over_random", "expected": 0.0, "tolerance": 0.0, "check": "at_least"},
        {"name": "q_learning_over_random", "expected": 0.0, "tolerance": 0.0,
         "check": "at_least"},
    ]
    episodes = 50
    config = {
        "name": "learning-curves-grid9", "kind": "learn", "env": {"variant": "grid9"},
        "params": {"episodes": episodes, "horizon": 100, "q_init": "optimistic"},
        "grid": {"agent": ["q_learning", "rmax", "random"]}, "n_seeds": 5,
    }

    def read(self, summaries):
        last = self.episodes - 1
        final = dict((agent, self.mean_of(summaries, 'cumulative_reward', agent=agent,
                                          episode=last))
                     for agent in ('q_learning', 'rmax', 'random'))
        return {"rmax_over_random": final['rmax'] - final['random'],
                "q_learning_over_random": final['q_learning'] - final['random']}


@register(TARGET)
class EpsilonSweepRandom(ExperimentTarget):
    """Abstract state counts shrink as the Q* tolerance grows."""
    __extension_name__ = 'epsilon-sweep-random'
    __expected__ = [
        {"name": "states_saved", "expected": 0.0, "tolerance": 0.0, "check": "at_least"},
        {"name": "value_loss_at_largest_eps", "check": "report"},
    ]
    config = {
        "name": "epsilon-sweep-random", "kind": "abstract",
        "env": {"variant": "random", "n_states": 30},
        "grid": {"eps": [0.0, 0.05, 0.1, 0.2]}, "n_seeds": 5,
    }

    def read(self, summaries):
        return {
            "states_saved": (self.mean_of(summaries, 'n_abstract', eps=0.0)
                             - self.mean_of(summaries, 'n_abstract', eps=0.2)),
            "value_loss_at_largest_eps": self.mean_of(summaries, 'value_loss', eps=0.2),
        }


@register(TARGET)
class BranchingFourRooms(ExperimentTarget):
    """Value reached by budgeted learners over room options as distractor
    options are added."""
    __extension_name__ = 'branching-fourrooms'
    __expected__ = [
        {"name": "distractor_cost", "expected": 0.0, "tolerance": 0.0, "check": "at_least"},
    ]
    config = {
        "name": "branching-fourrooms", "kind": "hierarchy", "env": {"variant": "four_rooms"},
        "params": {"agents": ["q_learning"]},
        "grid": {"n_distractors": [0, 4], "budget": [2000]}, "n_seeds": 5,
    }

    def read(self, summaries):
        return {"distractor_cost": (self.mean_of(summaries, 'value', n_distractors=0)
                                    - self.mean_of(summaries, 'value', n_distractors=4))}


def reproduce(target_ids=None, extended=False, eigenoptions=False, seed=0, out=None):
    """Runs the named targets (all quantitative ones by default, plus the
    experiment-backed ones with `extended`) and writes comparisons.csv to
    `out` when given."""
    if not target_ids:
        target_ids = target_names(extended)
    targets = [get_target(name) for name in target_ids]
    logger = get_logger()
    comparisons = []
    for target_class in targets:
        target = target_class(eigenoptions=eigenoptions)
        logger.info("reproducing %s", target_class.__extension_name__)
        for comparison in target.run(seed, out):
            logger.info("%s %s: measured %r, expected %r (%s)", comparison.target,
                        comparison.name, comparison.measured, comparison.expected,
                        'PASS' if comparison.passed else 'FAIL')
            comparisons.append(comparison)

    path = None
    if out:
        os.makedirs(out, exist_ok=True)
        path = os.path.join(out, COMPARISONS_FILE)
        write_rows([OrderedDict(comparison._asdict()) for comparison in comparisons], path)
    passed = all(comparison.passed for comparison in comparisons)
    return ReproduceReport(comparisons, passed, path)
