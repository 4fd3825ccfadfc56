# -*- coding: utf-8 -*-
"""Hierarchies of (abstraction, options) pairs.

Level 0 is the ground MDP. Level k + 1 has the blocks of the k-th pair's
abstraction as states; its options run over level-k states and choose
level-k actions, which at level k >= 1 are the options of the level
below. A policy at level k is a vector naming, per level-k state, the
chosen option of the k-th pair; grounding composes the option policies
downward, so above level 1 the options must be deterministic."""
import json
from collections import namedtuple

import numpy as np

from ..abstraction.core import StateAbstraction
from ..agents.base import AgentParams, get_agent
from ..errors import ArgumentError, BoundViolationError, ModelError
from ..logging import get_logger
from ..mdp import Policy, evaluate_policy_exact, solve_mdp, start_value
from ..seeding import derive_rng, derive_seed
from .classes import ENUMERATION_LIMIT, TOLERANCE, construct_q_eps_set
from .models import LevelModel, abstract_level
from .pairs import PhiOptionPair, PhiRelativeOption, ground_abstract_policy

__all__ = [
    'Hierarchy', 'HierarchyLoss', 'build_hierarchy', 'hierarchy_value_loss',
    'level_optimal_options', 'hierarchy_to_json', 'branching_experiment',
    'BRANCHING_COLUMNS',
]

HierarchyLoss = namedtuple('HierarchyLoss', [
    'loss', 'kappa', 'ell', 'kappa_hat', 'ell_hat', 'bound', 'certified', 'holds',
    'policies',
])

BRANCHING_COLUMNS = ('agent', 'n_distractors', 'budget', 'seed', 'value', 'optimal_value')


class Hierarchy(object):
    """Pairs stacked level by level over `mdp`, with their level models."""

    def __init__(self, mdp, pairs, weights=None):
        pairs = list(pairs)
        if not pairs:
            raise ModelError("a hierarchy needs at least one level")
        weights = list(weights) if weights is not None else [None] * len(pairs)
        levels = [LevelModel.from_mdp(mdp)]
        for depth, (pair, w) in enumerate(zip(pairs, weights), 1):
            below = levels[-1]
            if pair.phi.n_states != below.n_states or pair.n_actions != below.n_actions:
                raise ModelError("level %d pair does not fit the level below (%r)"
                                 % (depth, below))
            if depth > 1 and not all(option.policy.is_deterministic for option in pair.options):
                raise ModelError("options above level 1 must be deterministic")
            levels.append(abstract_level(below, pair, w))
        self.mdp = mdp
        self.pairs = pairs
        self.weights = weights
        self.levels = levels

    @property
    def depth(self):
        return len(self.pairs)

    @property
    def phis(self):
        return [pair.phi for pair in self.pairs]

    def projection(self, k):
        """Level-k state of every ground state."""
        mapping = np.arange(self.mdp.n_states)
        for pair in self.pairs[:k]:
            mapping = pair.phi.mapping[mapping]
        return mapping

    def local_policy(self, k, choice):
        """A level-k choice vector as a Policy over level-k actions."""
        pair = self.pairs[k - 1]
        local = [pair.options_in(x).index(index) for x, index in enumerate(choice)]
        return Policy.deterministic(local, self.levels[k].n_actions)

    def lower(self, k, choice):
        """Moves a level-k choice one level down: a choice vector for k >= 2,
        the ground Policy for k == 1."""
        pair = self.pairs[k - 1]
        if k == 1:
            return ground_abstract_policy(pair, choice)
        choice = pair.check_policy(choice)
        below = self.pairs[k - 2]
        return np.array([below.action_option(x, pair.options[choice[pair.phi(x)]].policy[x])
                         for x in range(pair.phi.n_states)])

    def ground(self, k, choice):
        for level in range(k, 0, -1):
            choice = self.lower(level, choice)
        return choice

    def value(self, k, choice):
        """V_k of a level-k policy (a ground Policy when k == 0), read on
        the ground states."""
        if k == 0:
            v = evaluate_policy_exact(self.mdp, choice)
        else:
            v = self.levels[k].evaluate(self.local_policy(k, choice))
        return v[self.projection(k)]

    def policies(self, k):
        return self.pairs[k - 1].abstract_policies()

    def n_policies(self, k):
        return self.pairs[k - 1].n_policies()

    def to_dict(self):
        return {
            "mdp": self.mdp.name,
            "levels": [pair.to_dict() for pair in self.pairs],
            "weights": [None if w is None else np.asarray(getattr(w, 'weights', w)).tolist()
                        for w in self.weights],
        }

    def __repr__(self):
        sizes = ' -> '.join(str(level.n_states) for level in self.levels)
        return "<Hierarchy %s>" % sizes


def hierarchy_to_json(hierarchy, **kwargs):
    return json.dumps(hierarchy.to_dict(), **kwargs)


def level_optimal_options(level, phi):
    """Per block, an option following the level's greedy optimal policy."""
    _, policy = level.solve()
    return PhiOptionPair(phi, [PhiRelativeOption(phi, x, policy, name='x%d*' % x)
                               for x in range(phi.n_abstract)])


def _per_level(algorithm, depth):
    if isinstance(algorithm, (list, tuple)):
        if len(algorithm) < depth:
            raise ArgumentError("%d level algorithms given for depth %d"
                                % (len(algorithm), depth))
        return list(algorithm)
    return [algorithm] * depth


def build_hierarchy(mdp, abstraction_algs, option_algs=level_optimal_options, depth=1,
                    require_reduction=True):
    """Builds up to `depth` levels.

    An abstraction algorithm is a StateAbstraction or a callable taking the
    level model; an option algorithm is a callable (level model, phi) ->
    PhiOptionPair. Either may be a list with one entry per level. A level
    that does not shrink the state space stops the construction there when
    `require_reduction` is set."""
    if depth < 1:
        raise ArgumentError("depth must be at least 1")
    abstraction_algs = _per_level(abstraction_algs, depth)
    option_algs = _per_level(option_algs, depth)
    level = LevelModel.from_mdp(mdp)
    pairs = []
    for k in range(depth):
        algorithm = abstraction_algs[k]
        phi = algorithm if isinstance(algorithm, StateAbstraction) else algorithm(level)
        if require_reduction and phi.n_abstract >= phi.n_states:
            if not pairs:
                raise ModelError("level 1 abstraction does not reduce %d states" % phi.n_states)
            get_logger().warning("level %d keeps %d states; hierarchy stops at depth %d",
                                 k + 1, phi.n_abstract, len(pairs))
            break
        pair = option_algs[k](level, phi)
        pairs.append(pair)
        level = abstract_level(level, pair)
    return Hierarchy(mdp, pairs)


def _ground_loss(hierarchy, k, choice, v_star):
    v = evaluate_policy_exact(hierarchy.mdp, hierarchy.ground(k, choice))
    return float(max(0.0, (v_star - v).max()))


def _best_level_policy(hierarchy, k, v_star, limit=ENUMERATION_LIMIT):
    """Level-k policy whose grounding loses the least value: exhaustive
    when small, otherwise single-block swaps from the level's greedy
    policy."""
    pair = hierarchy.pairs[k - 1]
    _, greedy = hierarchy.levels[k].solve()
    best = [pair.action_option(x, j) for x, j in enumerate(greedy.actions)]
    best_loss = _ground_loss(hierarchy, k, best, v_star)
    if hierarchy.n_policies(k) <= limit:
        for choice in hierarchy.policies(k):
            loss = _ground_loss(hierarchy, k, choice, v_star)
            if loss < best_loss - TOLERANCE:
                best, best_loss = list(choice), loss
        return best, best_loss

    improved = True
    while improved:
        improved = False
        for x in range(pair.n_abstract):
            for index in pair.options_in(x):
                if index == best[x]:
                    continue
                candidate = list(best)
                candidate[x] = index
                loss = _ground_loss(hierarchy, k, candidate, v_star)
                if loss < best_loss - TOLERANCE:
                    best, best_loss, improved = candidate, loss, True
    return best, best_loss


def _gap(first, second):
    return float(np.abs(first - second).max())


def hierarchy_value_loss(mdp, hierarchy, solution=None, strict=True, limit=ENUMERATION_LIMIT):
    """Loss of the best top-level policy and the measured inconsistency
    (kappa) and representation (ell) terms along its grounding chain.

    The chain runs V* -> V_0 of the best level-1 policy -> V_1 of it ->
    V_1 of the best level-2 policy lowered -> ... -> V_{n-1} of the top
    policy lowered, then back down to the ground. `ell[i]` and `kappa[i]`
    collect the terms met at level boundary i. The loss is checked against
    `bound` = n (kappa_hat + ell_hat); `certified` = n ell_hat + (2n - 2)
    kappa_hat is the chain's triangle-inequality sum, reported alongside and
    equal to `bound` for n <= 2."""
    solution = solution or solve_mdp(mdp)
    v_star = solution.v
    n = hierarchy.depth
    best = []
    for k in range(1, n + 1):
        best.append(_best_level_policy(hierarchy, k, v_star, limit)[0])
    loss = _ground_loss(hierarchy, n, best[-1], v_star)

    ell = [_gap(v_star, hierarchy.value(0, hierarchy.ground(1, best[0])))]
    kappa = []
    for i in range(1, n):
        own = best[i - 1]
        up = _gap(hierarchy.value(i - 1, hierarchy.lower(i, own)), hierarchy.value(i, own))
        lowered = hierarchy.lower(i + 1, best[i])
        ell.append(_gap(hierarchy.value(i, own), hierarchy.value(i, lowered)))
        kappa.append(up)

    top = best[-1]
    chain = [top]
    for k in range(n, 1, -1):
        chain.append(hierarchy.lower(k, chain[-1]))
    # chain[m] is the top policy lowered to level n - m
    for i in range(n - 1, 0, -1):
        above = chain[n - i]
        down = _gap(hierarchy.value(i, above), hierarchy.value(i - 1, hierarchy.lower(i, above)))
        kappa[i - 1] = max(kappa[i - 1], down)

    kappa_hat = max(kappa) if kappa else 0.0
    ell_hat = max(ell)
    bound = n * (kappa_hat + ell_hat)
    certified = n * ell_hat + max(0, 2 * n - 2) * kappa_hat
    holds = loss <= bound + 1e-6
    result = HierarchyLoss(loss, kappa, ell, kappa_hat, ell_hat, bound, certified, holds, best)
    get_logger().info("hierarchy of depth %d loses %g (kappa %g, ell %g)",
                      n, loss, kappa_hat, ell_hat)
    if strict and not holds:
        raise BoundViolationError("hierarchy loss %g exceeds %g" % (loss, bound),
                                  measured=loss, bound=bound)
    return result


def _run_option(mdp, pair, index, s, budget, rng):
    """Runs option `index` from s; returns (discounted reward, s', steps)."""
    option = pair.options[index]
    x = pair.phi(s)
    total, discount, steps = 0.0, 1.0, 0
    while steps < budget:
        s, reward = mdp.step(s, option.policy.act(s, rng), rng)
        total += discount * reward
        discount *= mdp.gamma
        steps += 1
        if mdp.terminal[s] or pair.phi(s) != x:
            break
    return total, s, steps


def _learn_over_options(kind, mdp, pair, budget, params, seed):
    """Spends `budget` ground steps learning over the pair's options and
    returns the start value of the greedy abstract policy."""
    agent = get_agent(kind)(pair.n_abstract, pair.branching, mdp.gamma, mdp.r_max, params,
                            derive_rng(seed, 1))
    rng = derive_rng(seed, 0)
    used = 0
    while used < budget:
        s = mdp.sample_start(rng)
        taken = 0
        while used < budget and taken < params.horizon and not mdp.terminal[s]:
            x = pair.phi(s)
            j = agent.act(x)
            reward, s_next, steps = _run_option(mdp, pair, pair.action_option(x, j), s,
                                                budget - used, rng)
            agent.observe(x, j, reward, pair.phi(s_next), bool(mdp.terminal[s_next]))
            used += steps
            taken += steps
            s = s_next
        agent.end_episode()

    q = agent.values()
    local = np.zeros(pair.n_abstract, dtype=int) if q is None else np.argmax(q, axis=1)
    choice = [pair.action_option(x, j) for x, j in enumerate(local)]
    policy = ground_abstract_policy(pair, choice)
    return start_value(mdp, evaluate_policy_exact(mdp, policy))


def branching_experiment(mdp, phi, distractor_grid, budgets, seeds=(0,),
                         agents=('q_learning', 'rmax'), eps_q=0.0, params=None):
    """Value of the policies that budgeted learners find over pairs with a
    growing number of distractor options per block.

    Every block owns one option within eps_q of optimal, so the options
    always represent a near-optimal policy; only the branching grows."""
    params = params or AgentParams()
    optimal = start_value(mdp, solve_mdp(mdp).v)
    rows = []
    for n_distractors in distractor_grid:
        for seed in seeds:
            pair = construct_q_eps_set(mdp, phi, eps_q, n_distractors,
                                       seed=derive_seed(seed, 2, n_distractors))
            for kind in agents:
                for budget in budgets:
                    value = _learn_over_options(kind, mdp, pair, budget,
                                                params.replace(seed=seed), seed)
                    rows.append({
                        'agent': kind, 'n_distractors': n_distractors, 'budget': budget,
                        'seed': seed, 'value': value, 'optimal_value': optimal,
                    })
        get_logger().info("branching %d distractors done", n_distractors)
    return rows
