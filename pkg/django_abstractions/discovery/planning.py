# -*- coding: utf-8 -*-
"""Point options that speed up value iteration.

Distances count value-iteration sweeps. `plain[s]` is the number of
sweeps from V = 0 until s is eps-optimal; `pinned[s, c]` is the same count
when V(c) is held at V*(c) on every sweep, which is what a point option
from c to the goal buys. The distance is
``max(0, min(plain[s] - 1, pinned[s, c]))`` and a set of centers lets s
converge within `ell` sweeps when some center is within ell - 1."""
import itertools
import math
from collections import namedtuple

import numpy as np
from scipy.special import comb

from ..errors import ArgumentError, BoundViolationError, ConvergenceError, ModelError
from ..logging import get_logger
from ..mdp import DEFAULT_MAX_ITERATIONS, solve_mdp
from ..options.core import PointOption
from ..options.models import compute_mtm
from ..options.smdp import OperatorSet

__all__ = [
    'IterationDistance', 'iteration_distance', 'planning_iterations', 'goal_state',
    'greedy_set_cover', 'a_momi', 'a_mimo', 'asymmetric_k_center',
    'brute_force_point_options', 'brute_force_min_options', 'goal_directed_policy',
    'DEFAULT_EPS', 'MAX_SUBSETS',
]

DEFAULT_EPS = 0.01
MAX_SUBSETS = 200000

IterationDistance = namedtuple('IterationDistance', [
    'distance', 'plain', 'pinned', 'eps', 'goal', 'v_star',
])


def goal_state(mdp):
    """The single absorbing goal the discovery algorithms assume."""
    goals = np.flatnonzero(mdp.terminal)
    if len(goals) != 1:
        raise ModelError("option discovery needs exactly one absorbing goal state, %r has %d"
                         % (mdp, len(goals)))
    return int(goals[0])


def _sweep_until_optimal(mdp, v, v_star, eps, pin=None, max_iterations=DEFAULT_MAX_ITERATIONS):
    """Runs batched sweeps over the columns of `v` (S, B) and returns the
    per-state, per-column sweep from which the value stays eps-optimal."""
    settled = np.zeros(v.shape, dtype=int)
    target = v_star[:, np.newaxis]
    for sweep in range(1, max_iterations + 1):
        far = np.abs(v - target) >= eps
        if not far.any():
            return settled
        settled[far] = sweep
        q = mdp.expected_reward[:, :, np.newaxis] + mdp.gamma * np.tensordot(
            mdp.transition, v, axes=([2], [0]))
        v = q.max(axis=1)
        if pin is not None:
            v[pin, np.arange(len(pin))] = v_star[pin]
    raise ConvergenceError("value iteration did not reach eps-optimality in %d sweeps"
                           % max_iterations, iterations=max_iterations)


def iteration_distance(mdp, eps=DEFAULT_EPS, solution=None):
    if eps <= 0:
        raise ArgumentError("eps must be positive")
    goal = goal_state(mdp)
    solution = solution or solve_mdp(mdp)
    v_star = solution.v
    n = mdp.n_states

    plain = _sweep_until_optimal(mdp, np.zeros((n, 1)), v_star, eps)[:, 0]
    start = np.zeros((n, n))
    start[np.arange(n), np.arange(n)] = v_star
    pinned = _sweep_until_optimal(mdp, start, v_star, eps, pin=np.arange(n))
    distance = np.maximum(0, np.minimum(plain[:, np.newaxis] - 1, pinned)).astype(int)
    get_logger().debug("iteration distance on %r: option-free L=%d", mdp, plain.max())
    return IterationDistance(distance, plain.astype(int), pinned.astype(int), eps, goal, v_star)


def planning_iterations(mdp, options=(), eps=DEFAULT_EPS, v_star=None, models=None,
                        max_iterations=DEFAULT_MAX_ITERATIONS):
    """L(O): sweeps of value iteration over primitives plus `options` until
    every state is eps-optimal."""
    if v_star is None:
        v_star = solve_mdp(mdp).v
    operators = OperatorSet(mdp, options, include_primitives=True, model_kind='mtm',
                            models=models)
    v = np.zeros(mdp.n_states)
    for iteration in range(max_iterations + 1):
        if np.all(np.abs(v - v_star) < eps):
            return iteration
        v = operators.sweep(v)
    raise ConvergenceError("no eps-optimal sweep within %d iterations" % max_iterations,
                           iterations=max_iterations)


def goal_directed_policy(mdp, target):
    """Optimal policy of the task paying 1 on entering `target`."""
    reward = np.zeros_like(mdp.transition)
    reward[:, :, target] = 1.0
    terminal = mdp.terminal.copy()
    terminal[target] = True
    return solve_mdp(mdp.with_reward(reward, terminal=terminal)).policy


def _point_options(mdp, centers, goal, policy):
    return [PointOption(c, goal, policy, n_states=mdp.n_states,
                        name='%s->%s' % (mdp.label(c), mdp.label(goal)))
            for c in centers]


def greedy_set_cover(universe, subsets):
    """Chvatal's greedy cover. `subsets` maps a key to a set; returns the
    chosen keys in order. Ties go to the smallest key."""
    uncovered = set(universe)
    chosen = []
    while uncovered:
        best, gain = None, 0
        for key in sorted(subsets):
            covered = len(subsets[key] & uncovered)
            if covered > gain:
                best, gain = key, covered
        if best is None:
            raise ArgumentError("the subsets do not cover %s" % sorted(uncovered)[:5])
        chosen.append(best)
        uncovered -= subsets[best]
    return chosen


def a_momi(mdp, eps=DEFAULT_EPS, ell=1, distance=None, verify=True):
    """Fewest point options to the goal so that value iteration converges
    within `ell` sweeps, via greedy set cover over the iteration distance.

    The returned set is checked by running value iteration with it."""
    if ell < 1:
        raise ArgumentError("ell must be at least one sweep")
    distance = distance or iteration_distance(mdp, eps)
    d = distance.distance
    n = mdp.n_states
    converged = set(np.flatnonzero(distance.plain <= ell).tolist())
    universe = set(range(n)) - converged
    subsets = dict((c, set(np.flatnonzero(d[:, c] <= ell - 1).tolist()) & universe)
                   for c in sorted(universe))
    centers = greedy_set_cover(universe, subsets)
    solution = solve_mdp(mdp)
    options = _point_options(mdp, centers, distance.goal, solution.policy)
    if verify:
        achieved = planning_iterations(mdp, options, eps, solution.v)
        if achieved > ell:
            raise BoundViolationError("A-MOMI options need %d sweeps, more than ell=%d"
                                      % (achieved, ell), measured=achieved, bound=ell)
    get_logger().info("A-MOMI ell=%d: %d options", ell, len(options))
    return options


def _radius(d, plain, centers):
    """max_s min(plain[s] - 1, min_c d[s, c])."""
    reach = plain - 1
    if centers:
        reach = np.minimum(reach, d[:, list(centers)].min(axis=1))
    return int(max(0, reach.max()))


def asymmetric_k_center(d, plain, k):
    """At most k centers keeping every state within a small radius.

    Binary search over the radius r; for a fixed r the states not already
    within r + 1 of convergence are covered greedily by the centers that
    reach them within r. Leftover budget is spent greedily in batches of
    log2 k centers that most shrink the radius."""
    n = len(plain)
    radii = sorted(set(d.flatten().tolist()) | set(np.maximum(plain - 1, 0).tolist()))
    best = None
    low, high = 0, len(radii) - 1
    while low <= high:
        middle = (low + high) // 2
        r = radii[middle]
        universe = set(np.flatnonzero(plain - 1 > r).tolist())
        subsets = dict((c, set(np.flatnonzero(d[:, c] <= r).tolist()) & universe)
                       for c in range(n))
        centers = greedy_set_cover(universe, subsets)
        if len(centers) <= k:
            best = centers
            high = middle - 1
        else:
            low = middle + 1
    centers = list(best if best is not None else [])

    batch = max(1, int(math.log2(k))) if k > 1 else 1
    while len(centers) < k:
        remaining = [c for c in range(n) if c not in centers]
        if not remaining:
            break
        scores = sorted((_radius(d, plain, centers + [c]), c) for c in remaining)
        if scores[0][0] >= _radius(d, plain, centers):
            break
        for _, c in scores[:min(batch, k - len(centers))]:
            centers.append(c)
    return centers


def a_mimo(mdp, eps=DEFAULT_EPS, k=1, distance=None):
    """At most `k` point options to the goal chosen as asymmetric k-centers
    of the iteration distance."""
    if k < 1:
        raise ArgumentError("k must be at least 1")
    distance = distance or iteration_distance(mdp, eps)
    centers = asymmetric_k_center(distance.distance, distance.plain, k)
    options = _point_options(mdp, sorted(centers), distance.goal, solve_mdp(mdp).policy)
    get_logger().info("A-MIMO k=%d: %d options, radius %d", k, len(options),
                      _radius(distance.distance, distance.plain, centers))
    return options


def _candidates(mdp, targets):
    goal = goal_state(mdp)
    if targets == 'goal':
        policy = solve_mdp(mdp).policy
        return [(c, goal, policy) for c in range(mdp.n_states) if c != goal]
    if targets == 'all':
        candidates = []
        for j in range(mdp.n_states):
            policy = goal_directed_policy(mdp, j)
            candidates.extend((i, j, policy) for i in range(mdp.n_states) if i != j)
        return candidates
    raise ArgumentError("targets must be 'goal' or 'all'")


def brute_force_point_options(mdp, eps=DEFAULT_EPS, k=1, targets='goal',
                              max_subsets=MAX_SUBSETS):
    """Exhaustive search for the set of at most `k` point options with the
    fewest sweeps. Returns (options, L)."""
    if k < 0:
        raise ArgumentError("k must be nonnegative")
    candidates = _candidates(mdp, targets)
    total = sum(comb(len(candidates), size, exact=True) for size in range(k + 1))
    if total > max_subsets:
        raise ArgumentError("%d option subsets exceed the enumeration limit of %d"
                            % (total, max_subsets))
    v_star = solve_mdp(mdp).v
    options = [PointOption(i, j, policy, n_states=mdp.n_states) for i, j, policy in candidates]
    models = [compute_mtm(mdp, option) for option in options]

    best, best_l = [], planning_iterations(mdp, (), eps, v_star)
    for size in range(1, k + 1):
        for subset in itertools.combinations(range(len(options)), size):
            achieved = planning_iterations(mdp, [options[i] for i in subset], eps, v_star,
                                           models=[models[i] for i in subset])
            if achieved < best_l:
                best, best_l = [options[i] for i in subset], achieved
    return best, best_l


def brute_force_min_options(mdp, eps=DEFAULT_EPS, ell=1, targets='goal',
                            max_subsets=MAX_SUBSETS):
    """Smallest point-option set reaching L(O) <= ell, by increasing size."""
    if ell < 1:
        raise ArgumentError("ell must be at least one sweep")
    candidates = _candidates(mdp, targets)
    v_star = solve_mdp(mdp).v
    if planning_iterations(mdp, (), eps, v_star) <= ell:
        return []
    options = [PointOption(i, j, policy, n_states=mdp.n_states) for i, j, policy in candidates]
    models = [compute_mtm(mdp, option) for option in options]
    enumerated = 0
    for size in range(1, len(options) + 1):
        for subset in itertools.combinations(range(len(options)), size):
            enumerated += 1
            if enumerated > max_subsets:
                raise ArgumentError("exceeded the enumeration limit of %d subsets" % max_subsets)
            achieved = planning_iterations(mdp, [options[i] for i in subset], eps, v_star,
                                           models=[models[i] for i in subset])
            if achieved <= ell:
                return [options[i] for i in subset]
    raise ArgumentError("no point-option set reaches %d sweeps" % ell)
