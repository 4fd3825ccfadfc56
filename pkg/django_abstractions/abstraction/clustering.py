# -*- coding: utf-8 -*-
"""Building abstractions from pairwise predicates."""
import numpy as np

from ..errors import ArgumentError
from ..logging import get_logger
from ..mdp import evaluate_policy_exact, start_value
from ..seeding import make_rng
from .core import StateAbstraction, abstract_policy_of, lift_policy
from .predicates import PredicateSpec, as_solution, compatibility_matrix

__all__ = [
    'greedy_cluster', 'transitive_cluster', 'brute_force_min_partition',
    'epsilon_sweep', 'BRUTE_FORCE_LIMIT',
]

BRUTE_FORCE_LIMIT = 12


def _order(n_states, order_seed):
    if order_seed is None:
        return np.arange(n_states)
    return make_rng(order_seed).permutation(n_states)


def greedy_cluster(mdp, spec, order_seed=0, first_member=False):
    """Scans states in a seeded random order and puts each into the first
    cluster it is compatible with, opening a new cluster otherwise.

    A state joins a cluster only when the predicate holds against every
    member; `first_member` relaxes that to the cluster's first member."""
    solution = as_solution(mdp)
    compatible = compatibility_matrix(solution, spec)

    clusters = []
    for s in _order(solution.mdp.n_states, order_seed):
        for cluster in clusters:
            members = cluster[:1] if first_member else cluster
            if compatible[members, s].all():
                cluster.append(s)
                break
        else:
            clusters.append([s])

    phi = StateAbstraction.from_blocks(clusters, solution.mdp.n_states).relabelled()
    get_logger().debug("greedy %s clustering: %d states -> %d",
                       spec.kind, solution.mdp.n_states, phi.n_abstract)
    return phi


def transitive_cluster(mdp, spec=None, d=None, order_seed=None):
    """Partition into the classes of a transitive predicate.

    Each state is compared with one representative per class, so the
    result does not depend on the scan order and is the smallest
    partition consistent with the predicate."""
    if spec is None:
        if d is None:
            raise ArgumentError("transitive clustering needs a predicate or a bucket width")
        spec = PredicateSpec('q_star_d', d=d)
    if not spec.is_transitive:
        raise ArgumentError("predicate '%s' is not transitive; use greedy_cluster"
                            % spec.kind)
    solution = as_solution(mdp)
    compatible = compatibility_matrix(solution, spec)

    representatives = []
    labels = np.empty(solution.mdp.n_states, dtype=int)
    for s in _order(solution.mdp.n_states, order_seed):
        for label, representative in enumerate(representatives):
            if compatible[representative, s]:
                labels[s] = label
                break
        else:
            labels[s] = len(representatives)
            representatives.append(s)
    return StateAbstraction.canonical(labels.tolist())


def brute_force_min_partition(compatible, limit=BRUTE_FORCE_LIMIT):
    """Smallest partition whose blocks are cliques of `compatible`.

    Exhaustive search over increasing block counts; states beyond `limit`
    are refused."""
    compatible = np.asarray(compatible, dtype=bool)
    n = compatible.shape[0]
    if n > limit:
        raise ArgumentError("brute-force partition search is limited to %d states, got %d"
                            % (limit, n))

    def assign(s, labels, blocks, k):
        if s == n:
            return True
        for x, block in enumerate(blocks):
            if compatible[block, s].all():
                block.append(s)
                labels[s] = x
                if assign(s + 1, labels, blocks, k):
                    return True
                block.pop()
        if len(blocks) < k:
            blocks.append([s])
            labels[s] = len(blocks) - 1
            if assign(s + 1, labels, blocks, k):
                return True
            blocks.pop()
        return False

    for k in range(1, n + 1):
        labels = [0] * n
        if assign(0, labels, [], k):
            return StateAbstraction(labels, k)
    raise ArgumentError("no partition found")


def epsilon_sweep(mdps, kind, eps_grid, seeds=(0,), first_member=False):
    """Greedy abstractions over a grid of eps values.

    Returns one row per (mdp, eps, seed) with the abstract state count, the
    start value of the grounded abstract policy and its value loss."""
    rows = []
    for index, mdp in enumerate(mdps):
        solution = as_solution(mdp)
        best = start_value(solution.mdp, solution.v)
        for eps in eps_grid:
            spec = PredicateSpec(kind, eps=eps, eps_r=eps, eps_t=eps)
            for seed in seeds:
                phi = greedy_cluster(solution, spec, order_seed=seed, first_member=first_member)
                policy = lift_policy(phi, abstract_policy_of(solution.mdp, phi))
                v = evaluate_policy_exact(solution.mdp, policy)
                rows.append({
                    "mdp": index,
                    "eps": eps,
                    "seed": seed,
                    "n_states": solution.mdp.n_states,
                    "n_abstract": phi.n_abstract,
                    "optimal_value": best,
                    "abstract_value": start_value(solution.mdp, v),
                    "value_loss": float(max(0.0, (solution.v - v).max())),
                })
    return rows
