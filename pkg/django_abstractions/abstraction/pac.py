# -*- coding: utf-8 -*-
"""Abstractions estimated from samples of a task distribution.

A pair of states is clustered when the predicate held for it in at least
a 1 - delta fraction of the sampled tasks. With
m = ceil(ln(2/delta) / eps^2) samples the empirical frequencies are within
eps of the true ones with probability 1 - delta."""
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import ArgumentError, ConvergenceError
from ..logging import get_logger
from ..mdp import solve_mdp
from ..seeding import make_rng
from .core import StateAbstraction
from .predicates import PredicateSpec, compatibility_matrix

__all__ = ['pac_sample_size', 'pair_frequencies', 'cluster_frequencies', 'pac_abstraction']


def pac_sample_size(delta, eps):
    if not 0.0 < delta <= 1.0:
        raise ArgumentError("delta must lie in (0, 1], got %r" % delta)
    if not 0.0 < eps <= delta:
        raise ArgumentError("eps must lie in (0, delta], got %r" % eps)
    return int(math.ceil(math.log(2.0 / delta) / eps ** 2 - 1e-9))


def _oracle(predicate):
    if isinstance(predicate, PredicateSpec):
        def oracle(task):
            return compatibility_matrix(solve_mdp(task), predicate)
        return oracle
    if callable(predicate):
        return predicate
    raise ArgumentError("predicate oracle must be a PredicateSpec or a callable")


def pair_frequencies(task_dist, predicate, m, seed=0):
    """Fraction of `m` sampled tasks in which each pair satisfied the
    predicate. Tasks sharing a goal are solved once."""
    oracle = _oracle(predicate)
    rng = make_rng(seed)
    counts = None
    memo = {}
    for i in range(m):
        goal = task_dist.sample_goal(rng)
        if goal not in memo:
            try:
                memo[goal] = np.asarray(oracle(task_dist.task(goal)), dtype=bool)
            except ConvergenceError as e:
                raise ConvergenceError(
                    "task %d (goal %s) could not be solved: %s" % (i, goal, e),
                    iterations=e.iterations, residual=e.residual,
                )
        counts = memo[goal].astype(int) if counts is None else counts + memo[goal]
    get_logger().debug("pac sampling: %d tasks, %d distinct", m, len(memo))
    return counts / float(m)


def cluster_frequencies(frequencies, delta):
    """Connected components of the graph joining pairs with frequency at
    least 1 - delta."""
    frequencies = np.asarray(frequencies, dtype=float)
    adjacency = frequencies >= 1.0 - delta - 1e-12
    _, labels = connected_components(csr_matrix(adjacency), directed=False)
    return StateAbstraction.canonical(labels.tolist())


def pac_abstraction(task_dist, predicate, delta, eps, seed=0):
    """Returns (phi, m) with m the number of tasks sampled."""
    m = pac_sample_size(delta, eps)
    phi = cluster_frequencies(pair_frequencies(task_dist, predicate, m, seed), delta)
    get_logger().info("pac abstraction: %d tasks, %d abstract states", m, phi.n_abstract)
    return phi, m
