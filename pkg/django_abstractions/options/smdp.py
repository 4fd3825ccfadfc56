# -*- coding: utf-8 -*-
"""Value iteration over options."""
from collections import namedtuple

import numpy as np

from ..errors import ArgumentError, ConvergenceError
from ..logging import get_logger
from ..mdp import DEFAULT_DELTA, DEFAULT_MAX_ITERATIONS, q_from_v
from .models import compute_elm_exact, compute_mtm

__all__ = [
    'OperatorSet', 'SmdpSolution', 'smdp_value_iteration', 'smdp_solve',
    'smdp_iterates', 'elm_mtm_value_gap', 'delta_for_epsilon', 'MODEL_KINDS',
]

MODEL_KINDS = ('mtm', 'elm')

SmdpSolution = namedtuple('SmdpSolution', ['v', 'q', 'iterations', 'operators'])


def delta_for_epsilon(eps, gamma):
    """Sweep tolerance eps (1 - gamma) / (2 gamma) making the greedy policy
    eps-optimal."""
    if gamma <= 0:
        return eps
    return eps * (1.0 - gamma) / (2.0 * gamma)


class OperatorSet(object):
    """Primitive actions and option models available for backups.

    Primitive backups reuse the one-step Bellman backup so that a set
    without options reproduces plain value iteration exactly. Ground
    terminal states keep value 0; any other state must have an operator."""

    def __init__(self, mdp, options=(), include_primitives=True, model_kind='mtm',
                 discount_interior=False, models=None):
        if model_kind not in MODEL_KINDS:
            raise ArgumentError("model kind must be one of %s" % ', '.join(MODEL_KINDS))
        self.mdp = mdp
        self.options = list(options)
        self.include_primitives = include_primitives
        self.model_kind = model_kind

        if models is None:
            models = [self._model(option, discount_interior) for option in self.options]
        self.models = list(models)

        n = mdp.n_states
        self.kernels = np.array([model.transition for model in self.models]).reshape(-1, n, n)
        self.rewards = np.array([model.reward for model in self.models]).reshape(-1, n)
        self.available = np.array([model.initiation for model in self.models],
                                  dtype=bool).reshape(-1, n)

        covered = self.available.any(axis=0) | mdp.terminal
        if include_primitives:
            covered[:] = True
        if not covered.all():
            uncovered = np.flatnonzero(~covered)
            raise ArgumentError("no operator is available in state %s"
                                % ', '.join(str(mdp.label(s)) for s in uncovered[:5]))

    def _model(self, option, discount_interior):
        if self.model_kind == 'mtm':
            return compute_mtm(self.mdp, option)
        return compute_elm_exact(self.mdp, option, discount_interior)

    @property
    def names(self):
        names = []
        if self.include_primitives:
            names.extend('a%d' % a for a in range(self.mdp.n_actions))
        names.extend(option.name or 'o%d' % i for i, option in enumerate(self.options))
        return names

    def __len__(self):
        return (self.mdp.n_actions if self.include_primitives else 0) + len(self.models)

    def backup(self, v):
        """(operators, S) values; unavailable operators are -inf."""
        parts = []
        if self.include_primitives:
            parts.append(q_from_v(self.mdp, v).T)
        if len(self.models):
            values = self.rewards + self.kernels.dot(v)
            parts.append(np.where(self.available, values, -np.inf))
        return np.vstack(parts)

    def sweep(self, v):
        values = self.backup(v).max(axis=0)
        if not self.include_primitives:
            values = np.where(self.mdp.terminal, 0.0, values)
        return values


def smdp_iterates(operators, v0=None):
    v = np.zeros(operators.mdp.n_states) if v0 is None else np.array(v0, dtype=float)
    while True:
        v = operators.sweep(v)
        yield v


def smdp_solve(mdp, options=(), include_primitives=True, model_kind='mtm',
               delta=DEFAULT_DELTA, v0=None, max_iterations=DEFAULT_MAX_ITERATIONS,
               operators=None, discount_interior=False):
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    if operators is None:
        operators = OperatorSet(mdp, options, include_primitives, model_kind,
                                discount_interior)
    v = np.zeros(mdp.n_states) if v0 is None else np.array(v0, dtype=float)
    residual = np.inf
    for iteration in range(1, max_iterations + 1):
        v_next = operators.sweep(v)
        residual = np.abs(v_next - v).max()
        v = v_next
        if residual <= delta:
            get_logger().debug("SMDP value iteration with %d operators converged after %d sweeps",
                               len(operators), iteration)
            return SmdpSolution(v, operators.backup(v), iteration, operators)
    raise ConvergenceError("SMDP value iteration did not converge in %d sweeps" % max_iterations,
                           iterations=max_iterations, residual=residual)


def smdp_value_iteration(mdp, options=(), include_primitives=True, model_kind='mtm',
                         delta=DEFAULT_DELTA, v0=None, max_iterations=DEFAULT_MAX_ITERATIONS,
                         operators=None, discount_interior=False):
    """Returns (V, L), L the number of sweeps until no entry moved by more
    than `delta`."""
    solution = smdp_solve(mdp, options, include_primitives, model_kind, delta, v0,
                          max_iterations, operators, discount_interior)
    return solution.v, solution.iterations


def _near_best(q, tie):
    """Boolean (operators, states) mask of choices within `tie` of each
    state's best."""
    return q >= q.max(axis=0, keepdims=True) - tie


def elm_mtm_value_gap(mdp, options, delta=DEFAULT_DELTA, include_primitives=True,
                      discount_interior=False, tie=None):
    """(max |V_mtm - V_elm|, whether both greedy operator choices agree on
    every non-terminal state).

    Choices within `tie` (default `delta`) of a state's best count as
    greedy, and the two models agree on a state when some choice is
    greedy under both."""
    tie = delta if tie is None else tie
    if tie < 0:
        raise ArgumentError("tie must be nonnegative")
    mtm = smdp_solve(mdp, options, include_primitives, 'mtm', delta)
    elm = smdp_solve(mdp, options, include_primitives, 'elm', delta,
                     discount_interior=discount_interior)
    gap = float(np.abs(mtm.v - elm.v).max())
    live = ~mdp.terminal
    shared = (_near_best(mtm.q, tie) & _near_best(elm.q, tie)).any(axis=0)
    disagree = np.flatnonzero(live & ~shared)
    if len(disagree):
        get_logger().debug("ELM and MTM greedy choices differ in %d states", len(disagree))
    return gap, not len(disagree)
