# -*- coding: utf-8 -*-
"""Pairwise state-similarity predicates and the loss bounds they certify.

Predicates are evaluated on a solved MDP (an ``MdpSolution``). All of them
are vectorised: `compatibility_matrix` returns the full boolean matrix
used by the clustering routines, and `eval_predicate` reads one pair."""
import numpy as np
from scipy.special import softmax

from ..errors import ArgumentError
from ..mdp import solve_mdp

__all__ = [
    'PredicateSpec', 'PREDICATE_KINDS', 'TRANSITIVE_KINDS', 'compatibility_matrix',
    'eval_predicate', 'normalizer_gaps', 'measure_k', 'abstraction_loss_bound',
    'as_solution',
]

PREDICATE_KINDS = ('q_star_eps', 'model_eps', 'boltzmann', 'multinomial',
                   'q_star_d', 'pi_star')
TRANSITIVE_KINDS = ('q_star_d', 'pi_star')

# slack on every threshold comparison
COMPARISON_TOLERANCE = 1e-12


class PredicateSpec(object):
    """Predicate kind and its parameters."""

    def __init__(self, kind, eps=0.0, eps_r=0.0, eps_t=0.0, d=None):
        if kind not in PREDICATE_KINDS:
            raise ArgumentError("unknown predicate kind '%s' (known: %s)"
                                % (kind, ', '.join(PREDICATE_KINDS)))
        for name, value in (('eps', eps), ('eps_r', eps_r), ('eps_t', eps_t)):
            if value < 0:
                raise ArgumentError("%s must be nonnegative" % name)
        if kind == 'q_star_d' and (d is None or d <= 0):
            raise ArgumentError("q_star_d needs a positive bucket width d")
        self.kind = kind
        self.eps = float(eps)
        self.eps_r = float(eps_r)
        self.eps_t = float(eps_t)
        self.d = None if d is None else float(d)

    @property
    def is_transitive(self):
        return self.kind in TRANSITIVE_KINDS

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            kind = data.pop("kind")
        except KeyError:
            raise ArgumentError("predicate needs a 'kind'")
        return cls(kind, **data)

    def to_dict(self):
        result = {"kind": self.kind, "eps": self.eps}
        if self.kind == 'model_eps':
            result.update(eps_r=self.eps_r, eps_t=self.eps_t)
        if self.d is not None:
            result["d"] = self.d
        return result

    def __repr__(self):
        return "PredicateSpec(%s)" % ', '.join('%s=%r' % item
                                                for item in sorted(self.to_dict().items()))


def as_solution(mdp_or_solution):
    if hasattr(mdp_or_solution, 'q') and hasattr(mdp_or_solution, 'mdp'):
        return mdp_or_solution
    return solve_mdp(mdp_or_solution)


def _multinomial(q):
    totals = q.sum(axis=1, keepdims=True)
    uniform = np.full_like(q, 1.0 / q.shape[1])
    return np.where(totals != 0, q / np.where(totals != 0, totals, 1.0), uniform)


def _max_gap(features, rows, cols):
    """max over the last axes of |f(s1) - f(s2)| for s1 in rows, s2 in cols."""
    left = features[rows]
    right = features[cols]
    gap = np.abs(left[:, np.newaxis] - right[np.newaxis, :])
    return gap.reshape(len(rows), len(cols), -1).max(axis=2)


def _compatible(solution, spec, rows, cols, phi=None):
    q = solution.q
    tolerance = COMPARISON_TOLERANCE * max(1.0, np.abs(q).max())

    if spec.kind == 'q_star_eps':
        return _max_gap(q, rows, cols) <= spec.eps + tolerance
    if spec.kind == 'boltzmann':
        return _max_gap(softmax(q, axis=1), rows, cols) <= spec.eps + COMPARISON_TOLERANCE
    if spec.kind == 'multinomial':
        return _max_gap(_multinomial(q), rows, cols) <= spec.eps + COMPARISON_TOLERANCE
    if spec.kind == 'q_star_d':
        buckets = np.ceil(q / spec.d - tolerance)
        return _max_gap(buckets, rows, cols) == 0
    if spec.kind == 'pi_star':
        best = np.argmax(q, axis=1)
        return best[rows][:, np.newaxis] == best[cols][np.newaxis, :]

    mdp = solution.mdp
    membership = phi.membership() if phi is not None else np.eye(mdp.n_states)
    rewards_close = _max_gap(mdp.expected_reward, rows, cols) <= spec.eps_r + tolerance
    block_mass = mdp.transition.dot(membership)
    dynamics_close = _max_gap(block_mass, rows, cols) <= spec.eps_t + COMPARISON_TOLERANCE
    return rewards_close & dynamics_close


def compatibility_matrix(solution, spec, phi=None):
    """Boolean (S, S) matrix of the predicate over all pairs.

    `phi` supplies the blocks the model predicate sums transitions over;
    singleton blocks are used without it."""
    solution = as_solution(solution)
    states = np.arange(solution.mdp.n_states)
    return _compatible(solution, spec, states, states, phi)


def eval_predicate(solution, spec, s1, s2, phi=None):
    solution = as_solution(solution)
    return bool(_compatible(solution, spec, np.array([s1]), np.array([s2]), phi)[0, 0])


def normalizer_gaps(solution, kind, phi):
    """Largest within-block gap of the Boltzmann or multinomial normalizer."""
    solution = as_solution(solution)
    if kind == 'boltzmann':
        shift = solution.q.max()
        totals = np.exp(solution.q - shift).sum(axis=1) * np.exp(shift)
    elif kind == 'multinomial':
        totals = solution.q.sum(axis=1)
    else:
        raise ArgumentError("normalizer gaps exist for boltzmann and multinomial only")
    gap = 0.0
    for block in phi.blocks():
        values = totals[block]
        gap = max(gap, float(values.max() - values.min()))
    return gap


def measure_k(solution, spec, phi):
    """Empirical k_bolt or k_mult: the normalizer gap in units of eps."""
    gap = normalizer_gaps(solution, spec.kind, phi)
    if gap == 0.0:
        return 0.0
    if spec.eps == 0.0:
        return float('inf')
    return gap / spec.eps


def abstraction_loss_bound(kind, eps, r_max, gamma, n_abstract=1, n_actions=1, k=0.0):
    """Value-loss bound 2 eps RMax eta of an approximate abstraction.

    `kind` is one of q_star_eps, model_eps, boltzmann, multinomial. RMax is
    taken as given; the bound assumes rewards in [0, RMax]."""
    horizon = 1.0 / (1.0 - gamma)
    if kind == 'q_star_eps':
        eta = horizon ** 2
    elif kind == 'model_eps':
        eta = (1.0 + gamma * (n_abstract - 1)) * horizon ** 3
    elif kind == 'boltzmann':
        eta = (n_actions * horizon + eps * k + k) * horizon ** 2
    elif kind == 'multinomial':
        eta = (n_actions * horizon + k) * horizon ** 2
    else:
        raise ArgumentError("no value-loss bound for predicate kind '%s'" % kind)
    return 2.0 * eps * r_max * eta
