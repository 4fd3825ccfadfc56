# -*- coding: utf-8 -*-
"""Value loss of (abstraction, options) pairs and the classes of pairs
that certify it.

Four classes are checked exactly against a solved MDP:

* ``q_star``: every block owns an option whose block-local Q* is within
  eps_q of the optimal option's.
* ``model``: every block owns an option whose multi-time model is within
  eps_r (rewards) and eps_t (kernel entries) of the optimal option's.
* ``k_step``: every block owns an option whose k-step stopping
  distributions are within tau of the optimal option's, for every k.
* ``homomorphism``: for every abstract policy the induced abstract model
  is within eps_p (transitions) and eps_r (rewards) of the ground model.

The block-local Q* of option o in block x solves
Q(s, o) = R(s, pi_o(s)) + gamma sum_s' T(s'|s, pi_o(s)) [Q(s', o) if s' in x else V*(s')]."""
import csv
import math
from collections import OrderedDict, namedtuple

import numpy as np

from ..abstraction.core import WeightingFunction
from ..errors import ArgumentError, BoundViolationError
from ..logging import get_logger
from ..mdp import as_policy, policy_model, solve_mdp, value_loss_of_policy
from ..options.models import compute_mtm
from ..seeding import make_rng
from .models import LevelModel, abstract_level, relative_option_model
from .pairs import PhiOptionPair, PhiRelativeOption, ground_abstract_policy

__all__ = [
    'ClassSpec', 'CLASS_KINDS', 'CLASS_PARAMETERS', 'ClassMembership', 'PairLoss',
    'HomomorphismGap', 'NecessaryAudit', 'block_q_values', 'best_abstract_policy',
    'pair_value_loss', 'check_class_membership', 'homomorphism_gaps', 'class_loss_bound',
    'necessary_condition_audit', 'construct_q_eps_set', 'certify_pair',
    'certification_to_csv', 'ENUMERATION_LIMIT', 'CERTIFICATION_COLUMNS',
]

CLASS_PARAMETERS = OrderedDict([
    ('q_star', ('eps_q',)),
    ('model', ('eps_r', 'eps_t')),
    ('k_step', ('tau',)),
    ('homomorphism', ('eps_r', 'eps_p')),
])
CLASS_KINDS = tuple(CLASS_PARAMETERS)

ENUMERATION_LIMIT = 4096
HOMOMORPHISM_SAMPLES = 1000
TOLERANCE = 1e-9
CERTIFICATION_COLUMNS = ('class', 'parameter', 'bound', 'measured_loss', 'holds')

PairLoss = namedtuple('PairLoss', ['loss', 'abstract_policy', 'enumerated', 'best_loss',
                                   'consistent'])
ClassMembership = namedtuple('ClassMembership', ['member', 'achieved', 'kind', 'checked'])
HomomorphismGap = namedtuple('HomomorphismGap', ['k_p', 'k_r'])
NecessaryAudit = namedtuple('NecessaryAudit', ['holds', 'loss', 'eta', 'block_gaps',
                                               'offending'])


class ClassSpec(object):
    """Names a class of pairs and its parameters."""

    def __init__(self, kind, **params):
        if kind not in CLASS_PARAMETERS:
            raise ArgumentError("unknown class '%s' (known: %s)" % (kind, ', '.join(CLASS_KINDS)))
        unknown = set(params) - set(CLASS_PARAMETERS[kind])
        if unknown:
            raise ArgumentError("class '%s' takes no parameter %s" % (kind, sorted(unknown)[0]))
        values = OrderedDict()
        for name in CLASS_PARAMETERS[kind]:
            value = float(params.get(name, 0.0))
            if value < 0:
                raise ArgumentError("%s must be nonnegative" % name)
            values[name] = value
        self.kind = kind
        self.params = values

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            kind = data.pop("kind")
        except KeyError:
            raise ArgumentError("class spec needs a 'kind'")
        return cls(kind, **data)

    def to_dict(self):
        result = OrderedDict([("kind", self.kind)])
        result.update(self.params)
        return result

    def __getitem__(self, name):
        return self.params[name]

    def __repr__(self):
        return "ClassSpec(%s)" % ', '.join('%s=%r' % item for item in self.to_dict().items())


def _solution(mdp, solution):
    return solution or solve_mdp(mdp)


def _relative_q(mdp, option, v_star):
    """Block-local Q* of `option` over the whole state space (zero outside
    its block), with the exterior held at V*."""
    r_pi, t_pi = policy_model(mdp, option.policy)
    block = option.initiation_states()
    outside = np.flatnonzero(~option.initiation)
    system = np.eye(len(block)) - mdp.gamma * t_pi[np.ix_(block, block)]
    boundary = mdp.gamma * t_pi[np.ix_(block, outside)].dot(v_star[outside])
    q = np.zeros(mdp.n_states)
    q[block] = np.linalg.solve(system, r_pi[block] + boundary)
    return q


def block_q_values(mdp, pair, solution=None):
    """(|O_phi|, S) array of block-local Q*; entries outside an option's
    block are zero."""
    v_star = _solution(mdp, solution).v
    return np.array([_relative_q(mdp, option, v_star) for option in pair.options])


def _optimal_option(phi, x, solution):
    return PhiRelativeOption(phi, x, solution.policy, name='x%d*' % x)


def _grounded_loss(mdp, pair, choice, solution):
    return value_loss_of_policy(mdp, ground_abstract_policy(pair, choice), solution)


def best_abstract_policy(mdp, pair, solution=None, limit=ENUMERATION_LIMIT, strict=False):
    """Loss of the abstract policy that value iteration on the weighted
    abstract SMDP returns, grounded through the pair.

    When there are at most `limit` abstract policies all of them are
    evaluated; otherwise the SMDP policy is improved one block at a time
    until no single swap helps. `best_loss` is the least loss that search
    reaches and `consistent` is False when it beats the SMDP policy, which
    raises under `strict`."""
    solution = _solution(mdp, solution)
    upper = abstract_level(LevelModel.from_mdp(mdp), pair)
    _, greedy = upper.solve()
    proposal = [pair.action_option(x, j) for x, j in enumerate(greedy.actions)]
    smdp_loss = _grounded_loss(mdp, pair, proposal, solution)

    enumerated = pair.n_policies() <= limit
    best_loss = smdp_loss
    if enumerated:
        for choice in pair.abstract_policies():
            best_loss = min(best_loss, _grounded_loss(mdp, pair, choice, solution))
    else:
        best = list(proposal)
        improved = True
        while improved:
            improved = False
            for x in range(pair.n_abstract):
                for index in pair.options_in(x):
                    if index == best[x]:
                        continue
                    candidate = list(best)
                    candidate[x] = index
                    loss = _grounded_loss(mdp, pair, candidate, solution)
                    if loss < best_loss - TOLERANCE:
                        best, best_loss, improved = candidate, loss, True

    consistent = best_loss >= smdp_loss - TOLERANCE
    if not consistent:
        get_logger().warning("abstract SMDP policy loses %g, search finds %g",
                             smdp_loss, best_loss)
        if strict:
            raise BoundViolationError("abstract SMDP policy loses %g but %g is reachable"
                                      % (smdp_loss, best_loss),
                                      measured=smdp_loss, bound=best_loss)
    return PairLoss(smdp_loss, proposal, enumerated, best_loss, consistent)


def pair_value_loss(mdp, pair, solution=None, limit=ENUMERATION_LIMIT, strict=False):
    """max_s V*(s) - V^{grounded}(s) of the abstract SMDP's policy."""
    return best_abstract_policy(mdp, pair, solution, limit, strict).loss


def _q_star_membership(mdp, pair, spec, solution):
    gaps = np.abs(block_q_values(mdp, pair, solution) - solution.v[np.newaxis, :])
    per_option = [gaps[i, option.initiation].max() for i, option in enumerate(pair.options)]
    per_block = [min(per_option[i] for i in pair.options_in(x)) for x in range(pair.n_abstract)]
    achieved = float(max(per_block))
    return (achieved <= spec['eps_q'] + TOLERANCE, OrderedDict([('eps_q', achieved)]),
            pair.n_abstract)


def _model_membership(mdp, pair, spec, solution):
    level = LevelModel.from_mdp(mdp)
    member = True
    worst_r = worst_t = 0.0
    for x in range(pair.n_abstract):
        r_star, t_star = relative_option_model(level, _optimal_option(pair.phi, x, solution))
        block = np.flatnonzero(pair.phi.mapping == x)
        gaps = []
        for index in pair.options_in(x):
            r_o, t_o = relative_option_model(level, pair.options[index])
            gaps.append((float(np.abs(r_star[block] - r_o[block]).max()),
                         float(np.abs(t_star[block] - t_o[block]).max())))
        member = member and any(r <= spec['eps_r'] + TOLERANCE and t <= spec['eps_t'] + TOLERANCE
                                for r, t in gaps)
        r, t = min(gaps, key=lambda gap: (gap[0] + mdp.n_states * gap[1] * mdp.r_max,) + gap)
        worst_r, worst_t = max(worst_r, r), max(worst_t, t)
    return member, OrderedDict([('eps_r', worst_r), ('eps_t', worst_t)]), pair.n_abstract


def _stop_distributions(mdp, option):
    model = compute_mtm(mdp, option, record_kernels=True)
    return model.durations, model.residual


def _padded_gap(first, second):
    steps = max(len(first), len(second))
    first = np.concatenate([first, np.zeros((steps - len(first),) + first.shape[1:])])
    second = np.concatenate([second, np.zeros((steps - len(second),) + second.shape[1:])])
    return float(np.abs(first - second).max())


def _k_step_membership(mdp, pair, spec, solution):
    if not mdp.terminal.any():
        get_logger().warning("%r has no goal state; the k-step bound does not apply", mdp)
    worst = 0.0
    residual = 0.0
    for x in range(pair.n_abstract):
        star, star_residual = _stop_distributions(mdp, _optimal_option(pair.phi, x, solution))
        block = np.flatnonzero(pair.phi.mapping == x)
        best = np.inf
        for index in pair.options_in(x):
            kernels, option_residual = _stop_distributions(mdp, pair.options[index])
            best = min(best, _padded_gap(star[:, block], kernels[:, block]))
            residual = max(residual, option_residual)
        residual = max(residual, star_residual)
        worst = max(worst, best)
    if residual > TOLERANCE:
        get_logger().info("k-step distributions truncated with residual mass %g", residual)
    return worst <= spec['tau'] + TOLERANCE, OrderedDict([('tau', worst)]), pair.n_abstract


def homomorphism_gaps(mdp, pair, abstract_policy, w=None):
    """K_p and K_r of the abstract model that `abstract_policy` induces.

    T_phi(x'|x) = sum_{s in x} w(s) sum_{s' in x'} T(s'|s, pi_o(s)) and
    R_phi(x) = sum_{s in x} w(s) R(s, pi_o(s)) with o the option chosen in
    x; both gaps take the max over every ground (s, a)."""
    phi = pair.phi
    choice = pair.check_policy(abstract_policy)
    weights = (w if isinstance(w, WeightingFunction) else
               WeightingFunction.uniform(phi) if w is None else WeightingFunction(phi, w))
    membership = phi.membership()
    weighted = membership * weights.weights[:, np.newaxis]

    probabilities = np.array([pair.options[choice[x]].policy.probabilities[s]
                              for s, x in enumerate(phi.mapping)])
    r_pi, t_pi = policy_model(mdp, probabilities)
    t_phi = weighted.T.dot(t_pi).dot(membership)
    r_phi = weighted.T.dot(r_pi)

    ground = np.einsum('sat,tx->sax', mdp.transition, membership)
    k_p = np.abs(ground - t_phi[phi.mapping][:, np.newaxis, :]).sum(axis=2).max()
    k_r = np.abs(mdp.expected_reward - r_phi[phi.mapping][:, np.newaxis]).max()
    return HomomorphismGap(float(k_p), float(k_r))


def _homomorphism_membership(mdp, pair, spec, solution, limit=ENUMERATION_LIMIT,
                             n_samples=HOMOMORPHISM_SAMPLES, seed=0):
    if pair.n_policies() <= limit:
        policies = pair.abstract_policies()
        checked = pair.n_policies()
    else:
        rng = make_rng(seed)
        policies = ([owned[rng.integers(len(owned))] for owned in pair.by_block]
                    for _ in range(n_samples))
        checked = n_samples
        get_logger().info("sampling %d of %d abstract policies for the homomorphism check",
                          n_samples, pair.n_policies())
    worst_p = worst_r = 0.0
    for choice in policies:
        gap = homomorphism_gaps(mdp, pair, choice)
        worst_p, worst_r = max(worst_p, gap.k_p), max(worst_r, gap.k_r)
    member = worst_r <= spec['eps_r'] + TOLERANCE and worst_p <= spec['eps_p'] + TOLERANCE
    return member, OrderedDict([('eps_r', worst_r), ('eps_p', worst_p)]), checked


def check_class_membership(mdp, pair, spec, solution=None):
    """Evaluates the class predicate named by `spec` (a ClassSpec or a
    dict). `achieved` holds the tightest parameters the pair satisfies and
    `checked` the number of blocks or abstract policies examined."""
    if not isinstance(spec, ClassSpec):
        spec = ClassSpec.from_dict(spec)
    if pair.phi.n_states != mdp.n_states or pair.n_actions != mdp.n_actions:
        raise ArgumentError("%r does not fit %r" % (pair, mdp))
    solution = _solution(mdp, solution)
    check = {
        'q_star': _q_star_membership,
        'model': _model_membership,
        'k_step': _k_step_membership,
        'homomorphism': _homomorphism_membership,
    }[spec.kind]
    member, achieved, checked = check(mdp, pair, spec, solution)
    return ClassMembership(bool(member), achieved, spec.kind, checked)


def class_loss_bound(spec, gamma, n_states, r_max):
    """Worst value loss of any pair in the class described by `spec`."""
    if not isinstance(spec, ClassSpec):
        spec = ClassSpec.from_dict(spec)
    horizon = 1.0 / (1.0 - gamma)
    if spec.kind == 'q_star':
        return spec['eps_q'] * horizon
    if spec.kind == 'model':
        return (spec['eps_r'] + n_states * spec['eps_t'] * r_max) * horizon ** 2
    if spec.kind == 'k_step':
        return spec['tau'] * gamma * n_states * horizon ** 2
    return 2.0 * horizon * (spec['eps_r'] + gamma * r_max * horizon * spec['eps_p'] / 2.0)


def necessary_condition_audit(mdp, pair, eta, solution=None, loss=None, strict=False):
    """A pair losing at most `eta` must give every state of every block an
    option within eta of the optimal option in block-local Q*.

    `block_gaps[x]` is max_{s in x} min_{o in x} Q*(s, o*) - Q*(s, o);
    blocks above eta are `offending`. The audit fails only when the loss
    is within eta while some block offends."""
    if eta < 0:
        raise ArgumentError("eta must be nonnegative")
    solution = _solution(mdp, solution)
    if loss is None:
        loss = pair_value_loss(mdp, pair, solution)
    gaps = solution.v[np.newaxis, :] - block_q_values(mdp, pair, solution)
    block_gaps = []
    for x in range(pair.n_abstract):
        owned = pair.options_in(x)
        inside = pair.phi.mapping == x
        block_gaps.append(float(gaps[np.ix_(owned, np.flatnonzero(inside))].min(axis=0).max()))
    offending = [x for x, gap in enumerate(block_gaps) if gap > eta + TOLERANCE]
    holds = not (loss <= eta + TOLERANCE and offending)
    audit = NecessaryAudit(holds, float(loss), float(eta), block_gaps, offending)
    if strict and not holds:
        raise BoundViolationError("pair loses %g <= %g but blocks %s lack a near-optimal option"
                                  % (loss, eta, offending), measured=loss, bound=eta)
    return audit


def _mixed_option(mdp, phi, x, solution, weight):
    optimal = solution.policy.probabilities
    mixed = (1.0 - weight) * optimal + weight / mdp.n_actions
    return PhiRelativeOption(phi, x, mixed, name='x%d~' % x)


def _near_optimal_option(mdp, phi, x, solution, eps_q, steps=30):
    """The optimal option mixed with uniform actions as far as eps_q allows."""
    if eps_q <= 0:
        return _optimal_option(phi, x, solution)
    inside = phi.mapping == x

    def gap(weight):
        option = _mixed_option(mdp, phi, x, solution, weight)
        return np.abs(_relative_q(mdp, option, solution.v) - solution.v)[inside].max()

    if gap(1.0) <= eps_q:
        return _mixed_option(mdp, phi, x, solution, 1.0)
    low, high = 0.0, 1.0
    for _ in range(steps):
        middle = (low + high) / 2.0
        if gap(middle) <= eps_q:
            low = middle
        else:
            high = middle
    return _mixed_option(mdp, phi, x, solution, low)


def construct_q_eps_set(mdp, phi, eps_q=0.0, n_distractors=0, seed=0, solution=None):
    """Per block, one option within eps_q of the optimal option in
    block-local Q* plus `n_distractors` options with random deterministic
    policies, in random order. The result is checked against the q_star
    class."""
    if eps_q < 0:
        raise ArgumentError("eps_q must be nonnegative")
    if n_distractors < 0:
        raise ArgumentError("n_distractors must be nonnegative")
    if phi.n_states != mdp.n_states:
        raise ArgumentError("abstraction covers %d states, the MDP has %d"
                            % (phi.n_states, mdp.n_states))
    solution = _solution(mdp, solution)
    rng = make_rng(seed)
    options = []
    for x in range(phi.n_abstract):
        owned = [_near_optimal_option(mdp, phi, x, solution, eps_q)]
        for i in range(n_distractors):
            actions = rng.integers(mdp.n_actions, size=mdp.n_states)
            owned.append(PhiRelativeOption(phi, x, as_policy(actions, mdp.n_actions),
                                           name='x%d.r%d' % (x, i)))
        options.extend(owned[i] for i in rng.permutation(len(owned)))
    pair = PhiOptionPair(phi, options)

    membership = check_class_membership(mdp, pair, ClassSpec('q_star', eps_q=eps_q), solution)
    if not membership.member:
        raise BoundViolationError("constructed pair reaches eps_q=%g only"
                                  % membership.achieved['eps_q'],
                                  measured=membership.achieved['eps_q'], bound=eps_q)
    return pair


def certify_pair(mdp, pair, kinds=CLASS_KINDS, solution=None, strict=False):
    """One certification row per class: the tightest parameters the pair
    reaches, the loss bound they give and the measured loss."""
    solution = _solution(mdp, solution)
    loss = pair_value_loss(mdp, pair, solution)
    rows = []
    for kind in kinds:
        membership = check_class_membership(mdp, pair, ClassSpec(kind), solution)
        spec = ClassSpec(kind, **membership.achieved)
        bound = class_loss_bound(spec, mdp.gamma, mdp.n_states, mdp.r_max)
        holds = loss <= bound + TOLERANCE
        rows.append(OrderedDict([
            ('class', kind),
            ('parameter', ' '.join('%s=%.6g' % item for item in spec.params.items())),
            ('bound', bound),
            ('measured_loss', loss),
            ('holds', holds),
        ]))
        if not math.isinf(bound) and bound > mdp.v_max:
            get_logger().info("%s bound %g exceeds VMax %g", kind, bound, mdp.v_max)
        if strict and not holds:
            raise BoundViolationError("%s class bound %g is below the measured loss %g"
                                      % (kind, bound, loss), measured=loss, bound=bound)
    return rows


def certification_to_csv(rows, path):
    """Writes certification rows; `path` is a filename or an open file."""
    if hasattr(path, 'write'):
        return _write_rows(rows, path)
    with open(path, 'w', newline='') as stream:
        return _write_rows(rows, stream)


def _write_rows(rows, stream):
    writer = csv.writer(stream)
    writer.writerow(CERTIFICATION_COLUMNS)
    for row in rows:
        writer.writerow([row[column] for column in CERTIFICATION_COLUMNS])
    return len(rows)
