# -*- coding: utf-8 -*-
"""Information-bottleneck abstractions of a demonstrator policy.

The deterministic bottleneck (DIBS) trades the entropy of the abstract
state marginal against the expected KL divergence between the
demonstrator's action distribution and the abstract policy, weighted by
`beta`. Entropies and divergences are in bits."""
import math
from collections import namedtuple

import numpy as np
from scipy.special import rel_entr, xlogy

from .abstraction.core import StateAbstraction, lift_policy
from .errors import ArgumentError, BoundViolationError
from .logging import get_logger
from .mdp import (Policy, as_policy, epsilon_soft_policy, evaluate_policy_exact,
                  policy_model, solve_mdp, start_value)
from .seeding import make_rng

__all__ = [
    'stationary_distribution', 'episode_distribution', 'entropy', 'kl', 'DibsResult',
    'SibsResult',
    'run_dibs', 'run_sibs', 'run_ac_dibs', 'multitask_intersection',
    'dib_bound_audit', 'DibAudit', 'stationary_distance_audit', 'StationaryAudit',
    'beta_sweep', 'abstract_policy_value', 'default_demonstrator',
    'DEFAULT_CONVERGENCE', 'DEFAULT_DELTA_MIN', 'DEFAULT_SOFTENING',
]

DEFAULT_CONVERGENCE = 0.001
DEFAULT_DELTA_MIN = 1e-4
DEFAULT_SOFTENING = 0.05
STATIONARY_TOLERANCE = 1e-10
OBJECTIVE_SLACK = 1e-9
LOG2 = math.log(2.0)


def stationary_distribution(mdp, policy, tolerance=STATIONARY_TOLERANCE):
    """(1 - gamma) sum_t gamma^t P(s_t = s), accumulated until the
    remaining discounted mass drops below `tolerance`, then normalized."""
    _, t_pi = policy_model(mdp, policy)
    flow = mdp.start_dist.copy()
    rho = np.zeros(mdp.n_states)
    weight = 1.0 - mdp.gamma
    remaining = 1.0
    while True:
        rho += weight * flow
        remaining *= mdp.gamma
        if remaining < tolerance:
            break
        weight *= mdp.gamma
        flow = flow.dot(t_pi)
    return rho / rho.sum()


def episode_distribution(mdp, policy, starts=None, tolerance=STATIONARY_TOLERANCE):
    """Discounted state occupancy of episodes that end on entering a
    terminal state, normalized. The terminal state is counted on arrival.

    `starts` overrides the start distribution; 'uniform' spreads it over
    the non-terminal states."""
    _, t_pi = policy_model(mdp, policy)
    if starts is None:
        flow = mdp.start_dist.copy()
    elif isinstance(starts, str) and starts == 'uniform':
        flow = (~mdp.terminal).astype(float)
        if not flow.any():
            raise ArgumentError("every state is terminal")
        flow /= flow.sum()
    else:
        flow = _check_distribution(starts, 'starts').copy()
    rho = np.zeros(mdp.n_states)
    weight = 1.0
    while True:
        rho += weight * flow
        flow = np.where(mdp.terminal, 0.0, flow).dot(t_pi)
        weight *= mdp.gamma
        if weight * flow.sum() < tolerance:
            break
    return rho / rho.sum()


def _check_distribution(p, name='p'):
    p = np.asarray(p, dtype=float)
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-8:
        raise ArgumentError("%s is not a probability vector" % name)
    return p


def entropy(p):
    p = _check_distribution(p)
    return float(-xlogy(p, p).sum() / LOG2)


def kl(p, q):
    """KL(p || q) in bits; +inf when p puts mass where q has none."""
    p = _check_distribution(p, 'p')
    q = _check_distribution(q, 'q')
    if np.any((p > 0) & (q <= 0)):
        return float('inf')
    return float(rel_entr(p, q).sum() / LOG2)


def _kl_matrix(pi_e, pi_phi):
    """D[s, x] = KL(pi_E(.|s) || pi_phi(.|x)) in bits."""
    negative_entropy = xlogy(pi_e, pi_e).sum(axis=1)
    with np.errstate(divide='ignore'):
        cross = pi_e.dot(np.log(pi_phi).T)
    return (negative_entropy[:, np.newaxis] - cross) / LOG2


def _demonstrator_table(mdp, demonstrator):
    table = as_policy(demonstrator, mdp.n_actions).probabilities
    if table.shape != (mdp.n_states, mdp.n_actions):
        raise ArgumentError("demonstrator does not fit %r" % mdp)
    if np.any(table <= 0):
        raise ArgumentError(
            "the demonstrator must give every action positive probability in every "
            "state, otherwise the KL distortion is infinite; soften it with "
            "epsilon_soft_policy(policy, n_actions, %g)" % DEFAULT_SOFTENING
        )
    return table


def default_demonstrator(mdp, epsilon=DEFAULT_SOFTENING):
    """eps-soft optimal policy."""
    return epsilon_soft_policy(solve_mdp(mdp).policy, mdp.n_actions, epsilon)


def _used(rho_phi, delta_min):
    return int((rho_phi >= delta_min).sum())


def _random_codebook(rng, n_codes, n_actions):
    """A Dirichlet-drawn code marginal and code policies."""
    rho_phi = rng.dirichlet(np.ones(n_codes))
    pi_phi = rng.dirichlet(np.ones(n_actions), size=n_codes)
    return rho_phi, pi_phi


def _compact(codes, rho_phi, pi_phi):
    """Relabels the occupied codes 0..k-1 and keeps their policy rows."""
    occupied = sorted(set(codes.tolist()))
    relabel = dict((code, i) for i, code in enumerate(occupied))
    phi = StateAbstraction([relabel[code] for code in codes], len(occupied))
    return phi, Policy.stochastic(pi_phi[occupied]), rho_phi[occupied]


DibsResult = namedtuple('DibsResult', [
    'phi', 'policy', 'trace', 'rho', 'rho_phi', 'iterations', 'converged',
    'used_codes', 'entropy', 'distortion', 'beta',
])


def run_dibs(mdp, demonstrator, beta, delta_conv=DEFAULT_CONVERGENCE, max_iters=1000,
             seed=0, rho=None, delta_min=DEFAULT_DELTA_MIN, n_codes=None):
    """Deterministic information bottleneck for state abstraction.

    Codes start uniformly at random; the code marginal and the code
    policies start as draws from flat Dirichlet distributions. Each
    iteration reassigns every state to the code maximising
    log2 rho_phi(x) - beta KL(pi_E(s) || pi_phi(x)) (lowest code on ties)
    and then recomputes the marginal and the rho-weighted code
    policies from the new assignment. Iteration stops when no assignment
    changed and neither the marginal nor any code policy moved by more
    than `delta_conv` in L1. The objective
    H(rho_phi) + beta E_rho[KL] never increases; an increase is reported as
    a BoundViolationError. Without `rho` states are weighted by
    the demonstrator's `episode_distribution`."""
    if beta < 0:
        raise ArgumentError("beta must be nonnegative")
    pi_e = _demonstrator_table(mdp, demonstrator)
    rho = episode_distribution(mdp, pi_e) if rho is None else _check_distribution(rho, 'rho')
    n_codes = n_codes or mdp.n_states
    rng = make_rng(seed)
    logger = get_logger()

    codes = rng.integers(0, n_codes, size=mdp.n_states)
    rho_phi, pi_phi = _random_codebook(rng, n_codes, mdp.n_actions)

    trace = []
    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        distortion = _kl_matrix(pi_e, pi_phi)
        with np.errstate(divide='ignore'):
            score = np.log2(rho_phi)[np.newaxis, :] - beta * distortion
        new_codes = np.argmax(score, axis=1)

        new_rho_phi = np.bincount(new_codes, weights=rho, minlength=n_codes)
        mass = np.zeros((n_codes, mdp.n_actions))
        np.add.at(mass, new_codes, rho[:, np.newaxis] * pi_e)
        occupied = new_rho_phi > 0
        new_pi_phi = pi_phi.copy()
        new_pi_phi[occupied] = mass[occupied] / new_rho_phi[occupied, np.newaxis]

        expected_kl = float(rho.dot(_kl_matrix(pi_e, new_pi_phi)[np.arange(mdp.n_states),
                                                                 new_codes]))
        objective = entropy(new_rho_phi) + beta * expected_kl
        if trace and objective > trace[-1] + OBJECTIVE_SLACK * max(1.0, abs(trace[-1])):
            raise BoundViolationError(
                "DIBS objective increased from %r to %r at iteration %d"
                % (trace[-1], objective, iteration), measured=objective, bound=trace[-1])
        trace.append(objective)

        change = max(np.abs(new_rho_phi - rho_phi).sum(),
                     np.abs(new_pi_phi - pi_phi).sum(axis=1).max())
        stable = np.array_equal(new_codes, codes)
        codes, rho_phi, pi_phi = new_codes, new_rho_phi, new_pi_phi
        if stable and change <= delta_conv:
            converged = True
            break

    phi, policy, _ = _compact(codes, rho_phi, pi_phi)
    distortion = float(rho.dot(_kl_matrix(pi_e, pi_phi)[np.arange(mdp.n_states), codes]))
    logger.debug("DIBS beta=%g: %d iterations, %d codes used", beta, iteration,
                 _used(rho_phi, delta_min))
    return DibsResult(phi, policy, trace, rho, rho_phi, iteration, converged,
                      _used(rho_phi, delta_min), entropy(rho_phi), distortion, beta)


SibsResult = namedtuple('SibsResult', [
    'encoder', 'phi', 'policy', 'trace', 'rho', 'rho_phi', 'iterations', 'converged',
    'used_codes', 'beta',
])


def run_sibs(mdp, demonstrator, beta, delta_conv=DEFAULT_CONVERGENCE, max_iters=1000,
             seed=0, rho=None, delta_min=DEFAULT_DELTA_MIN, n_codes=None):
    """Stochastic variant: phi(x|s) proportional to rho_phi(x) 2^(-beta KL).

    `encoder` is the soft map and `policy` the ground policy mixing the
    code policies through it. `phi` decodes each state to its most likely
    code (lowest code on ties); `used_codes` counts decoded codes with
    marginal mass of at least `delta_min`."""
    if beta < 0:
        raise ArgumentError("beta must be nonnegative")
    pi_e = _demonstrator_table(mdp, demonstrator)
    rho = episode_distribution(mdp, pi_e) if rho is None else _check_distribution(rho, 'rho')
    n_codes = n_codes or mdp.n_states
    rng = make_rng(seed)

    encoder = np.zeros((mdp.n_states, n_codes))
    encoder[np.arange(mdp.n_states), rng.integers(0, n_codes, size=mdp.n_states)] = 1.0
    rho_phi, pi_phi = _random_codebook(rng, n_codes, mdp.n_actions)

    trace = []
    converged = False
    iteration = 0
    for iteration in range(1, max_iters + 1):
        distortion = _kl_matrix(pi_e, pi_phi)
        with np.errstate(divide='ignore'):
            log_weights = np.log2(rho_phi)[np.newaxis, :] - beta * distortion
        log_weights -= log_weights.max(axis=1, keepdims=True)
        new_encoder = np.exp2(log_weights)
        new_encoder /= new_encoder.sum(axis=1, keepdims=True)

        joint = rho[:, np.newaxis] * new_encoder
        new_rho_phi = joint.sum(axis=0)
        occupied = new_rho_phi > 0
        new_pi_phi = pi_phi.copy()
        new_pi_phi[occupied] = joint.T.dot(pi_e)[occupied] / new_rho_phi[occupied, np.newaxis]

        with np.errstate(divide='ignore', invalid='ignore'):
            ratio = np.where(joint > 0, new_encoder / new_rho_phi[np.newaxis, :], 1.0)
        information = float((joint * np.log2(ratio)).sum())
        expected_kl = float((joint * _kl_matrix(pi_e, new_pi_phi)).sum())
        trace.append(information + beta * expected_kl)

        change = max(np.abs(new_encoder - encoder).sum(axis=1).max(),
                     np.abs(new_rho_phi - rho_phi).sum(),
                     np.abs(new_pi_phi - pi_phi).sum(axis=1).max())
        encoder, rho_phi, pi_phi = new_encoder, new_rho_phi, new_pi_phi
        if change <= delta_conv:
            converged = True
            break

    decoded = np.argmax(encoder, axis=1)
    decoded_mass = np.bincount(decoded, weights=rho, minlength=n_codes)
    phi, _, _ = _compact(decoded, decoded_mass, pi_phi)
    policy = Policy.stochastic(encoder.dot(pi_phi))
    return SibsResult(encoder, phi, policy, trace, rho, rho_phi, iteration, converged,
                      _used(decoded_mass, delta_min), beta)


def run_ac_dibs(mdp, beta, rounds=5, demonstrator=None, delta_conv=DEFAULT_CONVERGENCE,
                max_iters=1000, seed=0, delta_min=DEFAULT_DELTA_MIN):
    """Agent-controlled DIBS.

    The first round draws states from the demonstrator; every later round
    draws them from the grounded abstract policy of the previous round.
    Stops early once the state distribution no longer moves by more than
    `delta_conv`. Returns the list of per-round DibsResults."""
    if rounds < 1:
        raise ArgumentError("rounds must be at least 1")
    demonstrator = demonstrator if demonstrator is not None else default_demonstrator(mdp)
    rho = episode_distribution(mdp, demonstrator)
    results = []
    for number in range(rounds):
        result = run_dibs(mdp, demonstrator, beta, delta_conv, max_iters, seed, rho=rho,
                          delta_min=delta_min)
        results.append(result)
        grounded = lift_policy(result.phi, result.policy)
        following = episode_distribution(mdp, grounded)
        if np.abs(following - rho).sum() <= delta_conv:
            get_logger().debug("AC-DIBS settled after %d rounds", number + 1)
            break
        rho = following
    return results


def multitask_intersection(phis):
    """Two states share a block iff every abstraction puts them together."""
    phis = list(phis)
    if not phis:
        raise ArgumentError("need at least one abstraction")
    n_states = phis[0].n_states
    if any(phi.n_states != n_states for phi in phis):
        raise ArgumentError("abstractions cover different state spaces")
    return StateAbstraction.canonical(list(zip(*[phi.mapping.tolist() for phi in phis])))


def abstract_policy_value(mdp, phi, pi_phi):
    """Start value of the grounded abstract policy."""
    return start_value(mdp, evaluate_policy_exact(mdp, lift_policy(phi, pi_phi)))


DibAudit = namedtuple('DibAudit', [
    'used_codes', 'alphabet_bound', 'alphabet_holds', 'entropy', 'distortion',
    'value_gap', 'value_bound', 'value_holds', 'vacuous',
])


def dib_bound_audit(mdp, demonstrator, phi, pi_phi, rho, delta_min=DEFAULT_DELTA_MIN,
                    strict=False):
    """Checks the compression and value sides of the DIB guarantee.

    Compression: codes with mass >= delta_min number at most
    H / (delta_min log2(1 / delta_min)), and at least one when a single
    code carries all the mass. Value: E_rho[V^pi_E - V^pi_phi] is at most
    sqrt(2 k) VMax with k the expected KL in nats; the value side is
    vacuous once k >= 1/2. With `strict` a failed side raises
    BoundViolationError."""
    if not 0.0 < delta_min < 1.0:
        raise ArgumentError("delta_min must lie in (0, 1)")
    pi_e = as_policy(demonstrator, mdp.n_actions).probabilities
    pi_phi = as_policy(pi_phi).probabilities
    rho = _check_distribution(rho, 'rho')
    mass = np.bincount(phi.mapping, weights=rho, minlength=phi.n_abstract)

    used = _used(mass, delta_min)
    h = entropy(mass / mass.sum())
    alphabet_bound = max(1.0, h / (delta_min * math.log2(1.0 / delta_min)))
    alphabet_holds = used <= alphabet_bound + 1e-9

    with np.errstate(divide='ignore'):
        per_state = rel_entr(pi_e, pi_phi[phi.mapping]).sum(axis=1)
    k_nats = float(rho.dot(per_state))
    grounded = lift_policy(phi, Policy.stochastic(pi_phi))
    gap = float(rho.dot(evaluate_policy_exact(mdp, pi_e) - evaluate_policy_exact(mdp, grounded)))
    value_bound = math.sqrt(2.0 * k_nats) * mdp.v_max
    value_holds = gap <= value_bound + 1e-9

    audit = DibAudit(used, alphabet_bound, alphabet_holds, h, k_nats / LOG2, gap, value_bound,
                     value_holds, k_nats >= 0.5)
    if strict and not (alphabet_holds and value_holds):
        raise BoundViolationError("DIB audit failed: %r" % (audit,),
                                  measured=(used, gap), bound=(alphabet_bound, value_bound))
    return audit


StationaryAudit = namedtuple('StationaryAudit',
                             ['policy_gap', 'distribution_gap', 'bound', 'holds'])


def stationary_distance_audit(mdp, pi1, pi2):
    """Policies within L1 distance D of each other in every state induce
    state distributions within D gamma / (1 - gamma) of each other."""
    first = as_policy(pi1, mdp.n_actions)
    second = as_policy(pi2, mdp.n_actions)
    policy_gap = float(np.abs(first.probabilities - second.probabilities).sum(axis=1).max())
    distribution_gap = float(np.abs(stationary_distribution(mdp, first)
                                    - stationary_distribution(mdp, second)).sum())
    bound = policy_gap * mdp.gamma / (1.0 - mdp.gamma)
    return StationaryAudit(policy_gap, distribution_gap, bound, distribution_gap <= bound + 1e-8)


def beta_sweep(mdp, demonstrator, betas, seeds=(0,), delta_min=DEFAULT_DELTA_MIN,
               delta_conv=DEFAULT_CONVERGENCE, max_iters=1000, starts=None):
    """One rate-distortion row per (beta, seed)."""
    rho = episode_distribution(mdp, demonstrator, starts)
    rows = []
    for beta in betas:
        for seed in seeds:
            result = run_dibs(mdp, demonstrator, beta, delta_conv, max_iters, seed, rho=rho,
                              delta_min=delta_min)
            rows.append({
                "beta": beta,
                "seed": seed,
                "used_codes": result.used_codes,
                "entropy_bits": result.entropy,
                "expected_kl": result.distortion,
                "policy_value": abstract_policy_value(mdp, result.phi, result.policy),
            })
    return rows
