# -*- coding: utf-8 -*-
"""Option models.

The multi-time model (MTM) discounts every termination by its own
duration; the expected-length model (ELM) replaces the duration
distribution by its mean. Rewards follow the MDP convention of paying the
first step undiscounted, so for an option lasting exactly k steps the MTM
kernel is gamma^k and a reward collected on the last step is worth
gamma^(k - 1)."""
import csv
import io
import math
from collections import namedtuple

import networkx as nx
import numpy as np

from ..errors import ArgumentError, ConvergenceError
from ..logging import get_logger
from ..mdp import policy_model
from ..seeding import make_rng

__all__ = [
    'MtmModel', 'ElmModel', 'compute_mtm', 'compute_elm_exact',
    'estimate_elm_monte_carlo', 'elm_value_bound', 'ElmBound', 'mtm_horizon_cap',
    'models_to_csv', 'MTM_TOLERANCE', 'ROLLOUT_HORIZON',
]

MTM_TOLERANCE = 1e-10
ROLLOUT_HORIZON = 10000
# undiscounted mass still running when the MTM horizon is reached
CAP_FLAG_MASS = 1e-6


MtmModel = namedtuple('MtmModel', [
    'option', 'initiation', 'transition', 'reward', 'horizon', 'capped',
    'residual', 'durations',
])
MtmModel.__doc__ = """Discounted termination kernel and reward of an option.

`transition[s, s']` = sum_k gamma^k P(stop at s' after k steps | s) and
`reward[s]` the discounted reward collected on the way, both zero outside
the initiation set. `durations[k - 1, s]` is the probability of stopping
after exactly k steps when requested."""


class ElmModel(object):
    """Expected-length model of an option.

    `termination[s, s']` is the undiscounted stop distribution p(s'|s),
    `mu` and `variance` the moments of the duration. The kernel is
    gamma^mu p(s'|s); the reward is gamma^(mu - 1) times the expected
    undiscounted reward, or the within-option discounted reward when
    `discount_interior` is set."""

    def __init__(self, option, gamma, initiation, termination, mu, variance,
                 reward_sum, reward_discounted, discount_interior=False, capped=0,
                 rollouts=None):
        self.option = option
        self.gamma = gamma
        self.initiation = initiation
        self.termination = termination
        self.mu = mu
        self.variance = variance
        self.reward_sum = reward_sum
        self.reward_discounted = reward_discounted
        self.discount_interior = discount_interior
        self.capped = capped
        self.rollouts = rollouts

    @property
    def sigma(self):
        return np.sqrt(np.maximum(self.variance, 0.0))

    @property
    def scale(self):
        return np.where(self.initiation, self.gamma ** self.mu, 0.0)

    @property
    def transition(self):
        return self.scale[:, np.newaxis] * self.termination

    @property
    def reward(self):
        """Expected undiscounted reward sum credited at step mu, so scaled by
        gamma^(mu - 1); a one-step option (mu = 1) keeps its primitive's
        R(s, a). `discount_interior` uses the within-option discounted sum
        instead."""
        if self.discount_interior:
            return np.where(self.initiation, self.reward_discounted, 0.0)
        previous = np.where(self.initiation, self.gamma ** (self.mu - 1.0), 0.0)
        return previous * self.reward_sum

    def with_interior_discount(self, discount_interior=True):
        return ElmModel(self.option, self.gamma, self.initiation, self.termination, self.mu,
                        self.variance, self.reward_sum, self.reward_discounted,
                        discount_interior, self.capped, self.rollouts)


def mtm_horizon_cap(gamma, tolerance=MTM_TOLERANCE):
    if gamma <= 0.0:
        return 1
    return int(math.ceil(math.log(tolerance) / math.log(gamma)))


def _option_chain(mdp, option):
    """(continue, stop, r_pi, beta): one-step kernels of the option chain."""
    if option.n_states != mdp.n_states or option.n_actions != mdp.n_actions:
        raise ArgumentError("option '%s' does not fit %r" % (option.name, mdp))
    r_pi, t_pi = policy_model(mdp, option.policy)
    beta = option.effective_termination(mdp)
    return t_pi * (1.0 - beta)[np.newaxis, :], t_pi * beta[np.newaxis, :], r_pi, beta


def compute_mtm(mdp, option, tolerance=MTM_TOLERANCE, record_durations=False,
                record_kernels=False):
    """Multi-time model by forward dynamic programming from every
    initiation state at once.

    Stops once the discounted mass still running is below `tolerance`, or
    at ceil(ln tolerance / ln gamma) steps; `capped` reports whether the
    undiscounted running mass was still noticeable then. With
    `record_kernels` the per-step stop distributions are returned in place
    of the durations, as an array (k, S, S')."""
    proceed, stop, r_pi, _ = _option_chain(mdp, option)
    init = option.initiation_states()
    n = mdp.n_states
    gamma = mdp.gamma
    cap = mtm_horizon_cap(gamma, tolerance)

    alive = np.zeros((len(init), n))
    alive[np.arange(len(init)), init] = 1.0
    kernel = np.zeros((len(init), n))
    reward = np.zeros(len(init))
    durations = []
    discount = 1.0
    steps = 0
    while True:
        steps += 1
        reward += discount * alive.dot(r_pi)
        discount *= gamma
        stopped = alive.dot(stop)
        kernel += discount * stopped
        if record_kernels:
            durations.append(stopped)
        elif record_durations:
            durations.append(stopped.sum(axis=1))
        alive = alive.dot(proceed)
        running = alive.sum(axis=1).max() if len(init) else 0.0
        if discount * running < tolerance or steps >= cap:
            break

    capped = bool(steps >= cap and running > CAP_FLAG_MASS)
    if capped:
        get_logger().warning("option '%s' still running with mass %g after %d steps",
                             option.name, running, steps)

    transition = np.zeros((n, n))
    transition[init] = kernel
    full_reward = np.zeros(n)
    full_reward[init] = reward
    recorded = None
    if record_kernels:
        recorded = np.zeros((len(durations), n, n))
        recorded[:, init] = np.array(durations)
    elif record_durations:
        recorded = np.zeros((len(durations), n))
        recorded[:, init] = np.array(durations)
    return MtmModel(option, option.initiation.copy(), transition, full_reward, steps,
                    capped, float(discount * running), recorded)


def _recurrent_classes(proceed, stop, states):
    """Closed classes of the continuation chain that never stop."""
    graph = nx.DiGraph()
    graph.add_nodes_from(states)
    sub = proceed[np.ix_(states, states)]
    for i, j in zip(*np.nonzero(sub > 0)):
        graph.add_edge(states[i], states[j])
    classes = []
    for component in nx.attracting_components(graph):
        members = sorted(component)
        if stop[members].sum() <= 0.0 and proceed[np.ix_(members, members)].sum() > 0:
            classes.append(members)
    return classes


def compute_elm_exact(mdp, option, discount_interior=False):
    """Expected-length model from the absorbing-chain fundamental matrix.

    With Q the continue kernel and B the stop kernel, N = (I - Q)^-1 gives
    p = N B, E[K] = N 1 and E[K^2] = (2 Q N^2 + N) 1."""
    proceed, stop, r_pi, _ = _option_chain(mdp, option)
    init = option.initiation_states()
    n = mdp.n_states

    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    for i, j in zip(*np.nonzero(proceed > 0)):
        graph.add_edge(int(i), int(j))
    reachable = set(int(s) for s in init)
    for s in init:
        reachable.update(nx.descendants(graph, int(s)))
    states = sorted(reachable)

    recurrent = _recurrent_classes(proceed, stop, states)
    if recurrent:
        raise ConvergenceError("option '%s' never terminates from states %s"
                               % (option.name, ', '.join(str(mdp.label(s)) for s in recurrent[0])))

    local = dict((s, i) for i, s in enumerate(states))
    q = proceed[np.ix_(states, states)]
    b = stop[states]
    r = r_pi[states]
    identity = np.eye(len(states))
    fundamental = np.linalg.solve(identity - q, identity)
    ones = np.ones(len(states))

    absorbed = fundamental.dot(b)
    mu = fundamental.dot(ones)
    second = (2.0 * q.dot(fundamental).dot(fundamental) + fundamental).dot(ones)
    reward_sum = fundamental.dot(r)
    reward_discounted = np.linalg.solve(identity - mdp.gamma * q, r)

    rows = [local[int(s)] for s in init]
    termination = np.zeros((n, n))
    termination[init] = absorbed[rows]
    mu = _scatter(n, init, mu[rows])
    return ElmModel(option, mdp.gamma, option.initiation.copy(), termination,
                    mu, _scatter(n, init, second[rows]) - mu ** 2,
                    _scatter(n, init, reward_sum[rows]),
                    _scatter(n, init, reward_discounted[rows]), discount_interior)


def _scatter(n, init, values):
    result = np.zeros(n)
    result[init] = values
    return result


def estimate_elm_monte_carlo(mdp, option, n_rollouts, seed=0, horizon=ROLLOUT_HORIZON,
                             discount_interior=False):
    """Maximum-likelihood ELM from `n_rollouts` simulated executions per
    initiation state. Rollouts reaching `horizon` steps are dropped and
    counted in `capped`."""
    if n_rollouts < 1:
        raise ArgumentError("n_rollouts must be at least 1")
    rng = make_rng(seed)
    beta = option.effective_termination(mdp)
    policy_cumulative = np.cumsum(option.policy.probabilities, axis=1)
    transition_cumulative = np.cumsum(mdp.transition, axis=2)
    init = option.initiation_states()
    n = mdp.n_states

    termination = np.zeros((n, n))
    mu = np.zeros(n)
    variance = np.zeros(n)
    reward_sum = np.zeros(n)
    reward_discounted = np.zeros(n)
    capped_total = 0

    for s0 in init:
        state = np.full(n_rollouts, s0, dtype=int)
        running = np.ones(n_rollouts, dtype=bool)
        length = np.zeros(n_rollouts, dtype=int)
        collected = np.zeros(n_rollouts)
        discounted = np.zeros(n_rollouts)
        discount = 1.0
        for _ in range(horizon):
            active = np.flatnonzero(running)
            if not len(active):
                break
            current = state[active]
            draws = rng.random(len(active))[:, np.newaxis]
            actions = (policy_cumulative[current] < draws).sum(axis=1)
            actions = np.minimum(actions, mdp.n_actions - 1)
            draws = rng.random(len(active))[:, np.newaxis]
            following = (transition_cumulative[current, actions] < draws).sum(axis=1)
            following = np.minimum(following, n - 1)
            rewards = mdp.reward[current, actions, following]
            collected[active] += rewards
            discounted[active] += discount * rewards
            length[active] += 1
            state[active] = following
            stops = rng.random(len(active)) < beta[following]
            running[active[stops]] = False
            discount *= mdp.gamma

        finished = ~running
        capped_total += int(running.sum())
        if not finished.any():
            raise ConvergenceError("every rollout of option '%s' from state %s hit the %d-step cap"
                                   % (option.name, mdp.label(s0), horizon))
        lengths = length[finished].astype(float)
        mu[s0] = lengths.mean()
        variance[s0] = lengths.var()
        termination[s0] = np.bincount(state[finished], minlength=n) / float(finished.sum())
        reward_sum[s0] = collected[finished].mean()
        reward_discounted[s0] = discounted[finished].mean()

    if capped_total:
        get_logger().warning("%d rollouts of option '%s' were capped", capped_total, option.name)
    return ElmModel(option, mdp.gamma, option.initiation.copy(), termination, mu, variance,
                    reward_sum, reward_discounted, discount_interior, capped_total, n_rollouts)


ElmBound = namedtuple('ElmBound', ['bound', 'failure_probability', 'epsilon', 'vacuous'])


def elm_value_bound(mu_k, sigma, gamma, beta_min, tau, r_max=1.0):
    """High-probability bound on |V_gamma - V_mu| for goal-based MDPs.

    eps = gamma^(mu - tau) (2 tau + 1) e^-beta_min and the bound holds with
    probability 1 - sigma^2 / tau^2. A bound at or above VMax is flagged
    vacuous."""
    if tau <= 1:
        raise ArgumentError("tau must exceed 1")
    if not 0.0 < beta_min <= 1.0:
        raise ArgumentError("beta_min must lie in (0, 1]")
    epsilon = gamma ** (mu_k - tau) * (2.0 * tau + 1.0) * math.exp(-beta_min)
    g = gamma ** mu_k
    bound = ((epsilon * (1.0 - g) + g * epsilon / 2.0 * r_max)
             / ((1.0 - g) * (1.0 - g + epsilon / 2.0 * g)))
    v_max = r_max / (1.0 - gamma)
    return ElmBound(bound, min(1.0, sigma ** 2 / tau ** 2), epsilon,
                    bool(bound >= v_max or epsilon >= 1.0))


def models_to_csv(mdp, models):
    """One row per (option, initiation state, successor) with non-zero mass."""
    output = io.StringIO()
    writer = csv.writer(output, lineterminator='\n')
    writer.writerow(['option', 'state', 'next_state', 'kind', 'transition', 'reward',
                     'mu', 'variance'])
    for model in models:
        kind = 'mtm' if isinstance(model, MtmModel) else 'elm'
        for s in np.flatnonzero(model.initiation):
            for s_next in np.flatnonzero(model.transition[s] > 0):
                writer.writerow([
                    model.option.name, mdp.label(s), mdp.label(s_next), kind,
                    repr(float(model.transition[s, s_next])), repr(float(model.reward[s])),
                    '' if kind == 'mtm' else repr(float(model.mu[s])),
                    '' if kind == 'mtm' else repr(float(model.variance[s])),
                ])
    return output.getvalue()
