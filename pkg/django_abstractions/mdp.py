# -*- coding: utf-8 -*-
"""Finite MDPs, exact planning and value-loss measurement.

Every other module consumes the objects defined here. MDPs are dense
numpy tensors indexed ``(s, a, s')`` and are read-only once built, so they
can be shared between worker processes."""
import json
from collections import namedtuple

import numpy as np

from .errors import ArgumentError, ConvergenceError, ModelError
from .logging import get_logger

__all__ = [
    'FiniteMdp', 'Policy', 'MdpSolution', 'as_policy',
    'DEFAULT_DELTA', 'DEFAULT_MAX_ITERATIONS',
    'q_from_v', 'bellman_iterates', 'value_iteration', 'policy_model',
    'evaluate_policy', 'evaluate_policy_exact', 'greedy_policy',
    'solve_mdp', 'value_loss_of_policy', 'epsilon_soft_policy',
    'start_value',
]

DEFAULT_DELTA = 1e-6
DEFAULT_MAX_ITERATIONS = 100000
STOCHASTIC_TOLERANCE = 1e-9


def _frozen(array):
    array.setflags(write=False)
    return array


def _terminal_mask(terminal, n_states):
    mask = np.zeros(n_states, dtype=bool)
    if terminal is None:
        return mask
    terminal = np.asarray(terminal)
    if terminal.dtype == bool:
        if terminal.shape != (n_states,):
            raise ModelError("terminal mask must have one entry per state")
        mask[:] = terminal
    else:
        mask[terminal.astype(int)] = True
    return mask


class FiniteMdp(object):
    """Tabular MDP with rewards stored in the general R(s, a, s') form.

    Terminal states are rewritten into absorbing zero-reward self-loops;
    the episode runners decide when an episode ends."""

    def __init__(self, transition, reward, gamma, start_dist=None,
                 terminal=None, name=None, state_labels=None):
        transition = np.array(transition, dtype=float)
        reward = np.array(reward, dtype=float)

        if transition.ndim != 3 or transition.shape[0] != transition.shape[2]:
            raise ModelError("transition must be a (S, A, S) tensor, got shape %s"
                             % (transition.shape,))
        n_states, n_actions = transition.shape[:2]
        if n_states < 1 or n_actions < 1:
            raise ModelError("an MDP needs at least one state and one action")
        if reward.shape != transition.shape:
            raise ModelError("reward shape %s does not match transition shape %s"
                             % (reward.shape, transition.shape))
        if not 0.0 <= gamma < 1.0:
            raise ModelError("gamma must lie in [0, 1), got %r" % gamma)
        if np.any(transition < 0.0):
            raise ModelError("transition probabilities must be nonnegative")

        mask = _terminal_mask(terminal, n_states)
        for s in np.flatnonzero(mask):
            transition[s] = 0.0
            transition[s, :, s] = 1.0
            reward[s] = 0.0

        sums = transition.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > STOCHASTIC_TOLERANCE)
        if len(bad):
            s, a = bad[0]
            raise ModelError("transition row (s=%d, a=%d) sums to %r"
                             % (s, a, sums[s, a]))
        if not np.all(np.isfinite(reward)):
            raise ModelError("rewards must be finite")

        if start_dist is None:
            start_dist = np.zeros(n_states)
            start_dist[0] = 1.0
        start_dist = np.array(start_dist, dtype=float)
        if start_dist.shape != (n_states,) or np.any(start_dist < 0):
            raise ModelError("start_dist must be a nonnegative vector over states")
        if abs(start_dist.sum() - 1.0) > STOCHASTIC_TOLERANCE:
            raise ModelError("start_dist sums to %r" % start_dist.sum())

        self.n_states = n_states
        self.n_actions = n_actions
        self.gamma = float(gamma)
        self.transition = _frozen(transition)
        self.reward = _frozen(reward)
        self.start_dist = _frozen(start_dist)
        self.terminal = _frozen(mask)
        self.name = name
        self.state_labels = list(state_labels) if state_labels is not None else None

        self.expected_reward = _frozen((transition * reward).sum(axis=2))
        self._cumulative = np.cumsum(transition, axis=2)
        self._start_cumulative = np.cumsum(start_dist)

    @classmethod
    def from_state_action_rewards(cls, transition, reward, gamma, **kwargs):
        """Builds an MDP from R(s, a)."""
        transition = np.asarray(transition, dtype=float)
        reward = np.asarray(reward, dtype=float)
        full = np.repeat(reward[:, :, np.newaxis], transition.shape[2], axis=2)
        return cls(transition, full, gamma, **kwargs)

    @classmethod
    def from_state_rewards(cls, transition, reward, gamma, **kwargs):
        """Builds an MDP from R(s), paid when acting in s."""
        transition = np.asarray(transition, dtype=float)
        reward = np.asarray(reward, dtype=float)
        full = np.broadcast_to(reward[:, np.newaxis, np.newaxis], transition.shape)
        return cls(transition, full, gamma, **kwargs)

    def with_reward(self, reward, terminal=None, name=None):
        """Same dynamics and start distribution, new reward (and terminal set)."""
        return FiniteMdp(
            self.transition, reward, self.gamma,
            start_dist=self.start_dist,
            terminal=self.terminal if terminal is None else terminal,
            name=name or self.name,
            state_labels=self.state_labels,
        )

    @property
    def r_max(self):
        return float(self.reward[self.transition > 0].max())

    @property
    def r_min(self):
        return float(self.reward[self.transition > 0].min())

    @property
    def v_max(self):
        """Upper bound RMax/(1 - gamma); terminal sinks pay 0 so RMax is at least 0."""
        return max(self.r_max, 0.0) / (1.0 - self.gamma)

    @property
    def v_min(self):
        return min(self.r_min, 0.0) / (1.0 - self.gamma)

    def label(self, s):
        if self.state_labels is not None:
            return self.state_labels[s]
        return s

    def sample_start(self, rng):
        index = np.searchsorted(self._start_cumulative, rng.random(), side='right')
        return int(min(index, self.n_states - 1))

    def step(self, s, a, rng):
        """Samples (s', r) from the model."""
        index = np.searchsorted(self._cumulative[s, a], rng.random(), side='right')
        s_next = int(min(index, self.n_states - 1))
        return s_next, float(self.reward[s, a, s_next])

    def successors(self, s, a):
        return np.flatnonzero(self.transition[s, a] > 0)

    def to_dict(self):
        result = {
            "n_states": self.n_states,
            "n_actions": self.n_actions,
            "gamma": self.gamma,
            "transition": self.transition.tolist(),
            "reward": self.reward.tolist(),
            "start_dist": self.start_dist.tolist(),
            "terminal": np.flatnonzero(self.terminal).tolist(),
        }
        if self.name:
            result["name"] = self.name
        if self.state_labels is not None:
            result["state_labels"] = [
                list(label) if isinstance(label, tuple) else label
                for label in self.state_labels
            ]
        return result

    @classmethod
    def from_dict(cls, data):
        try:
            transition = np.array(data["transition"], dtype=float)
            if transition.shape[:2] != (data["n_states"], data["n_actions"]):
                raise ModelError("declared sizes do not match the transition tensor")
            labels = data.get("state_labels")
            if labels is not None:
                labels = [tuple(label) if isinstance(label, list) else label
                          for label in labels]
            return cls(
                transition, data["reward"], data["gamma"],
                start_dist=data.get("start_dist"),
                terminal=np.array(data.get("terminal", []), dtype=int),
                name=data.get("name"),
                state_labels=labels,
            )
        except KeyError as e:
            raise ModelError("MDP document is missing key %s" % e)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return "<FiniteMdp %s |S|=%d |A|=%d gamma=%r>" % (
            self.name or '', self.n_states, self.n_actions, self.gamma)


class Policy(object):
    """A Markov policy stored as an (S, A) probability table. Deterministic
    policies additionally keep their action vector."""

    def __init__(self, probabilities, actions=None):
        probabilities = np.array(probabilities, dtype=float)
        if probabilities.ndim != 2:
            raise ModelError("policy table must be (S, A)")
        if np.any(probabilities < 0) or np.any(
                np.abs(probabilities.sum(axis=1) - 1.0) > STOCHASTIC_TOLERANCE):
            raise ModelError("policy rows must be probability vectors")
        self.probabilities = _frozen(probabilities)
        self.actions = _frozen(np.array(actions, dtype=int)) if actions is not None else None
        self._cumulative = np.cumsum(probabilities, axis=1)

    @classmethod
    def deterministic(cls, actions, n_actions):
        actions = np.asarray(actions, dtype=int)
        if np.any(actions < 0) or np.any(actions >= n_actions):
            raise ModelError("action index out of range")
        table = np.zeros((len(actions), n_actions))
        table[np.arange(len(actions)), actions] = 1.0
        return cls(table, actions=actions)

    @classmethod
    def stochastic(cls, probabilities):
        return cls(probabilities)

    @classmethod
    def uniform(cls, n_states, n_actions):
        return cls(np.full((n_states, n_actions), 1.0 / n_actions))

    @property
    def is_deterministic(self):
        return self.actions is not None

    @property
    def n_states(self):
        return self.probabilities.shape[0]

    @property
    def n_actions(self):
        return self.probabilities.shape[1]

    def act(self, s, rng):
        if self.actions is not None:
            return int(self.actions[s])
        index = np.searchsorted(self._cumulative[s], rng.random(), side='right')
        return int(min(index, self.n_actions - 1))

    def __getitem__(self, s):
        if self.actions is not None:
            return int(self.actions[s])
        return self.probabilities[s]

    def __eq__(self, other):
        if not isinstance(other, Policy):
            return NotImplemented
        return np.array_equal(self.probabilities, other.probabilities)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __repr__(self):
        kind = 'deterministic' if self.is_deterministic else 'stochastic'
        return "<Policy %s |S|=%d |A|=%d>" % (kind, self.n_states, self.n_actions)


def as_policy(policy, n_actions=None):
    """Accepts a Policy, an action vector or an (S, A) table."""
    if isinstance(policy, Policy):
        return policy
    array = np.asarray(policy)
    if array.ndim == 1:
        if n_actions is None:
            raise ArgumentError("n_actions is required for an action vector")
        return Policy.deterministic(array, n_actions)
    return Policy.stochastic(array)


MdpSolution = namedtuple('MdpSolution', ['mdp', 'v', 'q', 'policy', 'iterations'])


def q_from_v(mdp, v):
    """Q(s, a) = sum_s' T(s'|s, a) [R(s, a, s') + gamma v(s')]."""
    v = np.asarray(v, dtype=float)
    return mdp.expected_reward + mdp.gamma * mdp.transition.dot(v)


def bellman_iterates(mdp, v0=None):
    """Yields successive value-iteration sweeps V_1, V_2, ... forever."""
    v = np.zeros(mdp.n_states) if v0 is None else np.array(v0, dtype=float)
    while True:
        v = q_from_v(mdp, v).max(axis=1)
        yield v


def value_iteration(mdp, delta=DEFAULT_DELTA, v0=None,
                    max_iterations=DEFAULT_MAX_ITERATIONS):
    """Returns (V, iterations) where the last sweep moved no entry by more
    than `delta`."""
    if delta <= 0:
        raise ArgumentError("delta must be positive")

    v = np.zeros(mdp.n_states) if v0 is None else np.array(v0, dtype=float)
    residual = np.inf
    for iteration in range(1, max_iterations + 1):
        v_next = q_from_v(mdp, v).max(axis=1)
        residual = np.abs(v_next - v).max()
        v = v_next
        if residual <= delta:
            get_logger().debug("value iteration on %r converged after %d sweeps",
                               mdp, iteration)
            return v, iteration

    raise ConvergenceError(
        "value iteration did not converge in %d sweeps (residual %g)"
        % (max_iterations, residual),
        iterations=max_iterations, residual=residual,
    )


def policy_model(mdp, policy):
    """Returns (R_pi, T_pi), the one-step reward vector and state kernel."""
    probabilities = as_policy(policy, mdp.n_actions).probabilities
    if probabilities.shape != (mdp.n_states, mdp.n_actions):
        raise ArgumentError("policy shape %s does not fit %r"
                            % (probabilities.shape, mdp))
    r_pi = (probabilities * mdp.expected_reward).sum(axis=1)
    t_pi = np.einsum('sa,sat->st', probabilities, mdp.transition)
    return r_pi, t_pi


def evaluate_policy(mdp, policy, delta=DEFAULT_DELTA,
                    max_iterations=DEFAULT_MAX_ITERATIONS):
    """Iterates the policy Bellman operator until a sweep moves less than delta."""
    if delta <= 0:
        raise ArgumentError("delta must be positive")
    r_pi, t_pi = policy_model(mdp, policy)
    v = np.zeros(mdp.n_states)
    for iteration in range(1, max_iterations + 1):
        v_next = r_pi + mdp.gamma * t_pi.dot(v)
        residual = np.abs(v_next - v).max()
        v = v_next
        if residual <= delta:
            return v
    raise ConvergenceError("policy evaluation did not converge",
                           iterations=max_iterations, residual=residual)


def evaluate_policy_exact(mdp, policy):
    """Solves (I - gamma T_pi) V = R_pi."""
    r_pi, t_pi = policy_model(mdp, policy)
    return np.linalg.solve(np.eye(mdp.n_states) - mdp.gamma * t_pi, r_pi)


def greedy_policy(q):
    """Argmax per state; ties go to the lowest action index."""
    q = np.asarray(q, dtype=float)
    return Policy.deterministic(np.argmax(q, axis=1), q.shape[1])


def solve_mdp(mdp, delta=DEFAULT_DELTA, max_policy_iterations=1000):
    """Value iteration polished by policy iteration with exact evaluation.

    The returned V* is exact to linear-solver precision, which the bound
    audits rely on."""
    v, iterations = value_iteration(mdp, delta)
    actions = np.argmax(q_from_v(mdp, v), axis=1)

    for _ in range(max_policy_iterations):
        policy = Policy.deterministic(actions, mdp.n_actions)
        v = evaluate_policy_exact(mdp, policy)
        q = q_from_v(mdp, v)
        best = np.argmax(q, axis=1)
        current = q[np.arange(mdp.n_states), actions]
        scale = 1e-12 * max(1.0, np.abs(q).max())
        improve = q[np.arange(mdp.n_states), best] > current + scale
        if not improve.any():
            return MdpSolution(mdp, v, q, policy, iterations)
        actions = np.where(improve, best, actions)

    raise ConvergenceError("policy iteration did not stabilise")


def value_loss_of_policy(mdp, policy, solution=None):
    """max_s V*(s) - V^pi(s), clipped at 0."""
    solution = solution or solve_mdp(mdp)
    v_pi = evaluate_policy_exact(mdp, policy)
    return float(max(0.0, (solution.v - v_pi).max()))


def epsilon_soft_policy(policy, n_actions, epsilon):
    """Mixes a policy with the uniform one: every action keeps eps/|A| mass."""
    if not 0.0 <= epsilon <= 1.0:
        raise ArgumentError("epsilon must lie in [0, 1]")
    probabilities = as_policy(policy, n_actions).probabilities
    return Policy.stochastic((1.0 - epsilon) * probabilities + epsilon / n_actions)


def start_value(mdp, v):
    return float(mdp.start_dist.dot(v))
