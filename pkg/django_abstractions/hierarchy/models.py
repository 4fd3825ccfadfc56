# -*- coding: utf-8 -*-
"""Discounted models of one level of an option hierarchy.

A level keeps a kernel with the discount already folded in, so that
option models (whose kernels carry gamma^k) and the ground one-step model
(gamma T) are handled alike. Relative options only run inside their
block, which makes their models a linear solve per block."""
import numpy as np

from ..abstraction.core import WeightingFunction
from ..errors import ArgumentError, ConvergenceError, ModelError
from ..mdp import DEFAULT_DELTA, DEFAULT_MAX_ITERATIONS, Policy, as_policy

__all__ = ['LevelModel', 'relative_option_model', 'abstract_level']


class LevelModel(object):
    """kernel[s, a, s'] is a discounted sub-stochastic kernel, reward[s, a]
    the expected discounted reward collected while `a` runs."""

    def __init__(self, kernel, reward, terminal=None, name=None):
        kernel = np.array(kernel, dtype=float)
        reward = np.array(reward, dtype=float)
        if kernel.ndim != 3 or kernel.shape[0] != kernel.shape[2]:
            raise ModelError("level kernel must be (S, A, S), got %s" % (kernel.shape,))
        if reward.shape != kernel.shape[:2]:
            raise ModelError("level reward must be (S, A)")
        if np.any(kernel < -1e-12) or np.any(kernel.sum(axis=2) > 1.0 + 1e-9):
            raise ModelError("level kernel rows must be sub-stochastic")
        if terminal is None:
            terminal = np.zeros(kernel.shape[0], dtype=bool)
        self.kernel = kernel
        self.reward = reward
        self.terminal = np.asarray(terminal, dtype=bool)
        self.name = name

    @classmethod
    def from_mdp(cls, mdp):
        return cls(mdp.gamma * mdp.transition, mdp.expected_reward, mdp.terminal,
                   name=mdp.name)

    @property
    def n_states(self):
        return self.kernel.shape[0]

    @property
    def n_actions(self):
        return self.kernel.shape[1]

    def policy_model(self, policy):
        probabilities = as_policy(policy, self.n_actions).probabilities
        if probabilities.shape != (self.n_states, self.n_actions):
            raise ArgumentError("policy shape %s does not fit the level"
                                % (probabilities.shape,))
        r_pi = (probabilities * self.reward).sum(axis=1)
        k_pi = np.einsum('sa,sat->st', probabilities, self.kernel)
        return r_pi, k_pi

    def evaluate(self, policy):
        r_pi, k_pi = self.policy_model(policy)
        return np.linalg.solve(np.eye(self.n_states) - k_pi, r_pi)

    def q_from_v(self, v):
        return self.reward + self.kernel.dot(v)

    def solve(self, delta=DEFAULT_DELTA, max_iterations=DEFAULT_MAX_ITERATIONS):
        """Value iteration polished by policy iteration. Returns (V, greedy
        Policy)."""
        v = np.zeros(self.n_states)
        residual = np.inf
        for _ in range(max_iterations):
            v_next = self.q_from_v(v).max(axis=1)
            residual = np.abs(v_next - v).max()
            v = v_next
            if residual <= delta:
                break
        else:
            raise ConvergenceError("level value iteration did not converge",
                                   iterations=max_iterations, residual=residual)

        states = np.arange(self.n_states)
        actions = np.argmax(self.q_from_v(v), axis=1)
        while True:
            policy = Policy.deterministic(actions, self.n_actions)
            v = self.evaluate(policy)
            q = self.q_from_v(v)
            best = np.argmax(q, axis=1)
            scale = 1e-12 * max(1.0, np.abs(q).max())
            improve = q[states, best] > q[states, actions] + scale
            if not improve.any():
                return v, policy
            actions = np.where(improve, best, actions)

    def __repr__(self):
        return "<LevelModel %s |S|=%d |A|=%d>" % (self.name or '', self.n_states,
                                                 self.n_actions)


def relative_option_model(level, option):
    """(R_o, T_o) over the level's states; rows outside the block are zero.

    T_o[s, s'] is the discounted probability of stopping in s'. Level
    terminal states stop the option."""
    if option.n_states != level.n_states or option.n_actions != level.n_actions:
        raise ArgumentError("option '%s' does not fit %r" % (option.name, level))
    r_pi, k_pi = level.policy_model(option.policy)
    beta = np.where(level.terminal, 1.0, option.termination)
    block = option.initiation_states()
    proceed = k_pi[np.ix_(block, block)] * (1.0 - beta[block])[np.newaxis, :]
    system = np.eye(len(block)) - proceed
    reward = np.zeros(level.n_states)
    transition = np.zeros((level.n_states, level.n_states))
    reward[block] = np.linalg.solve(system, r_pi[block])
    transition[block] = np.linalg.solve(system, k_pi[block] * beta[np.newaxis, :])
    return reward, transition


def abstract_level(level, pair, w=None):
    """The next level up: its states are the blocks of `pair.phi` and local
    choice j in block x runs `pair.action_option(x, j)`.

    R(x, j) = sum_{s in x} w(s) R_o(s) and
    K(x, j, x') = sum_{s in x} w(s) sum_{s' in x'} T_o(s, s')."""
    phi = pair.phi
    if phi.n_states != level.n_states:
        raise ArgumentError("abstraction covers %d states, the level has %d"
                            % (phi.n_states, level.n_states))
    weights = (w if isinstance(w, WeightingFunction) else
               WeightingFunction.uniform(phi) if w is None else WeightingFunction(phi, w))
    membership = phi.membership()
    models = [relative_option_model(level, option) for option in pair.options]

    n_actions = pair.branching
    kernel = np.zeros((phi.n_abstract, n_actions, phi.n_abstract))
    reward = np.zeros((phi.n_abstract, n_actions))
    for x in range(phi.n_abstract):
        block = np.flatnonzero(phi.mapping == x)
        w_block = weights.weights[block]
        for j in range(n_actions):
            r_o, t_o = models[pair.action_option(x, j)]
            reward[x, j] = w_block.dot(r_o[block])
            kernel[x, j] = w_block.dot(t_o[block]).dot(membership)
    terminal = np.array([bool(level.terminal[block].all()) for block in phi.blocks()])
    return LevelModel(kernel, reward, terminal, name='%s/phi' % (level.name or 'level'))
