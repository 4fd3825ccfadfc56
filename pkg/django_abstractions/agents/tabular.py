# -*- coding: utf-8 -*-
"""Q-learning, R-Max, Delayed Q-learning and a random baseline."""
import numpy as np

from ..extensions import register
from ..logging import get_logger
from ..mdp import FiniteMdp, q_from_v, value_iteration
from .base import AGENT, Agent, select_epsilon_greedy

__all__ = ['QLearningAgent', 'RMaxAgent', 'DelayedQAgent', 'RandomAgent']

PLANNING_DELTA = 1e-4
TIE_TOLERANCE = 1e-9


@register(AGENT)
class QLearningAgent(Agent):
    """Q-learning with epsilon-greedy exploration"""

    __extension_name__ = 'q_learning'
    __options__ = [
        {"name": "alpha", "type": "float", "default": 0.1, "description": "learning rate"},
        {"name": "epsilon", "type": "float", "default": 0.1,
         "description": "probability of a non-greedy action"},
        {"name": "q_init", "type": "string", "default": "zero",
         "description": "'zero' or 'optimistic' (VMax)"},
    ]

    def __init__(self, *args, **kwargs):
        super(QLearningAgent, self).__init__(*args, **kwargs)
        start = self.v_max if self.params.q_init == 'optimistic' else 0.0
        self.q = np.full((self.n_states, self.n_actions), start)

    def act(self, s):
        return select_epsilon_greedy(self.q, s, self.params.epsilon, self.rng)

    def observe(self, s, a, reward, s_next, terminal):
        following = 0.0 if terminal else self.q[s_next].max()
        alpha = self.params.alpha
        self.q[s, a] = (1.0 - alpha) * self.q[s, a] + alpha * (reward + self.gamma * following)

    def values(self):
        return self.q


@register(AGENT)
class RMaxAgent(Agent):
    """R-Max: plans in an optimistic model of the pairs tried fewer than m times

    Unknown pairs loop on themselves paying RMax, so they are worth VMax.
    Known pairs use the empirical model. The plan is recomputed each time
    a pair becomes known. Among equally valued actions the agent cycles
    round-robin starting from action 0."""

    __extension_name__ = 'rmax'
    __options__ = [
        {"name": "m", "type": "int", "default": 5,
         "description": "visits before a state-action pair is known"},
    ]

    def __init__(self, *args, **kwargs):
        super(RMaxAgent, self).__init__(*args, **kwargs)
        self.logger = get_logger()
        n, k = self.n_states, self.n_actions
        self.counts = np.zeros((n, k), dtype=int)
        self.transition_counts = np.zeros((n, k, n))
        self.reward_sums = np.zeros((n, k))
        self.terminal = np.zeros(n, dtype=bool)
        self.turn = np.zeros(n, dtype=int)
        self.plans = 0
        self.q = np.full((n, k), self.v_max)

    @property
    def known(self):
        return self.counts >= self.params.m

    def model(self):
        """The optimistic FiniteMdp the agent plans in."""
        n, k = self.n_states, self.n_actions
        known = self.known
        transition = np.zeros((n, k, n))
        reward = np.full((n, k), self.r_max)
        for s in range(n):
            transition[s, :, s] = 1.0
        counts = np.maximum(self.counts, 1)[:, :, np.newaxis]
        transition[known] = (self.transition_counts / counts)[known]
        reward[known] = (self.reward_sums / counts[:, :, 0])[known]
        return FiniteMdp.from_state_action_rewards(transition, reward, self.gamma,
                                                   terminal=self.terminal)

    def plan(self):
        model = self.model()
        v, _ = value_iteration(model, delta=PLANNING_DELTA * max(1.0, self.v_max))
        self.q = q_from_v(model, v)
        self.plans += 1

    def act(self, s):
        row = self.q[s]
        tied = np.flatnonzero(row >= row.max() - TIE_TOLERANCE * max(1.0, abs(row.max())))
        later = tied[tied >= self.turn[s]]
        action = int(later[0]) if len(later) else int(tied[0])
        self.turn[s] = (action + 1) % self.n_actions
        return action

    def observe(self, s, a, reward, s_next, terminal):
        replan = False
        if terminal and not self.terminal[s_next]:
            self.terminal[s_next] = True
            replan = True
        if self.counts[s, a] < self.params.m:
            self.counts[s, a] += 1
            self.transition_counts[s, a, s_next] += 1
            self.reward_sums[s, a] += reward
            if self.counts[s, a] == self.params.m:
                replan = True
        if replan:
            self.plan()

    def values(self):
        return self.q


@register(AGENT)
class DelayedQAgent(Agent):
    """Delayed Q-learning: optimistic values lowered by batched updates

    Every m observed targets of a pair are averaged; the value drops to
    the average plus epsilon1 only when that lowers it by at least
    2 epsilon1. A pair whose attempt fails stops learning until some other
    value changes."""

    __extension_name__ = 'delayed_q'
    __options__ = [
        {"name": "m", "type": "int", "default": 5, "description": "batch size of an attempt"},
        {"name": "epsilon1", "type": "float", "default": 0.01,
         "description": "required improvement of an attempted update"},
    ]

    def __init__(self, *args, **kwargs):
        super(DelayedQAgent, self).__init__(*args, **kwargs)
        n, k = self.n_states, self.n_actions
        self.q = np.full((n, k), self.v_max)
        self.accumulated = np.zeros((n, k))
        self.samples = np.zeros((n, k), dtype=int)
        self.attempted = np.zeros((n, k), dtype=int)
        self.learning = np.ones((n, k), dtype=bool)
        self.last_success = 0
        self.time = 0

    def act(self, s):
        return int(np.argmax(self.q[s]))

    def observe(self, s, a, reward, s_next, terminal):
        self.time += 1
        if self.learning[s, a]:
            following = 0.0 if terminal else self.q[s_next].max()
            self.accumulated[s, a] += reward + self.gamma * following
            self.samples[s, a] += 1
            if self.samples[s, a] == self.params.m:
                target = self.accumulated[s, a] / self.params.m
                epsilon1 = self.params.epsilon1
                if self.q[s, a] - target >= 2.0 * epsilon1:
                    self.q[s, a] = target + epsilon1
                    self.last_success = self.time
                elif self.attempted[s, a] >= self.last_success:
                    self.learning[s, a] = False
                self.attempted[s, a] = self.time
                self.accumulated[s, a] = 0.0
                self.samples[s, a] = 0
        elif self.attempted[s, a] < self.last_success:
            self.learning[s, a] = True

    def values(self):
        return self.q


@register(AGENT)
class RandomAgent(Agent):
    """Uniformly random actions"""

    __extension_name__ = 'random'

    def act(self, s):
        return int(self.rng.integers(self.n_actions))
