# -*- coding: utf-8 -*-
import numpy as np

from ..errors import ArgumentError, NoSuchExtensionError
from ..extensions import Extension, describe_extensions, extension_names, get_extension
from ..seeding import make_rng

__all__ = [
    'AGENT', 'AgentParams', 'LearningRecord', 'Agent', 'select_epsilon_greedy',
    'get_agent', 'agent_names', 'describe_agents', 'Q_INIT_MODES',
]

AGENT = 'agent'

Q_INIT_MODES = ('zero', 'optimistic')


class AgentParams(object):
    """Hyperparameters shared by the tabular learners.

    `m` is the known-ness count of R-Max and the batch size of Delayed-Q;
    `epsilon1` is the Delayed-Q success threshold."""

    fields = ('alpha', 'epsilon', 'q_init', 'm', 'episodes', 'horizon', 'seed', 'epsilon1')

    def __init__(self, alpha=0.1, epsilon=0.1, q_init='zero', m=5, episodes=100,
                 horizon=100, seed=0, epsilon1=0.01):
        if not 0.0 <= alpha <= 1.0:
            raise ArgumentError("alpha must lie in [0, 1], got %r" % alpha)
        if not 0.0 <= epsilon <= 1.0:
            raise ArgumentError("epsilon must lie in [0, 1], got %r" % epsilon)
        if q_init not in Q_INIT_MODES:
            raise ArgumentError("q_init must be one of %s" % ', '.join(Q_INIT_MODES))
        if m < 1:
            raise ArgumentError("m must be at least 1")
        if episodes < 1 or horizon < 1:
            raise ArgumentError("episodes and horizon must be positive")
        if epsilon1 <= 0:
            raise ArgumentError("epsilon1 must be positive")
        self.alpha = float(alpha)
        self.epsilon = float(epsilon)
        self.q_init = q_init
        self.m = int(m)
        self.episodes = int(episodes)
        self.horizon = int(horizon)
        self.seed = int(seed)
        self.epsilon1 = float(epsilon1)

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - set(cls.fields)
        if unknown:
            raise ArgumentError("unknown agent parameters: %s" % ', '.join(sorted(unknown)))
        return cls(**data)

    def to_dict(self):
        return dict((name, getattr(self, name)) for name in self.fields)

    def replace(self, **changes):
        values = self.to_dict()
        values.update(changes)
        return AgentParams(**values)

    def __eq__(self, other):
        return isinstance(other, AgentParams) and other.to_dict() == self.to_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "AgentParams(%s)" % ', '.join('%s=%r' % (name, getattr(self, name))
                                             for name in self.fields)


class LearningRecord(object):
    """Per-episode reward and length of one learning run."""

    columns = ('episode', 'cumulative_reward', 'steps', 'seed', 'agent', 'env')

    def __init__(self, agent, env, seed, rewards, steps, params=None):
        rewards = [float(reward) for reward in rewards]
        if len(rewards) != len(steps):
            raise ArgumentError("one step count per episode is required")
        if not np.all(np.isfinite(rewards)):
            raise ArgumentError("episode rewards must be finite")
        self.agent = agent
        self.env = env
        self.seed = seed
        self.rewards = rewards
        self.steps = [int(step) for step in steps]
        self.params = dict(params or {})

    @property
    def episodes(self):
        return len(self.rewards)

    @property
    def total_reward(self):
        return float(sum(self.rewards))

    @property
    def total_steps(self):
        return sum(self.steps)

    def cumulative(self):
        """Running total of reward over episodes."""
        return np.cumsum(self.rewards)

    def rows(self):
        for episode, (total, steps) in enumerate(zip(self.cumulative(), self.steps)):
            yield (episode, float(total), steps, self.seed, self.agent, self.env)

    def to_dict(self):
        return {"agent": self.agent, "env": self.env, "seed": self.seed,
                "rewards": self.rewards, "steps": self.steps, "params": self.params}

    @classmethod
    def from_dict(cls, data):
        return cls(data["agent"], data["env"], data["seed"], data["rewards"], data["steps"],
                   data.get("params"))

    def __eq__(self, other):
        return isinstance(other, LearningRecord) and other.to_dict() == self.to_dict()

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        return "<LearningRecord %s on %s seed=%s episodes=%d total=%g>" % (
            self.agent, self.env, self.seed, self.episodes, self.total_reward)


def select_epsilon_greedy(q, s, epsilon, rng):
    """Greedy action of row `s` (lowest index on ties) with probability
    1 - epsilon, otherwise one of the other actions uniformly. A single
    action is always returned as is."""
    if not 0.0 <= epsilon <= 1.0:
        raise ArgumentError("epsilon must lie in [0, 1]")
    row = q[s]
    greedy = int(np.argmax(row))
    n_actions = len(row)
    if n_actions == 1 or epsilon == 0.0:
        return greedy
    if rng.random() < epsilon:
        action = int(rng.integers(n_actions - 1))
        return action + 1 if action >= greedy else action
    return greedy


class Agent(Extension):
    """An online learner over `n_states` x `n_actions`.

    The episode runner calls `act`, then `observe` with the outcome, and
    `end_episode` when an episode stops."""

    def __init__(self, n_states, n_actions, gamma, r_max, params, rng=None):
        self.n_states = n_states
        self.n_actions = n_actions
        self.gamma = gamma
        self.r_max = max(float(r_max), 0.0)
        self.params = params
        self.rng = make_rng(rng)

    @property
    def v_max(self):
        return self.r_max / (1.0 - self.gamma)

    def act(self, s):
        raise NotImplementedError

    def observe(self, s, a, reward, s_next, terminal):
        pass

    def end_episode(self):
        pass

    def values(self):
        """Current action-value estimates, when the learner keeps them."""
        return None


def get_agent(kind):
    try:
        return get_extension(AGENT, kind)
    except NoSuchExtensionError:
        raise ArgumentError("unknown agent '%s' (known: %s)"
                            % (kind, ', '.join(agent_names())))


def agent_names():
    return extension_names(AGENT)


def describe_agents():
    return describe_extensions(AGENT)
