# -*- coding: utf-8 -*-
"""Episode loops, the state-abstraction wrapper and lifelong runs."""
import csv

from ..errors import ArgumentError
from ..logging import get_logger
from ..seeding import derive_rng, derive_seed
from .base import AgentParams, LearningRecord, get_agent

__all__ = [
    'AbstractedAgent', 'make_agent', 'wrap_with_state_abstraction', 'run_episodes',
    'run_agent', 'run_q_learning', 'run_rmax', 'run_delayed_q', 'run_random_agent',
    'run_lifelong', 'records_to_csv',
]

ENV_STREAM = 0
AGENT_STREAM = 1


class AbstractedAgent(object):
    """Feeds an agent phi(s) instead of s.

    The inner agent learns over the abstract states; the environment still
    steps in ground states."""

    def __init__(self, agent, phi):
        if agent.n_states != phi.n_abstract:
            raise ArgumentError("agent covers %d states but phi has %d abstract states"
                                % (agent.n_states, phi.n_abstract))
        self.agent = agent
        self.phi = phi

    @property
    def name(self):
        return '%s+phi' % self.agent.__extension_name__

    def act(self, s):
        return self.agent.act(self.phi(s))

    def observe(self, s, a, reward, s_next, terminal):
        self.agent.observe(self.phi(s), a, reward, self.phi(s_next), terminal)

    def end_episode(self):
        self.agent.end_episode()

    def values(self):
        return self.agent.values()


def make_agent(kind, mdp, params, rng=None, phi=None):
    agent_class = get_agent(kind)
    if phi is not None and phi.n_states != mdp.n_states:
        raise ArgumentError("phi covers %d states, the MDP has %d" % (phi.n_states, mdp.n_states))
    n_states = mdp.n_states if phi is None else phi.n_abstract
    agent = agent_class(n_states, mdp.n_actions, mdp.gamma, mdp.r_max, params, rng)
    return agent if phi is None else AbstractedAgent(agent, phi)


def wrap_with_state_abstraction(agent_kind, phi, mdp, params, rng=None):
    """An agent of `agent_kind` that observes phi(s)."""
    if phi is None:
        raise ArgumentError("a state abstraction is required")
    return make_agent(agent_kind, mdp, params, rng, phi)


def _agent_name(agent):
    return getattr(agent, 'name', None) or agent.__extension_name__


def run_episodes(agent, mdp, params, rng, monitor=None):
    """Runs `params.episodes` episodes of at most `params.horizon` steps.

    Each episode starts from the MDP's start distribution and ends early
    when a terminal state is entered. `monitor(agent, s, a, reward, s_next)`
    is called after every observation. Returns (rewards, steps)."""
    rewards, steps = [], []
    for _ in range(params.episodes):
        s = mdp.sample_start(rng)
        total = 0.0
        taken = 0
        while taken < params.horizon and not mdp.terminal[s]:
            a = agent.act(s)
            s_next, reward = mdp.step(s, a, rng)
            terminal = bool(mdp.terminal[s_next])
            agent.observe(s, a, reward, s_next, terminal)
            if monitor is not None:
                monitor(agent, s, a, reward, s_next)
            total += reward
            taken += 1
            s = s_next
        agent.end_episode()
        rewards.append(total)
        steps.append(taken)
    return rewards, steps


def run_agent(kind, mdp, params=None, phi=None, monitor=None):
    """Learns on `mdp` from scratch and returns the LearningRecord.

    The environment and the agent draw from separate streams derived from
    `params.seed`, so a run is reproducible whatever the agent consumes."""
    params = params or AgentParams()
    agent = make_agent(kind, mdp, params, derive_rng(params.seed, AGENT_STREAM), phi)
    rewards, steps = run_episodes(agent, mdp, params, derive_rng(params.seed, ENV_STREAM),
                                  monitor)
    record = LearningRecord(_agent_name(agent), mdp.name or 'mdp', params.seed, rewards, steps,
                            params.to_dict())
    get_logger().debug("%r", record)
    return record


def run_q_learning(mdp, params=None, phi=None):
    return run_agent('q_learning', mdp, params, phi)


def run_rmax(mdp, params=None, phi=None):
    return run_agent('rmax', mdp, params, phi)


def run_delayed_q(mdp, params=None, phi=None):
    return run_agent('delayed_q', mdp, params, phi)


def run_random_agent(mdp, params=None):
    return run_agent('random', mdp, params)


def run_lifelong(task_dist, kind, params, n_tasks, phi=None):
    """A fresh agent on each of `n_tasks` tasks drawn from `task_dist`."""
    if n_tasks < 1:
        raise ArgumentError("n_tasks must be positive")
    rng = derive_rng(params.seed, 2)
    records = []
    for number in range(n_tasks):
        task = task_dist.task(task_dist.sample_goal(rng))
        task_params = params.replace(seed=derive_seed(params.seed, 3, number))
        records.append(run_agent(kind, task, task_params, phi))
    get_logger().info("lifelong %s: %d tasks, mean reward %g", kind, n_tasks,
                      sum(record.total_reward for record in records) / n_tasks)
    return records


def records_to_csv(records, path):
    """Writes one row per episode; `path` is a filename or an open file."""
    if hasattr(path, 'write'):
        return _write_records(records, path)
    with open(path, 'w', newline='') as stream:
        return _write_records(records, stream)


def _write_records(records, stream):
    writer = csv.writer(stream)
    writer.writerow(LearningRecord.columns)
    count = 0
    for record in records:
        for row in record.rows():
            writer.writerow(row)
            count += 1
    return count
