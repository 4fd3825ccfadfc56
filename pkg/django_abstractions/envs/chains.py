# -*- coding: utf-8 -*-
"""Small hand-built chains used as counterexamples and sanity checks."""
import numpy as np

from ..errors import ModelError
from ..extensions import register
from ..mdp import FiniteMdp, Policy
from .base import ENVIRONMENT, Environment

__all__ = [
    'ThreeChain', 'Chain', 'SixStateChain', 'three_chain', 'chain',
    'six_state_chain', 'six_state_option', 'LEFT', 'RIGHT', 'LOOP',
]

LEFT, RIGHT, LOOP = 0, 1, 2


def three_chain(kappa=0.001, gamma=0.95):
    """s0 - s1 - s2 with a terminal sink.

    Looping in s0 or s1 pays `kappa` and stays put; looping in s2 pays 1
    and ends the episode. Moving right from s2 stays in s2 and moving left
    from s0 stays in s0."""
    if kappa < 0:
        raise ModelError("kappa must be nonnegative")
    sink = 3
    transition = np.zeros((4, 3, 4))
    reward = np.zeros((4, 3, 4))
    for s in range(3):
        transition[s, LEFT, max(s - 1, 0)] = 1.0
        transition[s, RIGHT, min(s + 1, 2)] = 1.0
    transition[0, LOOP, 0] = transition[1, LOOP, 1] = 1.0
    reward[0, LOOP, 0] = reward[1, LOOP, 1] = kappa
    transition[2, LOOP, sink] = 1.0
    reward[2, LOOP, sink] = 1.0
    return FiniteMdp(transition, reward, gamma, terminal=[sink], name='three_chain',
                     state_labels=['s0', 's1', 's2', 'sink'])


def chain(n_states=5, gamma=0.95, slip=0.0):
    """Corridor of `n_states` cells; entering the last one pays 1 and ends
    the episode. Actions are left and right; `slip` reverses a move."""
    if n_states < 2:
        raise ModelError("a chain needs at least two states")
    transition = np.zeros((n_states, 2, n_states))
    for s in range(n_states):
        for action, step in ((0, -1), (1, 1)):
            forward = min(max(s + step, 0), n_states - 1)
            backward = min(max(s - step, 0), n_states - 1)
            transition[s, action, forward] += 1.0 - slip
            transition[s, action, backward] += slip
    entry = np.zeros(n_states)
    entry[-1] = 1.0
    reward = np.broadcast_to(entry[np.newaxis, np.newaxis, :], transition.shape)
    return FiniteMdp(transition, reward, gamma, terminal=[n_states - 1], name='chain',
                     state_labels=['s%d' % s for s in range(n_states)])


def six_state_chain(delta=0.4, gamma=0.95):
    """One-action chain whose termination time has a wide spread.

    From s1 the agent moves to s2 or s5 with equal probability. s2, s3
    and s4 each advance with probability `delta` and otherwise stay; s5
    always moves to s6. Entering s6 pays 1 and s6 is terminal."""
    if not 0.0 < delta <= 1.0:
        raise ModelError("delta must lie in (0, 1]")
    transition = np.zeros((6, 1, 6))
    transition[0, 0, 1] = transition[0, 0, 4] = 0.5
    for s, following in ((1, 2), (2, 3), (3, 5)):
        transition[s, 0, s] = 1.0 - delta
        transition[s, 0, following] += delta
    transition[4, 0, 5] = 1.0
    entry = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
    reward = np.broadcast_to(entry[np.newaxis, np.newaxis, :], transition.shape)
    return FiniteMdp(transition, reward, gamma, terminal=[5], name='six_state_chain',
                     state_labels=['s%d' % s for s in range(1, 7)])


def six_state_option(mdp):
    """The option running the chain from any non-terminal state to s6."""
    from ..options.core import Option

    termination = np.zeros(mdp.n_states)
    termination[5] = 1.0
    return Option(~mdp.terminal, termination,
                  Policy.deterministic(np.zeros(mdp.n_states, dtype=int), 1),
                  name='to-s6')


@register(ENVIRONMENT)
class ThreeChain(Environment):
    """Three-state chain with a small looping reward."""
    __extension_name__ = 'three_chain'
    __options__ = [
        {"name": "kappa", "type": "float", "default": 0.001,
         "description": "reward for looping in s0 and s1"},
        {"name": "gamma", "type": "float", "default": 0.95, "description": "discount factor"},
    ]

    def build(self):
        return three_chain(self.options["kappa"], self.options["gamma"])


@register(ENVIRONMENT)
class Chain(Environment):
    """Corridor with the goal at its right end."""
    __extension_name__ = 'chain'
    __options__ = [
        {"name": "n_states", "type": "int", "default": 5, "description": "corridor length"},
        {"name": "gamma", "type": "float", "default": 0.95, "description": "discount factor"},
        {"name": "slip", "type": "float", "default": 0.0,
         "description": "probability that a move goes the other way"},
    ]

    def build(self):
        return chain(self.options["n_states"], self.options["gamma"], self.options["slip"])


@register(ENVIRONMENT)
class SixStateChain(Environment):
    """Chain whose option durations are far from their mean."""
    __extension_name__ = 'six_state_chain'
    __options__ = [
        {"name": "delta", "type": "float", "default": 0.4,
         "description": "advance probability in s2, s3 and s4"},
        {"name": "gamma", "type": "float", "default": 0.95, "description": "discount factor"},
    ]

    def build(self):
        return six_state_chain(self.options["delta"], self.options["gamma"])
