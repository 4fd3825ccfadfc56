# -*- coding: utf-8 -*-
import numpy as np

from ..errors import ModelError
from ..extensions import register
from ..mdp import FiniteMdp
from ..seeding import make_rng
from .base import ENVIRONMENT, Environment

__all__ = ['RandomMdp', 'build_random_mdp']


def build_random_mdp(n_states, n_actions, seed=0, reward_sparsity=0.0, gamma=0.95,
                     branching=None):
    """Random MDP with uniform row-normalized transitions and R(s, a) drawn
    from [0, 1).

    `reward_sparsity` is the fraction of (s, a) rewards forced to zero and
    `branching` caps the number of successors of each pair."""
    if n_states < 1 or n_actions < 1:
        raise ModelError("a random MDP needs at least one state and one action")
    if not 0.0 <= reward_sparsity <= 1.0:
        raise ModelError("reward_sparsity must lie in [0, 1]")
    rng = make_rng(seed)

    transition = rng.random((n_states, n_actions, n_states))
    if branching is not None and branching < n_states:
        if branching < 1:
            raise ModelError("branching must be positive")
        mask = np.zeros_like(transition, dtype=bool)
        for s in range(n_states):
            for a in range(n_actions):
                mask[s, a, rng.choice(n_states, size=branching, replace=False)] = True
        transition = np.where(mask, transition, 0.0)
    transition += 1e-12
    transition /= transition.sum(axis=2, keepdims=True)

    reward = rng.random((n_states, n_actions))
    reward[rng.random((n_states, n_actions)) < reward_sparsity] = 0.0
    return FiniteMdp.from_state_action_rewards(transition, reward, gamma, name='random')


@register(ENVIRONMENT)
class RandomMdp(Environment):
    """Dense random MDP."""
    __extension_name__ = 'random'
    __options__ = [
        {"name": "n_states", "type": "int", "default": 100, "description": "number of states"},
        {"name": "n_actions", "type": "int", "default": 4, "description": "number of actions"},
        {"name": "seed", "type": "int", "default": 0, "description": "generator seed"},
        {"name": "reward_sparsity", "type": "float", "default": 0.0,
         "description": "fraction of zero rewards"},
        {"name": "branching", "type": "int", "default": None,
         "description": "successors per state-action pair, all when unset"},
        {"name": "gamma", "type": "float", "default": 0.95, "description": "discount factor"},
    ]

    def build(self):
        options = self.options
        return build_random_mdp(options["n_states"], options["n_actions"], options["seed"],
                                options["reward_sparsity"], options["gamma"],
                                options["branching"])
