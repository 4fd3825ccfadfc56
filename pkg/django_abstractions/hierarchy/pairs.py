# -*- coding: utf-8 -*-
"""Options that live inside one block of a state abstraction, and the
(abstraction, options) pairs built from them."""
import itertools
import json

import numpy as np

from ..abstraction.core import StateAbstraction
from ..errors import ArgumentError, ModelError
from ..mdp import Policy, as_policy, solve_mdp
from ..options.core import Option

__all__ = [
    'PhiRelativeOption', 'PhiOptionPair', 'ground_abstract_policy',
    'optimal_phi_options', 'pair_to_json', 'pair_from_json',
]


class PhiRelativeOption(Option):
    """Starts anywhere in block `block` of `phi`, runs until it leaves it."""

    def __init__(self, phi, block, policy, n_actions=None, name=None):
        if not 0 <= block < phi.n_abstract:
            raise ModelError("block %d does not exist in %r" % (block, phi))
        policy = as_policy(policy, n_actions)
        inside = phi.mapping == block
        super(PhiRelativeOption, self).__init__(
            inside, np.where(inside, 0.0, 1.0), policy,
            name=name or 'x%d' % block,
        )
        self.phi = phi
        self.block = int(block)

    def to_dict(self):
        result = super(PhiRelativeOption, self).to_dict()
        result["block"] = self.block
        return result

    def __repr__(self):
        return "<PhiRelativeOption %s block=%d>" % (self.name, self.block)


class PhiOptionPair(object):
    """A state abstraction with at least one relative option per block.

    Abstract policies are sequences holding, for every block, the index of
    the chosen option in `options`."""

    def __init__(self, phi, options):
        options = tuple(options)
        if not options:
            raise ModelError("a pair needs options")
        n_actions = options[0].n_actions
        by_block = [[] for _ in range(phi.n_abstract)]
        for index, option in enumerate(options):
            if not isinstance(option, PhiRelativeOption):
                raise ModelError("option '%s' is not relative to the abstraction" % option.name)
            if option.phi is not phi and not option.phi.same_partition(phi):
                raise ModelError("option '%s' belongs to another abstraction" % option.name)
            if option.n_actions != n_actions:
                raise ModelError("options disagree on the number of actions")
            by_block[option.block].append(index)
        empty = [x for x, owned in enumerate(by_block) if not owned]
        if empty:
            raise ModelError("abstract state %d has no option" % empty[0])
        self.phi = phi
        self.options = options
        self.by_block = by_block

    @property
    def n_abstract(self):
        return self.phi.n_abstract

    @property
    def n_actions(self):
        return self.options[0].n_actions

    @property
    def branching(self):
        """Largest number of options owned by one block."""
        return max(len(owned) for owned in self.by_block)

    def options_in(self, x):
        return list(self.by_block[x])

    def action_option(self, x, j):
        """Option behind local choice `j` in block `x`, wrapping around."""
        owned = self.by_block[x]
        return owned[j % len(owned)]

    def n_policies(self):
        return int(np.prod([len(owned) for owned in self.by_block], dtype=float))

    def abstract_policies(self):
        return itertools.product(*self.by_block)

    def check_policy(self, abstract_policy):
        choice = np.asarray(abstract_policy, dtype=int)
        if choice.shape != (self.n_abstract,):
            raise ArgumentError("an abstract policy picks one option per abstract state")
        for x, index in enumerate(choice):
            if not 0 <= index < len(self.options) or self.options[index].block != x:
                raise ArgumentError("option %d is not owned by abstract state %d" % (index, x))
        return choice

    def to_dict(self):
        return {
            "abstraction": self.phi.mapping.tolist(),
            "n_abstract": self.phi.n_abstract,
            "options": [option.to_dict() for option in self.options],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            phi = StateAbstraction(data["abstraction"], data.get("n_abstract"))
            options = []
            for document in data["options"]:
                probabilities = np.array(document["policy"], dtype=float)
                if document.get("actions") is not None:
                    policy = Policy.deterministic(document["actions"], probabilities.shape[1])
                else:
                    policy = Policy.stochastic(probabilities)
                options.append(PhiRelativeOption(phi, document["block"], policy,
                                                 name=document.get("name")))
        except KeyError as e:
            raise ModelError("pair document is missing key %s" % e)
        return cls(phi, options)

    def __repr__(self):
        return "<PhiOptionPair |S_phi|=%d |O_phi|=%d>" % (self.n_abstract, len(self.options))


def ground_abstract_policy(pair, abstract_policy):
    """pi(s) is the policy of the option chosen for phi(s), taken at s."""
    choice = pair.check_policy(abstract_policy)
    chosen = [pair.options[index] for index in choice[pair.phi.mapping]]
    if all(option.policy.is_deterministic for option in chosen):
        actions = [option.policy.actions[s] for s, option in enumerate(chosen)]
        return Policy.deterministic(actions, pair.n_actions)
    return Policy.stochastic([option.policy.probabilities[s] for s, option in enumerate(chosen)])


def optimal_phi_options(mdp, phi, solution=None):
    """One option per block following the optimal policy until it leaves."""
    if phi.n_states != mdp.n_states:
        raise ArgumentError("abstraction covers %d states, the MDP has %d"
                            % (phi.n_states, mdp.n_states))
    solution = solution or solve_mdp(mdp)
    return PhiOptionPair(phi, [
        PhiRelativeOption(phi, x, solution.policy, name='x%d*' % x)
        for x in range(phi.n_abstract)
    ])


def pair_to_json(pair, **kwargs):
    return json.dumps(pair.to_dict(), **kwargs)


def pair_from_json(text):
    return PhiOptionPair.from_dict(json.loads(text))
