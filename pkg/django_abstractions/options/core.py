# -*- coding: utf-8 -*-
"""Options: temporally extended actions over a finite MDP."""
import json

import numpy as np

from ..errors import ModelError
from ..mdp import Policy, as_policy

__all__ = [
    'Option', 'PointOption', 'primitive_options', 'options_to_json',
    'options_from_json',
]


class Option(object):
    """Initiation set, per-state termination probability and internal policy.

    Termination is drawn on every state the option enters and never in
    the state it was started from."""

    def __init__(self, initiation, termination, policy, name=None):
        termination = np.array(termination, dtype=float)
        if termination.ndim != 1:
            raise ModelError("termination must be a vector over states")
        n_states = len(termination)
        if np.any(termination < 0) or np.any(termination > 1):
            raise ModelError("termination probabilities must lie in [0, 1]")

        initiation = np.asarray(initiation)
        if initiation.dtype != bool:
            mask = np.zeros(n_states, dtype=bool)
            mask[initiation.astype(int)] = True
            initiation = mask
        if initiation.shape != (n_states,):
            raise ModelError("initiation set must be a mask over %d states" % n_states)
        if not initiation.any():
            raise ModelError("option '%s' has an empty initiation set" % (name or ''))

        policy = as_policy(policy)
        if policy.n_states != n_states:
            raise ModelError("option policy covers %d states, expected %d"
                             % (policy.n_states, n_states))

        initiation = initiation.copy()
        initiation.setflags(write=False)
        termination.setflags(write=False)
        self.initiation = initiation
        self.termination = termination
        self.policy = policy
        self.name = name

    @property
    def n_states(self):
        return len(self.termination)

    @property
    def n_actions(self):
        return self.policy.n_actions

    def can_start(self, s):
        return bool(self.initiation[s])

    def initiation_states(self):
        return np.flatnonzero(self.initiation)

    def effective_termination(self, mdp):
        """Termination probabilities with ground terminal states forced to 1."""
        return np.where(mdp.terminal, 1.0, self.termination)

    def to_dict(self):
        result = {
            "name": self.name,
            "initiation": self.initiation_states().tolist(),
            "termination": self.termination.tolist(),
            "policy": self.policy.probabilities.tolist(),
        }
        if self.policy.is_deterministic:
            result["actions"] = self.policy.actions.tolist()
        return result

    @classmethod
    def from_dict(cls, data):
        try:
            if data.get("actions") is not None:
                policy = Policy.deterministic(data["actions"], len(data["policy"][0]))
            else:
                policy = Policy.stochastic(data["policy"])
            return cls(np.array(data["initiation"], dtype=int), data["termination"],
                       policy, name=data.get("name"))
        except KeyError as e:
            raise ModelError("option document is missing key %s" % e)

    def __repr__(self):
        return "<Option %s |I|=%d>" % (self.name or '', self.initiation.sum())


class PointOption(Option):
    """Starts in exactly one state and terminates in exactly one state."""

    def __init__(self, init_state, term_state, policy, n_states=None, name=None):
        policy = as_policy(policy)
        n_states = policy.n_states if n_states is None else n_states
        initiation = np.zeros(n_states, dtype=bool)
        initiation[init_state] = True
        termination = np.zeros(n_states)
        termination[term_state] = 1.0
        super(PointOption, self).__init__(
            initiation, termination, policy,
            name=name or '%d->%d' % (init_state, term_state),
        )
        self.init_state = int(init_state)
        self.term_state = int(term_state)

    def to_dict(self):
        result = super(PointOption, self).to_dict()
        result.update(init_state=self.init_state, term_state=self.term_state)
        return result


def primitive_options(mdp):
    """One single-step option per action, available everywhere."""
    options = []
    for a in range(mdp.n_actions):
        options.append(Option(
            np.ones(mdp.n_states, dtype=bool), np.ones(mdp.n_states),
            Policy.deterministic(np.full(mdp.n_states, a), mdp.n_actions),
            name='a%d' % a,
        ))
    return options


def options_to_json(options, **kwargs):
    return json.dumps([option.to_dict() for option in options], **kwargs)


def options_from_json(text):
    documents = json.loads(text)
    options = []
    for data in documents:
        if "init_state" in data and "term_state" in data:
            policy = (Policy.deterministic(data["actions"], len(data["policy"][0]))
                      if data.get("actions") is not None else Policy.stochastic(data["policy"]))
            options.append(PointOption(data["init_state"], data["term_state"], policy,
                                       name=data.get("name")))
        else:
            options.append(Option.from_dict(data))
    return options
