# -*- coding: utf-8 -*-
"""State abstractions, weighting functions and the abstract MDPs they
induce."""
import csv
import io
from collections import OrderedDict

import numpy as np

from ..errors import ArgumentError, ModelError
from ..mdp import FiniteMdp, Policy, as_policy, greedy_policy, solve_mdp, value_loss_of_policy

__all__ = [
    'StateAbstraction', 'WeightingFunction', 'abstract_mdp', 'lift_policy',
    'abstraction_value_loss', 'abstract_policy_of',
]

WEIGHT_TOLERANCE = 1e-9


class StateAbstraction(object):
    """A surjective map from ground states onto ``0 .. n_abstract - 1``."""

    def __init__(self, mapping, n_abstract=None):
        mapping = np.array(mapping, dtype=int)
        if mapping.ndim != 1 or len(mapping) == 0:
            raise ModelError("an abstraction maps a non-empty vector of states")
        if np.any(mapping < 0):
            raise ModelError("abstract state indices must be nonnegative")
        if n_abstract is None:
            n_abstract = int(mapping.max()) + 1
        used = np.bincount(mapping, minlength=n_abstract)
        if len(used) != n_abstract or np.any(used == 0):
            raise ModelError("abstraction is not surjective onto %d abstract states"
                             % n_abstract)
        mapping.setflags(write=False)
        self.mapping = mapping
        self.n_abstract = n_abstract

    @classmethod
    def canonical(cls, labels):
        """Relabels arbitrary hashable block labels in order of first
        appearance."""
        codes = OrderedDict()
        mapping = [codes.setdefault(label, len(codes)) for label in labels]
        return cls(mapping, len(codes))

    @classmethod
    def from_blocks(cls, blocks, n_states=None):
        if n_states is None:
            n_states = sum(len(block) for block in blocks)
        mapping = -np.ones(n_states, dtype=int)
        for x, block in enumerate(blocks):
            for s in block:
                if mapping[s] >= 0:
                    raise ModelError("state %d appears in two blocks" % s)
                mapping[s] = x
        if np.any(mapping < 0):
            raise ModelError("blocks do not cover every state")
        return cls(mapping, len(blocks))

    @classmethod
    def identity(cls, n_states):
        return cls(np.arange(n_states), n_states)

    @classmethod
    def constant(cls, n_states):
        return cls(np.zeros(n_states, dtype=int), 1)

    @property
    def n_states(self):
        return len(self.mapping)

    def __call__(self, s):
        return int(self.mapping[s])

    def __len__(self):
        return self.n_abstract

    def blocks(self):
        return [np.flatnonzero(self.mapping == x) for x in range(self.n_abstract)]

    def block_of(self, s):
        return np.flatnonzero(self.mapping == self.mapping[s])

    def membership(self):
        """(S, S_phi) 0/1 matrix."""
        matrix = np.zeros((self.n_states, self.n_abstract))
        matrix[np.arange(self.n_states), self.mapping] = 1.0
        return matrix

    def relabelled(self):
        return StateAbstraction.canonical(self.mapping.tolist())

    def is_identity(self):
        return self.n_abstract == self.n_states

    def together(self, s1, s2):
        return self.mapping[s1] == self.mapping[s2]

    def refines(self, other):
        """True when every block of self lies inside a block of `other`."""
        return all(len(set(other.mapping[block])) == 1 for block in self.blocks())

    def same_partition(self, other):
        return (self.n_states == other.n_states and
                np.array_equal(self.relabelled().mapping, other.relabelled().mapping))

    def __eq__(self, other):
        if not isinstance(other, StateAbstraction):
            return NotImplemented
        return self.same_partition(other)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def to_csv(self):
        output = io.StringIO()
        writer = csv.writer(output, lineterminator='\n')
        writer.writerow(['ground_state', 'abstract_state'])
        for s, x in enumerate(self.mapping):
            writer.writerow([s, int(x)])
        return output.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        try:
            pairs = sorted((int(row['ground_state']), int(row['abstract_state'])) for row in rows)
        except (KeyError, ValueError) as e:
            raise ModelError("malformed abstraction CSV: %s" % e)
        if [s for s, _ in pairs] != list(range(len(pairs))):
            raise ModelError("abstraction CSV must list every ground state once")
        return cls([x for _, x in pairs])

    def __repr__(self):
        return "<StateAbstraction |S|=%d |S_phi|=%d>" % (self.n_states, self.n_abstract)


class WeightingFunction(object):
    """Nonnegative ground-state weights summing to one inside each block."""

    def __init__(self, phi, weights):
        weights = np.array(weights, dtype=float)
        if weights.shape != (phi.n_states,):
            raise ArgumentError("weights must have one entry per ground state")
        if np.any(weights < 0):
            raise ArgumentError("weights must be nonnegative")
        sums = np.bincount(phi.mapping, weights=weights, minlength=phi.n_abstract)
        bad = np.flatnonzero(np.abs(sums - 1.0) > WEIGHT_TOLERANCE)
        if len(bad):
            raise ArgumentError("weights of abstract state %d sum to %r"
                                % (bad[0], sums[bad[0]]))
        weights.setflags(write=False)
        self.phi = phi
        self.weights = weights

    @classmethod
    def uniform(cls, phi):
        sizes = np.bincount(phi.mapping, minlength=phi.n_abstract)
        return cls(phi, 1.0 / sizes[phi.mapping])

    @classmethod
    def from_distribution(cls, phi, distribution):
        """w(s) proportional to `distribution` within each block; blocks
        without mass fall back to uniform weights."""
        distribution = np.asarray(distribution, dtype=float)
        mass = np.bincount(phi.mapping, weights=distribution, minlength=phi.n_abstract)
        sizes = np.bincount(phi.mapping, minlength=phi.n_abstract)
        block_mass = mass[phi.mapping]
        weights = np.where(block_mass > 0,
                           distribution / np.where(block_mass > 0, block_mass, 1.0),
                           1.0 / sizes[phi.mapping])
        return cls(phi, weights)

    def __getitem__(self, s):
        return self.weights[s]


def _weights(phi, w):
    if w is None:
        return WeightingFunction.uniform(phi)
    if isinstance(w, WeightingFunction):
        if w.phi is not phi and not w.phi.same_partition(phi):
            raise ArgumentError("weighting function belongs to another abstraction")
        return w
    return WeightingFunction(phi, w)


def abstract_mdp(mdp, phi, w=None):
    """The MDP over abstract states induced by `phi` and the weights `w`
    (uniform within each block by default).

    T_phi(x'|x, a) = sum_{s in x} w(s) sum_{s' in x'} T(s'|s, a), and
    R_phi(x, a, x') is the matching weighted mean of R(s, a, s'), so the
    expected reward of (x, a) is sum_{s in x} w(s) R(s, a). A block is
    terminal when all of its members are."""
    if phi.n_states != mdp.n_states:
        raise ArgumentError("abstraction covers %d states, the MDP has %d"
                            % (phi.n_states, mdp.n_states))
    weights = _weights(phi, w).weights
    membership = phi.membership()
    weighted = membership * weights[:, np.newaxis]

    transition = np.einsum('sx,sat,ty->xay', weighted, mdp.transition, membership)
    mass = np.einsum('sx,sat,ty->xay', weighted, mdp.transition * mdp.reward, membership)
    reward = np.divide(mass, transition, out=np.zeros_like(mass), where=transition > 0)

    terminal = np.array([bool(mdp.terminal[block].all()) for block in phi.blocks()])
    start = membership.T.dot(mdp.start_dist)
    return FiniteMdp(transition, reward, mdp.gamma, start_dist=start / start.sum(),
                     terminal=terminal, name='%s/phi' % (mdp.name or 'mdp'))


def lift_policy(phi, abstract_policy):
    """Grounds a policy over abstract states: pi(s) = pi_phi(phi(s))."""
    abstract_policy = as_policy(abstract_policy)
    if abstract_policy.n_states != phi.n_abstract:
        raise ArgumentError("abstract policy covers %d states, the abstraction has %d"
                            % (abstract_policy.n_states, phi.n_abstract))
    if abstract_policy.is_deterministic:
        return Policy.deterministic(abstract_policy.actions[phi.mapping],
                                    abstract_policy.n_actions)
    return Policy.stochastic(abstract_policy.probabilities[phi.mapping])


def abstract_policy_of(mdp, phi, w=None):
    """Greedy optimal policy of the abstract MDP."""
    abstract = abstract_mdp(mdp, phi, w)
    return greedy_policy(solve_mdp(abstract).q)


def abstraction_value_loss(mdp, phi, w=None, solution=None):
    """max_s V*(s) - V^{pi_phi}(s) for the grounded optimal abstract policy."""
    lifted = lift_policy(phi, abstract_policy_of(mdp, phi, w))
    return value_loss_of_policy(mdp, lifted, solution)
