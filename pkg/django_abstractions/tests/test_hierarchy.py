# -*- coding: utf-8 -*-
import io
import json

import numpy as np
from django.test import SimpleTestCase
from mock import Mock, patch

from django_abstractions.abstraction.core import StateAbstraction
from django_abstractions.agents.base import AgentParams
from django_abstractions.envs.chains import chain
from django_abstractions.errors import ArgumentError, BoundViolationError, ModelError
from django_abstractions.hierarchy.classes import (
    CERTIFICATION_COLUMNS, ClassSpec, best_abstract_policy, block_q_values, certification_to_csv,
    certify_pair, check_class_membership, class_loss_bound, construct_q_eps_set,
    homomorphism_gaps, necessary_condition_audit, pair_value_loss,
)
from django_abstractions.hierarchy.levels import (
    Hierarchy, branching_experiment, build_hierarchy, hierarchy_to_json, hierarchy_value_loss,
)
from django_abstractions.hierarchy.models import LevelModel, abstract_level, relative_option_model
from django_abstractions.hierarchy.pairs import (
    PhiOptionPair, PhiRelativeOption, ground_abstract_policy, optimal_phi_options,
    pair_from_json, pair_to_json,
)
from django_abstractions.mdp import Policy, solve_mdp
from django_abstractions.options.core import Option

__all__ = ['OptionPairs', 'LevelModels', 'PairClasses', 'Hierarchies']

GAMMA = 0.95


def halves():
    return StateAbstraction([0, 0, 1, 1])


def left_option(phi, block):
    return PhiRelativeOption(phi, block, Policy.deterministic([0] * phi.n_states, 2),
                             name='x%d<' % block)


class OptionPairs(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4, gamma=GAMMA)
        self.phi = halves()

    def test_relative_option(self):
        option = left_option(self.phi, 1)
        self.assertEqual(option.initiation.tolist(), [False, False, True, True])
        self.assertEqual(option.termination.tolist(), [1.0, 1.0, 0.0, 0.0])
        with self.assertRaises(ModelError):
            left_option(self.phi, 2)

    def test_pair_validation(self):
        with self.assertRaises(ModelError):
            PhiOptionPair(self.phi, [left_option(self.phi, 0)])
        with self.assertRaises(ModelError):
            PhiOptionPair(self.phi, [])
        stray = Option([0], np.ones(4), Policy.deterministic([0] * 4, 2))
        with self.assertRaises(ModelError):
            PhiOptionPair(self.phi, [left_option(self.phi, 0), left_option(self.phi, 1), stray])

    def test_choices(self):
        options = [left_option(self.phi, 0), left_option(self.phi, 1),
                   PhiRelativeOption(self.phi, 0, solve_mdp(self.mdp).policy)]
        pair = PhiOptionPair(self.phi, options)
        self.assertEqual(pair.by_block, [[0, 2], [1]])
        self.assertEqual(pair.branching, 2)
        self.assertEqual(pair.n_policies(), 2)
        self.assertEqual(pair.action_option(1, 3), 1)
        self.assertEqual(list(pair.abstract_policies()), [(0, 1), (2, 1)])
        with self.assertRaises(ArgumentError):
            pair.check_policy([1, 1])
        with self.assertRaises(ArgumentError):
            pair.check_policy([0])

    def test_grounding_the_optimal_options(self):
        pair = optimal_phi_options(self.mdp, self.phi)
        policy = ground_abstract_policy(pair, [0, 1])
        self.assertEqual(policy.actions.tolist(), solve_mdp(self.mdp).policy.actions.tolist())
        with self.assertRaises(ArgumentError):
            optimal_phi_options(chain(5), self.phi)

    def test_json_document(self):
        pair = optimal_phi_options(self.mdp, self.phi)
        restored = pair_from_json(pair_to_json(pair))
        self.assertTrue(restored.phi.same_partition(self.phi))
        self.assertEqual([option.name for option in restored.options], ['x0*', 'x1*'])
        self.assertEqual(restored.options[1].block, 1)
        with self.assertRaises(ModelError):
            pair_from_json('{"abstraction": [0, 0]}')


class LevelModels(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4, gamma=GAMMA)
        self.level = LevelModel.from_mdp(self.mdp)

    def test_ground_level(self):
        self.assertEqual((self.level.n_states, self.level.n_actions), (4, 2))
        self.assertAlmostEqual(self.level.kernel[0, 1, 1], GAMMA)
        v, policy = self.level.solve()
        self.assertTrue(np.allclose(v, solve_mdp(self.mdp).v))
        self.assertEqual(policy.actions[:3].tolist(), [1, 1, 1])

    def test_kernel_must_be_substochastic(self):
        with self.assertRaises(ModelError):
            LevelModel(np.full((2, 1, 2), 0.6), np.zeros((2, 1)))
        with self.assertRaises(ModelError):
            LevelModel(np.zeros((2, 1, 2)), np.zeros(2))

    def test_relative_option_model(self):
        pair = optimal_phi_options(self.mdp, halves())
        reward, transition = relative_option_model(self.level, pair.options[0])
        self.assertEqual(reward.tolist(), [0.0, 0.0, 0.0, 0.0])
        self.assertAlmostEqual(transition[0, 2], GAMMA ** 2)
        self.assertAlmostEqual(transition[1, 2], GAMMA)
        self.assertEqual(transition[2].sum(), 0.0)
        reward, _ = relative_option_model(self.level, pair.options[1])
        self.assertAlmostEqual(reward[2], 1.0)

    def test_abstract_level(self):
        upper = abstract_level(self.level, optimal_phi_options(self.mdp, halves()))
        self.assertEqual((upper.n_states, upper.n_actions), (2, 1))
        self.assertAlmostEqual(upper.kernel[0, 0, 1], 0.5 * (GAMMA ** 2 + GAMMA))
        self.assertAlmostEqual(upper.reward[0, 0], 0.0)
        self.assertFalse(upper.terminal.any())
        weighted = abstract_level(self.level, optimal_phi_options(self.mdp, halves()),
                                  w=[0.0, 1.0, 1.0, 0.0])
        self.assertAlmostEqual(weighted.kernel[0, 0, 1], GAMMA)
        self.assertAlmostEqual(weighted.reward[1, 0], 1.0)


class PairClasses(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4, gamma=GAMMA)
        self.phi = halves()
        self.optimal = optimal_phi_options(self.mdp, self.phi)
        self.stuck = PhiOptionPair(self.phi, [left_option(self.phi, 0), self.optimal.options[1]])

    def test_class_spec(self):
        spec = ClassSpec('model', eps_r=0.1)
        self.assertEqual(spec['eps_t'], 0.0)
        self.assertEqual(ClassSpec.from_dict(spec.to_dict()).params, spec.params)
        with self.assertRaises(ArgumentError):
            ClassSpec('bisimulation')
        with self.assertRaises(ArgumentError):
            ClassSpec('q_star', tau=0.1)
        with self.assertRaises(ArgumentError):
            ClassSpec('k_step', tau=-1.0)
        with self.assertRaises(ArgumentError):
            ClassSpec.from_dict({"tau": 0.1})

    def test_reports_the_smdp_policy(self):
        both = PhiOptionPair(self.phi, self.stuck.options + self.optimal.options[:1])
        result = best_abstract_policy(self.mdp, both)
        self.assertAlmostEqual(result.loss, 0.0)
        self.assertTrue(result.enumerated)
        self.assertTrue(result.consistent)
        searched = best_abstract_policy(self.mdp, both, limit=0)
        self.assertFalse(searched.enumerated)
        self.assertAlmostEqual(searched.best_loss, 0.0)

    @patch('django_abstractions.hierarchy.classes.abstract_level')
    def test_better_policy_than_the_smdp_one(self, abstract_level_mock):
        abstract_level_mock.return_value.solve.return_value = (None, Mock(actions=[0, 0]))
        both = PhiOptionPair(self.phi, self.stuck.options + self.optimal.options[:1])
        result = best_abstract_policy(self.mdp, both)
        self.assertEqual(result.abstract_policy, [0, 1])
        self.assertAlmostEqual(result.loss, GAMMA)
        self.assertAlmostEqual(result.best_loss, 0.0)
        self.assertFalse(result.consistent)
        self.assertAlmostEqual(pair_value_loss(self.mdp, both), GAMMA)
        with self.assertRaises(BoundViolationError):
            best_abstract_policy(self.mdp, both, strict=True)

    def test_loss_bounds(self):
        self.assertAlmostEqual(class_loss_bound(ClassSpec('q_star', eps_q=0.1), 0.9, 4, 1.0), 1.0)
        self.assertAlmostEqual(
            class_loss_bound({"kind": "model", "eps_r": 0.1, "eps_t": 0.01}, 0.9, 4, 1.0), 14.0)
        self.assertAlmostEqual(class_loss_bound(ClassSpec('k_step', tau=0.01), 0.9, 4, 1.0), 3.6)
        self.assertAlmostEqual(
            class_loss_bound(ClassSpec('homomorphism', eps_r=0.1, eps_p=0.2), 0.9, 4, 1.0), 20.0)

    def test_block_q_values(self):
        q = block_q_values(self.mdp, self.optimal)
        v_star = solve_mdp(self.mdp).v
        self.assertTrue(np.allclose(q[0, :2], v_star[:2]))
        self.assertTrue(np.allclose(q[1, 2:], v_star[2:]))
        self.assertEqual(q[0, 2], 0.0)
        self.assertTrue(np.allclose(block_q_values(self.mdp, self.stuck)[0, :2], 0.0))

    def test_value_loss(self):
        self.assertAlmostEqual(pair_value_loss(self.mdp, self.optimal), 0.0)
        self.assertAlmostEqual(pair_value_loss(self.mdp, self.stuck), GAMMA)
        both = PhiOptionPair(self.phi, self.stuck.options + self.optimal.options[:1])
        self.assertAlmostEqual(pair_value_loss(self.mdp, both), 0.0)

    def test_membership(self):
        member = check_class_membership(self.mdp, self.optimal, {"kind": "q_star"})
        self.assertTrue(member.member)
        self.assertAlmostEqual(member.achieved['eps_q'], 0.0)
        self.assertEqual(member.checked, 2)
        stuck = check_class_membership(self.mdp, self.stuck, ClassSpec('q_star', eps_q=0.5))
        self.assertFalse(stuck.member)
        self.assertAlmostEqual(stuck.achieved['eps_q'], GAMMA)
        self.assertTrue(check_class_membership(self.mdp, self.optimal, ClassSpec('model')).member)
        self.assertTrue(check_class_membership(self.mdp, self.optimal, ClassSpec('k_step')).member)
        with self.assertRaises(ArgumentError):
            check_class_membership(chain(5), self.optimal, ClassSpec('q_star'))

    def test_homomorphism_gaps(self):
        identity = optimal_phi_options(self.mdp, StateAbstraction.identity(4))
        gap = homomorphism_gaps(self.mdp, identity, [0, 1, 2, 3])
        self.assertAlmostEqual(gap.k_p, 2.0)
        self.assertAlmostEqual(gap.k_r, 1.0)
        membership = check_class_membership(self.mdp, identity,
                                            ClassSpec('homomorphism', eps_r=1.0, eps_p=2.0))
        self.assertTrue(membership.member)
        self.assertEqual(membership.checked, 1)

    def test_necessary_condition(self):
        audit = necessary_condition_audit(self.mdp, self.stuck, 0.1)
        self.assertTrue(audit.holds)
        self.assertEqual(audit.offending, [0])
        self.assertAlmostEqual(audit.block_gaps[0], GAMMA)
        self.assertAlmostEqual(audit.block_gaps[1], 0.0)
        clean = necessary_condition_audit(self.mdp, self.optimal, 0.0, strict=True)
        self.assertEqual(clean.offending, [])
        with self.assertRaises(ArgumentError):
            necessary_condition_audit(self.mdp, self.optimal, -0.1)

    def test_construct_q_eps_set(self):
        pair = construct_q_eps_set(self.mdp, self.phi, 0.0, n_distractors=2, seed=1)
        self.assertEqual(len(pair.options), 6)
        self.assertEqual(pair.branching, 3)
        self.assertAlmostEqual(pair_value_loss(self.mdp, pair), 0.0)
        loose = construct_q_eps_set(self.mdp, self.phi, 0.3, seed=1)
        self.assertTrue(check_class_membership(self.mdp, loose,
                                               ClassSpec('q_star', eps_q=0.3)).member)
        with self.assertRaises(ArgumentError):
            construct_q_eps_set(self.mdp, self.phi, -0.1)

    def test_certification(self):
        rows = certify_pair(self.mdp, self.optimal, strict=True)
        self.assertEqual([row['class'] for row in rows],
                         ['q_star', 'model', 'k_step', 'homomorphism'])
        self.assertTrue(all(row['holds'] for row in rows))
        self.assertAlmostEqual(rows[0]['bound'], 0.0)
        stream = io.StringIO()
        self.assertEqual(certification_to_csv(rows, stream), 4)
        self.assertEqual(stream.getvalue().splitlines()[0], ','.join(CERTIFICATION_COLUMNS))


class Hierarchies(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4, gamma=GAMMA)

    def test_single_level(self):
        hierarchy = build_hierarchy(self.mdp, halves())
        self.assertEqual(hierarchy.depth, 1)
        self.assertEqual(repr(hierarchy), '<Hierarchy 4 -> 2>')
        self.assertEqual(hierarchy.projection(1).tolist(), [0, 0, 1, 1])
        result = hierarchy_value_loss(self.mdp, hierarchy)
        self.assertAlmostEqual(result.loss, 0.0)
        self.assertEqual(result.kappa, [])
        self.assertTrue(result.holds)

    def test_two_levels(self):
        hierarchy = build_hierarchy(self.mdp, [halves(), StateAbstraction([0, 0])], depth=2)
        self.assertEqual(hierarchy.depth, 2)
        self.assertEqual(hierarchy.projection(2).tolist(), [0, 0, 0, 0])
        ground = hierarchy.ground(2, [0])
        self.assertEqual(ground.actions[:3].tolist(), [1, 1, 1])
        result = hierarchy_value_loss(self.mdp, hierarchy)
        self.assertAlmostEqual(result.loss, 0.0)
        self.assertEqual((len(result.ell), len(result.kappa)), (2, 1))
        self.assertTrue(result.holds)
        self.assertLessEqual(result.loss, result.certified)

    def test_three_levels(self):
        mdp = chain(8, gamma=GAMMA)
        phis = [StateAbstraction([0, 0, 1, 1, 2, 2, 3, 3]), StateAbstraction([0, 0, 1, 1]),
                StateAbstraction([0, 0])]
        hierarchy = build_hierarchy(mdp, phis, depth=3)
        self.assertEqual(hierarchy.depth, 3)
        result = hierarchy_value_loss(mdp, hierarchy)
        self.assertEqual((len(result.ell), len(result.kappa)), (3, 2))
        self.assertAlmostEqual(result.bound, 3 * (result.kappa_hat + result.ell_hat))
        self.assertAlmostEqual(result.certified, 3 * result.ell_hat + 4 * result.kappa_hat)
        self.assertLessEqual(result.loss, result.bound + 1e-6)
        self.assertTrue(result.holds)

    @patch('django_abstractions.hierarchy.levels._ground_loss', return_value=100.0)
    def test_loss_is_checked_against_the_bound(self, ground_loss_mock):
        hierarchy = build_hierarchy(self.mdp, [halves(), StateAbstraction([0, 0])], depth=2)
        result = hierarchy_value_loss(self.mdp, hierarchy, strict=False)
        self.assertFalse(result.holds)
        with self.assertRaises(BoundViolationError) as raised:
            hierarchy_value_loss(self.mdp, hierarchy)
        self.assertEqual(raised.exception.bound, result.bound)

    def test_level_must_shrink(self):
        with self.assertRaises(ModelError):
            build_hierarchy(self.mdp, StateAbstraction.identity(4))
        with self.assertLogs('abstractions', level='WARNING'):
            hierarchy = build_hierarchy(self.mdp, [halves(), StateAbstraction.identity(2)],
                                        depth=2)
        self.assertEqual(hierarchy.depth, 1)
        with self.assertRaises(ArgumentError):
            build_hierarchy(self.mdp, halves(), depth=0)

    def test_pairs_must_fit(self):
        with self.assertRaises(ModelError):
            Hierarchy(chain(5), [optimal_phi_options(self.mdp, halves())])
        with self.assertRaises(ModelError):
            Hierarchy(self.mdp, [])

    def test_json_document(self):
        document = json.loads(hierarchy_to_json(build_hierarchy(self.mdp, halves())))
        self.assertEqual(document["mdp"], 'chain')
        self.assertEqual(len(document["levels"]), 1)
        self.assertEqual(document["levels"][0]["abstraction"], [0, 0, 1, 1])

    def test_branching_experiment(self):
        rows = branching_experiment(self.mdp, halves(), [0, 1], [20], agents=('q_learning',),
                                    params=AgentParams(horizon=10))
        self.assertEqual(len(rows), 2)
        self.assertEqual([row['n_distractors'] for row in rows], [0, 1])
        for row in rows:
            self.assertAlmostEqual(row['optimal_value'], GAMMA ** 2)
            self.assertLessEqual(row['value'], row['optimal_value'] + 1e-9)
