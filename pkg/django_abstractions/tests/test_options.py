# -*- coding: utf-8 -*-
import numpy as np
from django.test import SimpleTestCase

from django_abstractions.envs.chains import chain, six_state_chain, six_state_option
from django_abstractions.errors import ArgumentError, ConvergenceError, ModelError
from django_abstractions.mdp import Policy, value_iteration
from django_abstractions.options.core import (
    Option, PointOption, options_from_json, options_to_json, primitive_options,
)
from django_abstractions.options.models import (
    compute_elm_exact, compute_mtm, elm_value_bound, estimate_elm_monte_carlo,
    models_to_csv, mtm_horizon_cap,
)
from django_abstractions.options.smdp import (
    OperatorSet, delta_for_epsilon, elm_mtm_value_gap, smdp_solve, smdp_value_iteration,
)

__all__ = ['Options', 'OptionModels', 'SmdpPlanning']

DELTA = 0.4
GAMMA = 0.95


def stage_factor(delta=DELTA, gamma=GAMMA):
    """E[gamma^G] for a geometric wait advancing with probability delta."""
    return delta * gamma / (1.0 - (1.0 - delta) * gamma)


def run_right(mdp, start=0):
    """Walks right from `start` until the end of a chain."""
    initiation = np.zeros(mdp.n_states, dtype=bool)
    initiation[start:-1] = True
    termination = np.zeros(mdp.n_states)
    termination[-1] = 1.0
    return Option(initiation, termination, Policy.deterministic([1] * mdp.n_states, 2),
                  name='right')


class Options(SimpleTestCase):

    def test_validation(self):
        policy = Policy.deterministic([0, 0, 0], 2)
        with self.assertRaises(ModelError):
            Option(np.zeros(3, dtype=bool), np.ones(3), policy)
        with self.assertRaises(ModelError):
            Option([0], [0.0, 1.5, 0.0], policy)
        with self.assertRaises(ModelError):
            Option([0], np.ones(4), policy)

    def test_initiation_from_indices(self):
        option = Option([0, 2], np.ones(3), Policy.deterministic([0, 0, 0], 2))
        self.assertEqual(option.initiation.tolist(), [True, False, True])
        self.assertTrue(option.can_start(2))
        self.assertFalse(option.can_start(1))

    def test_effective_termination(self):
        mdp = chain(4)
        option = Option([0], np.zeros(4), Policy.deterministic([1] * 4, 2))
        self.assertEqual(option.effective_termination(mdp).tolist(), [0.0, 0.0, 0.0, 1.0])

    def test_json_document(self):
        options = [PointOption(0, 2, Policy.deterministic([1, 1, 0], 2)),
                   Option([1], [0.0, 0.5, 1.0], Policy.uniform(3, 2), name='soft')]
        restored = options_from_json(options_to_json(options))
        self.assertIsInstance(restored[0], PointOption)
        self.assertEqual((restored[0].init_state, restored[0].term_state), (0, 2))
        self.assertEqual(restored[0].name, '0->2')
        self.assertEqual(restored[1].termination.tolist(), [0.0, 0.5, 1.0])
        self.assertFalse(restored[1].policy.is_deterministic)

    def test_primitive_options(self):
        options = primitive_options(chain(3))
        self.assertEqual([option.name for option in options], ['a0', 'a1'])
        self.assertTrue(options[1].initiation.all())


class OptionModels(SimpleTestCase):

    def setUp(self):
        self.mdp = six_state_chain(DELTA, GAMMA)
        self.option = six_state_option(self.mdp)

    def test_primitive_mtm_is_one_step(self):
        mdp = chain(4)
        model = compute_mtm(mdp, primitive_options(mdp)[1])
        self.assertAlmostEqual(model.transition[0, 1], mdp.gamma)
        self.assertAlmostEqual(model.transition[2, 3], mdp.gamma)
        self.assertAlmostEqual(model.reward[2], 1.0)
        self.assertEqual(model.horizon, 1)

    def test_mtm_of_the_six_state_chain(self):
        model = compute_mtm(self.mdp, self.option)
        expected = 0.5 * GAMMA ** 2 + 0.5 * GAMMA * stage_factor() ** 3
        self.assertAlmostEqual(model.transition[0, 5], expected, places=8)
        self.assertAlmostEqual(model.reward[0], expected / GAMMA, places=8)
        self.assertFalse(model.capped)
        self.assertEqual(model.transition[5].sum(), 0.0)

    def test_durations(self):
        model = compute_mtm(self.mdp, self.option, record_durations=True)
        self.assertAlmostEqual(model.durations[1, 0], 0.5)
        self.assertAlmostEqual(model.durations[:, 0].sum(), 1.0, places=6)

    def test_exact_elm_moments(self):
        model = compute_elm_exact(self.mdp, self.option)
        self.assertAlmostEqual(model.mu[0], 0.5 * 2 + 0.5 * (1 + 3 / DELTA))
        self.assertAlmostEqual(model.variance[0], 16.1875)
        self.assertAlmostEqual(model.termination[0, 5], 1.0)
        self.assertAlmostEqual(model.transition[0, 5], GAMMA ** model.mu[0])
        self.assertAlmostEqual(model.reward[0], GAMMA ** (model.mu[0] - 1.0))
        self.assertAlmostEqual(model.sigma[0], np.sqrt(16.1875))

    def test_primitive_elm_keeps_the_reward(self):
        mdp = chain(4)
        model = compute_elm_exact(mdp, primitive_options(mdp)[1])
        self.assertTrue(np.allclose(model.mu[:3], 1.0))
        self.assertTrue(np.allclose(model.reward[:3], mdp.expected_reward[:3, 1]))
        self.assertAlmostEqual(model.reward[2], 1.0)
        self.assertAlmostEqual(model.transition[0, 1], mdp.gamma)

    def test_interior_discount(self):
        model = compute_elm_exact(self.mdp, self.option, discount_interior=True)
        mtm = compute_mtm(self.mdp, self.option)
        self.assertAlmostEqual(model.reward[0], mtm.reward[0], places=8)
        self.assertAlmostEqual(model.with_interior_discount(False).reward[0],
                               GAMMA ** (model.mu[0] - 1.0))

    def test_monte_carlo_estimate(self):
        exact = compute_elm_exact(self.mdp, self.option)
        estimate = estimate_elm_monte_carlo(self.mdp, self.option, 4000, seed=1)
        self.assertAlmostEqual(estimate.mu[0], exact.mu[0], delta=0.3)
        self.assertAlmostEqual(estimate.termination[0, 5], 1.0)
        self.assertEqual(estimate.capped, 0)
        self.assertEqual(estimate.rollouts, 4000)
        with self.assertRaises(ArgumentError):
            estimate_elm_monte_carlo(self.mdp, self.option, 0)

    def test_option_that_never_stops(self):
        mdp = chain(3)
        option = Option([0], [0.0, 0.0, 1.0], Policy.deterministic([0, 0, 0], 2), name='stuck')
        with self.assertRaises(ConvergenceError):
            compute_elm_exact(mdp, option)
        model = compute_mtm(mdp, option)
        self.assertTrue(model.capped)
        self.assertEqual(model.horizon, mtm_horizon_cap(mdp.gamma))

    def test_option_must_fit_the_mdp(self):
        with self.assertRaises(ArgumentError):
            compute_mtm(chain(5), self.option)

    def test_elm_value_bound(self):
        bound = elm_value_bound(5.25, 4.0, GAMMA, 1.0, 20.0)
        self.assertAlmostEqual(bound.failure_probability, 16.0 / 400.0)
        self.assertGreater(bound.bound, 0.0)
        self.assertTrue(elm_value_bound(5.25, 4.0, GAMMA, 0.01, 40.0).vacuous)
        with self.assertRaises(ArgumentError):
            elm_value_bound(5.25, 4.0, GAMMA, 1.0, 1.0)
        with self.assertRaises(ArgumentError):
            elm_value_bound(5.25, 4.0, GAMMA, 0.0, 2.0)

    def test_models_to_csv(self):
        text = models_to_csv(self.mdp, [compute_mtm(self.mdp, self.option),
                                        compute_elm_exact(self.mdp, self.option)])
        lines = text.splitlines()
        self.assertEqual(lines[0], 'option,state,next_state,kind,transition,reward,mu,variance')
        self.assertTrue(lines[1].startswith('to-s6,s1,s6,mtm,'))
        self.assertEqual(len([line for line in lines if ',elm,' in line]), 5)


class SmdpPlanning(SimpleTestCase):

    def test_primitives_alone_match_value_iteration(self):
        mdp = chain(6, gamma=0.9)
        v, sweeps = smdp_value_iteration(mdp, delta=1e-8)
        expected, expected_sweeps = value_iteration(mdp, delta=1e-8)
        self.assertTrue(np.allclose(v, expected))
        self.assertEqual(sweeps, expected_sweeps)

    def test_options_shorten_planning(self):
        mdp = chain(12, gamma=0.9)
        _, plain = smdp_value_iteration(mdp, delta=1e-8)
        v, fewer = smdp_value_iteration(mdp, [run_right(mdp)], delta=1e-8)
        self.assertLess(fewer, plain)
        self.assertAlmostEqual(v[0], 0.9 ** 10)

    def test_options_only(self):
        mdp = chain(6)
        solution = smdp_solve(mdp, [run_right(mdp)], include_primitives=False)
        self.assertAlmostEqual(solution.v[0], mdp.gamma ** 4)
        self.assertEqual(solution.v[-1], 0.0)
        self.assertEqual(solution.operators.names, ['right'])

    def test_uncovered_states(self):
        mdp = chain(6)
        with self.assertRaises(ArgumentError):
            OperatorSet(mdp, [run_right(mdp, start=2)], include_primitives=False)
        with self.assertRaises(ArgumentError):
            OperatorSet(mdp, model_kind='hmm')

    def test_operator_names(self):
        mdp = chain(6)
        operators = OperatorSet(mdp, [run_right(mdp)], model_kind='elm')
        self.assertEqual(operators.names, ['a0', 'a1', 'right'])
        self.assertEqual(len(operators), 3)

    def test_deterministic_options_have_no_elm_gap(self):
        mdp = chain(8, gamma=0.9)
        gap, same = elm_mtm_value_gap(mdp, [run_right(mdp)], delta=1e-10,
                                      include_primitives=False)
        self.assertLess(gap, 1e-6)
        self.assertTrue(same)

    def test_equal_choices_count_as_agreement(self):
        mdp = chain(8, gamma=0.9)
        gap, same = elm_mtm_value_gap(mdp, [run_right(mdp)], delta=1e-10)
        self.assertLess(gap, 1e-6)
        self.assertTrue(same)
        with self.assertRaises(ArgumentError):
            elm_mtm_value_gap(mdp, [run_right(mdp)], tie=-1.0)

    def test_stochastic_durations_open_a_gap(self):
        mdp = six_state_chain(DELTA, GAMMA)
        gap, _ = elm_mtm_value_gap(mdp, [six_state_option(mdp)], delta=1e-10,
                                   include_primitives=False)
        self.assertGreater(gap, 1e-4)

    def test_delta_for_epsilon(self):
        self.assertAlmostEqual(delta_for_epsilon(0.1, 0.5), 0.05)
        self.assertEqual(delta_for_epsilon(0.1, 0.0), 0.1)
        with self.assertRaises(ArgumentError):
            smdp_solve(chain(3), delta=0.0)
