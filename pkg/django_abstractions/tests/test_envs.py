# -*- coding: utf-8 -*-
import numpy as np
from django.test import SimpleTestCase

from django_abstractions.envs.base import EnvSpec, build_env, environment_names
from django_abstractions.envs.chains import six_state_chain, six_state_option
from django_abstractions.envs.grids import (
    PAINT, GridLayout, ascii_map, hallway_options, load_layout, room_abstraction,
    upworld_abstraction,
)
from django_abstractions.envs.randoms import build_random_mdp
from django_abstractions.envs.tasks import TaskDistribution, sample_task
from django_abstractions.envs.taxi import taxi_mdp
from django_abstractions.errors import (
    ConfigurationError, ModelError, NoSuchEnvironmentError,
)
from django_abstractions.mdp import solve_mdp
from django_abstractions.seeding import make_rng

__all__ = [
    'EnvironmentSpecs', 'GridWorlds', 'ChainWorlds', 'RandomMdps', 'TaxiWorld',
    'TaskDistributions',
]


class EnvironmentSpecs(SimpleTestCase):

    def test_registered_variants(self):
        names = environment_names()
        for name in ('four_rooms', 'grid9', 'upworld', 'color_rooms', 'russell_norvig',
                     'three_chain', 'chain', 'six_state_chain', 'random', 'taxi'):
            self.assertIn(name, names)

    def test_options_are_coerced(self):
        spec = EnvSpec('grid9', width='5', slip='0.1', goal='2,3')
        self.assertEqual(spec['width'], 5)
        self.assertEqual(spec['slip'], 0.1)
        self.assertEqual(spec['goal'], (2, 3))
        self.assertEqual(spec.to_dict()['goal'], [2, 3])

    def test_unknown_option(self):
        with self.assertRaises(ConfigurationError):
            EnvSpec('grid9', colour=3)

    def test_unknown_variant(self):
        with self.assertRaises(NoSuchEnvironmentError):
            EnvSpec('maze')

    def test_dict_document(self):
        spec = EnvSpec('four_rooms', slip=0.0)
        self.assertEqual(EnvSpec.from_dict(spec.to_dict()), spec)
        with self.assertRaises(ModelError):
            EnvSpec.from_dict({"slip": 0.0})

    def test_build_env_accepts_overrides(self):
        mdp = build_env('chain', n_states=7)
        self.assertEqual(mdp.n_states, 7)
        mdp = build_env(EnvSpec('chain'), n_states=3)
        self.assertEqual(mdp.n_states, 3)


class GridWorlds(SimpleTestCase):

    def test_layout_from_text(self):
        layout = GridLayout.from_text("..#\n...")
        self.assertEqual((layout.width, layout.height), (3, 2))
        self.assertIn((3, 2), layout.blocked)
        self.assertEqual(len(layout.cells), 5)
        with self.assertRaises(ModelError):
            GridLayout.from_text("..\n...")
        with self.assertRaises(ModelError):
            GridLayout.from_text("..x")

    def test_four_rooms_shape(self):
        layout = load_layout('four_rooms')
        self.assertEqual(len(layout.cells), 104)
        self.assertEqual(len(layout.doorways()), 4)
        self.assertEqual(len(layout.rooms()), 4)
        self.assertEqual(sum(len(room) for room in layout.rooms()), 104)

        mdp = build_env('four_rooms')
        self.assertEqual((mdp.n_states, mdp.n_actions), (104, 4))
        self.assertEqual(mdp.gamma, 0.99)
        goal = mdp.state_labels.index((11, 11))
        self.assertTrue(mdp.terminal[goal])
        self.assertEqual(int(mdp.terminal.sum()), 1)

    def test_slip_moves_sideways(self):
        mdp = build_env('grid9', slip=0.1)
        layout = GridLayout(9, 9)
        s = layout.index[(5, 5)]
        up = mdp.transition[s, 0]
        self.assertAlmostEqual(up[layout.index[(5, 6)]], 0.8)
        self.assertAlmostEqual(up[layout.index[(6, 5)]], 0.1)
        self.assertAlmostEqual(up[layout.index[(4, 5)]], 0.1)

    def test_walls_keep_the_agent_in_place(self):
        mdp = build_env('grid9')
        s = mdp.state_labels.index((1, 1))
        self.assertEqual(mdp.transition[s, 3, s], 1.0)

    def test_goal_pays_on_entry(self):
        mdp = build_env('grid9', width=3, height=1, gamma=0.5)
        solution = solve_mdp(mdp)
        self.assertAlmostEqual(solution.v[0], 0.5)
        self.assertAlmostEqual(solution.v[1], 1.0)

    def test_ascii_map(self):
        lines = ascii_map(EnvSpec('four_rooms')).split('\n')
        self.assertEqual(len(lines), 11)
        self.assertEqual(lines[0], '.....#....G')
        self.assertEqual(lines[-1][0], 'S')
        with self.assertRaises(ModelError):
            ascii_map(EnvSpec('chain'))

    def test_russell_norvig_exits(self):
        mdp = build_env('russell_norvig')
        self.assertEqual(mdp.n_states, 11)
        self.assertEqual(int(mdp.terminal.sum()), 2)
        self.assertEqual(mdp.r_min, -1.0)

    def test_color_rooms_paint(self):
        mdp = build_env('color_rooms')
        self.assertEqual((mdp.n_states, mdp.n_actions), (416, 5))
        s = mdp.state_labels.index((3, 3, 0))
        painted = mdp.transition[s, PAINT]
        self.assertEqual(np.count_nonzero(painted), 4)
        self.assertAlmostEqual(painted[mdp.state_labels.index((3, 3, 2))], 0.25)
        self.assertEqual(int(mdp.terminal.sum()), 4)

    def test_room_abstraction(self):
        phi = room_abstraction(EnvSpec('four_rooms'))
        self.assertEqual(phi.n_abstract, 4)
        self.assertEqual(phi.n_states, 104)

    def test_upworld_abstraction_uses_rows(self):
        phi = upworld_abstraction(EnvSpec('upworld'))
        self.assertEqual(phi.n_abstract, 11)
        with self.assertRaises(ModelError):
            build_env('upworld', goal=(3, 4))

    def test_hallway_options(self):
        spec = EnvSpec('four_rooms')
        options = hallway_options(spec)
        self.assertEqual(len(options), 8)
        for option in options:
            self.assertTrue(option.initiation.any())
            self.assertTrue(np.all(option.termination[option.initiation] == 0.0))


class ChainWorlds(SimpleTestCase):

    def test_six_state_chain_option(self):
        mdp = six_state_chain(delta=0.4)
        option = six_state_option(mdp)
        self.assertEqual(mdp.n_actions, 1)
        self.assertTrue(np.allclose(mdp.transition[0, 0], [0, 0.5, 0, 0, 0.5, 0]))
        self.assertAlmostEqual(mdp.transition[1, 0, 1], 0.6)
        self.assertFalse(option.initiation[5])
        self.assertEqual(option.termination[5], 1.0)

    def test_six_state_chain_delta_range(self):
        with self.assertRaises(ModelError):
            six_state_chain(delta=0.0)

    def test_chain_slip(self):
        mdp = build_env('chain', n_states=4, slip=0.25)
        self.assertAlmostEqual(mdp.transition[1, 1, 2], 0.75)
        self.assertAlmostEqual(mdp.transition[1, 1, 0], 0.25)


class RandomMdps(SimpleTestCase):

    def test_rows_are_distributions(self):
        mdp = build_random_mdp(12, 3, seed=9)
        self.assertTrue(np.allclose(mdp.transition.sum(axis=2), 1.0))
        self.assertTrue(np.all(mdp.expected_reward >= 0.0))
        self.assertTrue(np.all(mdp.expected_reward < 1.0))

    def test_same_seed_same_mdp(self):
        first = build_random_mdp(6, 2, seed=3)
        second = build_env('random', n_states=6, n_actions=2, seed=3)
        self.assertTrue(np.array_equal(first.transition, second.transition))
        self.assertFalse(np.array_equal(first.transition,
                                        build_random_mdp(6, 2, seed=4).transition))

    def test_branching_and_sparsity(self):
        mdp = build_random_mdp(10, 2, seed=1, branching=3, reward_sparsity=1.0)
        self.assertTrue(np.all((mdp.transition > 1e-6).sum(axis=2) <= 3))
        self.assertEqual(mdp.expected_reward.max(), 0.0)
        with self.assertRaises(ModelError):
            build_random_mdp(4, 2, reward_sparsity=1.5)


class TaxiWorld(SimpleTestCase):

    def test_one_passenger(self):
        mdp = taxi_mdp([(0, 1)])
        self.assertEqual((mdp.n_states, mdp.n_actions), (75, 6))
        self.assertEqual(int(mdp.terminal.sum()), 25)
        self.assertGreater(solve_mdp(mdp).v[int(np.argmax(mdp.start_dist))], 0.0)

    def test_passenger_count(self):
        with self.assertRaises(ModelError):
            taxi_mdp([])
        self.assertEqual(build_env('taxi', passengers=2).n_states, 225)


class TaskDistributions(SimpleTestCase):

    def test_far_corners_skip_the_start(self):
        dist = TaskDistribution(EnvSpec('four_rooms'), 'far_corners')
        self.assertEqual(sorted(dist.goals), [(1, 11), (11, 1), (11, 11)])
        self.assertEqual(len(dist), 3)

    def test_tasks_share_dynamics(self):
        dist = TaskDistribution(EnvSpec('grid9', width=4, height=4), 'top_row')
        rng = make_rng(0)
        tasks = [sample_task(dist, rng) for _ in range(10)]
        for mdp in tasks:
            self.assertEqual(mdp.n_states, 16)
        first, second = dist.task((1, 4)), dist.task((4, 4))
        self.assertIs(dist.task((1, 4)), first)
        self.assertFalse(np.array_equal(first.terminal, second.terminal))

    def test_fixed_rule(self):
        dist = TaskDistribution('chain')
        self.assertEqual(dist.goals, [None])
        self.assertEqual(dist.task(None).n_states, 5)

    def test_unknown_rule(self):
        with self.assertRaises(ModelError):
            TaskDistribution(EnvSpec('grid9'), 'diagonal')
        with self.assertRaises(ModelError):
            TaskDistribution(EnvSpec('chain'), 'top_row')
