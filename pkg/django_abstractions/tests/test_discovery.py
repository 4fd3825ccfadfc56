# -*- coding: utf-8 -*-
import math

import networkx as nx
import numpy as np
from django.test import SimpleTestCase

from django_abstractions.discovery.planning import (
    a_mimo, a_momi, asymmetric_k_center, brute_force_min_options, brute_force_point_options,
    goal_state, greedy_set_cover, iteration_distance, planning_iterations,
)
from django_abstractions.discovery.spectral import (
    combinatorial_laplacian, covering_options, cover_time_bound, correlation_study,
    eigen_symmetric, eigenoptions, estimate_cover_time, expected_hitting_times,
    fiedler_improvement, graph_spectrum, laplacian, normalized_laplacian, random_connected_graph,
    walk_loops,
)
from django_abstractions.envs.base import build_env
from django_abstractions.envs.chains import chain
from django_abstractions.errors import ArgumentError, ModelError
from django_abstractions.graphs import TransitionGraph, shortest_path_policy
from django_abstractions.seeding import make_rng

__all__ = ['TransitionGraphs', 'Spectra', 'CoveringOptions', 'CoverTimes',
           'IterationDistances', 'PointOptionSearch']


def path(n):
    return TransitionGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


class TransitionGraphs(SimpleTestCase):

    def test_from_mdp(self):
        graph = TransitionGraph.from_mdp(chain(4))
        self.assertEqual(graph.n, 4)
        self.assertEqual(sorted(graph.graph.edges()), [(0, 1), (1, 2), (2, 3)])
        self.assertTrue(graph.is_connected())

    def test_relabels_nodes(self):
        graph = TransitionGraph(nx.Graph([('a', 'b'), ('b', 'b')]))
        self.assertEqual(sorted(graph.graph.nodes()), [0, 1])
        self.assertEqual(graph.n_edges, 1)

    def test_neighbour_table(self):
        table, degrees = path(3).neighbour_table()
        self.assertEqual(degrees.tolist(), [1, 2, 1])
        self.assertEqual(table.tolist(), [[1, -1], [0, 2], [1, -1]])

    def test_disconnected(self):
        with self.assertRaises(ModelError):
            TransitionGraph.from_edges(4, [(0, 1), (2, 3)]).check_connected()

    def test_shortest_path_policy(self):
        self.assertEqual(shortest_path_policy(chain(5), 0).tolist(), [0, 0, 0, 0, 0])
        self.assertEqual(shortest_path_policy(chain(5), 3).tolist()[:3], [1, 1, 1])


class Spectra(SimpleTestCase):

    def test_jacobi_on_a_small_matrix(self):
        matrix = np.array([[2.0, 1.0], [1.0, 2.0]])
        spectrum = eigen_symmetric(matrix)
        self.assertTrue(np.allclose(spectrum.values, [1.0, 3.0]))
        self.assertTrue(np.allclose(spectrum.reconstruct(), matrix))
        self.assertGreater(spectrum.vectors[0, 0], 0.0)
        self.assertGreater(spectrum.vectors[0, 1], 0.0)

    def test_jacobi_rejects_asymmetric_input(self):
        with self.assertRaises(ArgumentError):
            eigen_symmetric([[1.0, 2.0], [0.0, 1.0]])
        with self.assertRaises(ArgumentError):
            eigen_symmetric([1.0, 2.0])

    def test_path_spectrum(self):
        laplacian = normalized_laplacian(path(3))
        self.assertAlmostEqual(laplacian[0, 1], -1.0 / math.sqrt(2.0))
        spectrum = graph_spectrum(path(4))
        self.assertTrue(np.allclose(spectrum.values, [0.0, 0.5, 1.5, 2.0]))
        self.assertAlmostEqual(spectrum.lambda2, 0.5)
        self.assertTrue(spectrum.connected)

    def test_agrees_with_numpy(self):
        graph = random_connected_graph(9, 0.4, make_rng(3))
        expected = np.linalg.eigvalsh(normalized_laplacian(graph))
        self.assertTrue(np.allclose(graph_spectrum(graph).values, expected, atol=1e-8))

    def test_converges_on_many_small_graphs(self):
        for index in range(300):
            graph = random_connected_graph(10, 0.3, make_rng(index))
            spectrum = graph_spectrum(graph)
            self.assertLess(spectrum.sweeps, 20)
            self.assertTrue(spectrum.connected)
            expected = np.linalg.eigvalsh(normalized_laplacian(graph))
            self.assertTrue(np.allclose(spectrum.values, expected, atol=1e-8))

    def test_combinatorial_spectrum(self):
        self.assertEqual(combinatorial_laplacian(path(3)).tolist(),
                         [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
        spectrum = graph_spectrum(path(3), kind='combinatorial')
        self.assertTrue(np.allclose(spectrum.values, [0.0, 1.0, 3.0]))
        with self.assertRaises(ArgumentError):
            laplacian(path(3), 'signless')

    def test_open_grid_connectivity(self):
        grid = TransitionGraph(nx.grid_2d_graph(9, 9))
        spectrum = graph_spectrum(grid, kind='combinatorial')
        self.assertAlmostEqual(spectrum.lambda2, 2.0 - 2.0 * math.cos(math.pi / 9), places=8)
        self.assertAlmostEqual(spectrum.lambda2, 0.12, delta=0.012)

    def test_fiedler_improvement(self):
        spectrum = graph_spectrum(path(4))
        bound = fiedler_improvement(spectrum, 0, 3)
        self.assertAlmostEqual(bound, (4.0 / 3.0) / 7.5)
        self.assertLess(bound, 1.0 - spectrum.lambda2)
        with self.assertRaises(ArgumentError):
            fiedler_improvement(graph_spectrum(path(2)), 0, 1)


class CoveringOptions(SimpleTestCase):

    def test_joins_the_ends_of_a_path(self):
        result = covering_options(path(4), 2)
        self.assertEqual(result.pairs, [(0, 3)])
        self.assertAlmostEqual(result.lambda2_before, 0.5)
        self.assertAlmostEqual(result.lambda2_after, 1.0)
        self.assertIsNone(result.options)
        self.assertEqual(result.graph.n_edges, 4)

    def test_options_on_an_mdp(self):
        result = covering_options(chain(4), 2)
        self.assertEqual(len(result.options), 2)
        self.assertEqual((result.options[0].init_state, result.options[0].term_state), (0, 3))
        self.assertEqual(result.options[0].name, 's0->s3')
        self.assertEqual((result.options[1].init_state, result.options[1].term_state), (3, 0))

    def test_one_pair_per_two_options(self):
        result = covering_options(random_connected_graph(12, 0.2, make_rng(5)), 6)
        self.assertEqual(len(result.pairs), 3)
        self.assertEqual(len(result.history), 3)
        self.assertEqual(result.lambda2_after, result.history[-1])

    def test_eigenoptions(self):
        result = eigenoptions(path(4), 2)
        self.assertEqual(result.pairs, [(0, 3)])
        self.assertEqual(result.history, [result.lambda2_after])
        with self.assertRaises(ArgumentError):
            eigenoptions(path(4), 8)

    def test_invalid_k(self):
        with self.assertRaises(ArgumentError):
            covering_options(path(4), 3)
        with self.assertRaises(ArgumentError):
            eigenoptions(path(4), -2)
        with self.assertRaises(ModelError):
            covering_options(TransitionGraph.from_edges(3, [(0, 1)]), 2)


class CoverTimes(SimpleTestCase):

    def test_two_vertices(self):
        estimate = estimate_cover_time(path(2), n_trajectories=50)
        self.assertEqual(estimate.mean, 1.0)
        self.assertEqual(estimate.half_width, 0.0)

    def test_path_from_an_end(self):
        estimate = estimate_cover_time(path(3), n_trajectories=4000, seed=2)
        self.assertAlmostEqual(estimate.mean, 4.0, delta=0.5)
        self.assertGreater(estimate.half_width, 0.0)

    def test_worst_start(self):
        estimate = estimate_cover_time(path(3), n_trajectories=4000, seed=2, start='max')
        self.assertEqual(estimate.start, 1)
        self.assertAlmostEqual(estimate.mean, 5.0, delta=0.5)

    def test_first_visit_times(self):
        estimate = estimate_cover_time(path(3), n_trajectories=4000, seed=2)
        self.assertAlmostEqual(estimate.hitting, 4.0, delta=0.5)
        estimate = estimate_cover_time(path(3), n_trajectories=4000, seed=2, start=1)
        self.assertAlmostEqual(estimate.hitting, 3.0, delta=0.4)
        self.assertAlmostEqual(estimate.mean, 5.0, delta=0.5)

    def test_exact_hitting_times(self):
        hitting = expected_hitting_times(path(3))
        self.assertAlmostEqual(hitting[0, 2], 4.0)
        self.assertAlmostEqual(hitting[1, 0], 3.0)
        self.assertAlmostEqual(hitting[2, 2], 0.0)
        self.assertAlmostEqual(expected_hitting_times(path(2), [1, 1])[0, 1], 2.0)

    def test_staying_on_bumps(self):
        self.assertEqual(walk_loops(path(3), 2).tolist(), [1, 0, 1])
        loops = walk_loops(path(2), 2)
        estimate = estimate_cover_time(path(2), n_trajectories=4000, seed=1, loops=loops)
        self.assertAlmostEqual(estimate.mean, 2.0, delta=0.2)
        with self.assertRaises(ArgumentError):
            estimate_cover_time(path(2), loops=[1])

    def test_open_grid_corner_to_corner(self):
        grid = build_env('grid9')
        graph = TransitionGraph.from_mdp(grid)
        loops = walk_loops(graph, grid.n_actions)
        start = int(np.argmax(grid.start_dist))
        self.assertEqual(loops[start], 2)
        exact = expected_hitting_times(graph, loops)[start].max()
        self.assertAlmostEqual(exact, 460.5, delta=0.05 * 460.5)
        estimate = estimate_cover_time(graph, 4000, seed=0, start=start, loops=loops)
        self.assertAlmostEqual(estimate.hitting, exact, delta=0.05 * exact)
        self.assertGreater(estimate.mean, estimate.hitting)

    def test_same_seed_same_estimate(self):
        graph = random_connected_graph(6, 0.5, make_rng(0))
        self.assertEqual(estimate_cover_time(graph, 200, seed=4),
                         estimate_cover_time(graph, 200, seed=4))

    def test_invalid_arguments(self):
        with self.assertRaises(ArgumentError):
            estimate_cover_time(path(3), n_trajectories=0)
        with self.assertRaises(ArgumentError):
            estimate_cover_time(path(3), start=7)

    def test_bound(self):
        self.assertAlmostEqual(cover_time_bound(1.0, 3), 9 * math.log(3))
        with self.assertRaises(ArgumentError):
            cover_time_bound(0.0, 3)

    def test_random_connected_graph(self):
        graph = random_connected_graph(8, 0.5, make_rng(1))
        self.assertTrue(graph.is_connected())
        self.assertEqual(graph.n_edges, 14)
        self.assertEqual(random_connected_graph(8, 0.0, make_rng(1)).n_edges, 7)
        with self.assertRaises(ArgumentError):
            random_connected_graph(8, 1.5)

    def test_correlation_study(self):
        lambdas, covers, rho = correlation_study(n_graphs=6, n=8, density=0.4,
                                                 n_trajectories=50, seed=1)
        self.assertEqual((len(lambdas), len(covers)), (6, 6))
        self.assertTrue(-1.0 <= rho <= 1.0)
        with self.assertRaises(ArgumentError):
            correlation_study(n_graphs=2)


class IterationDistances(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4)
        self.distance = iteration_distance(self.mdp)

    def test_goal_state(self):
        self.assertEqual(goal_state(self.mdp), 3)
        with self.assertRaises(ModelError):
            goal_state(build_env('russell_norvig'))

    def test_option_free_sweeps(self):
        self.assertEqual(self.distance.plain.tolist(), [3, 2, 1, 0])
        self.assertEqual(planning_iterations(self.mdp), 3)

    def test_distance_matrix(self):
        self.assertEqual(self.distance.distance.tolist(), [
            [0, 1, 2, 2],
            [1, 0, 1, 1],
            [0, 0, 0, 0],
            [0, 0, 0, 0],
        ])

    def test_eps_must_be_positive(self):
        with self.assertRaises(ArgumentError):
            iteration_distance(self.mdp, eps=0.0)


class PointOptionSearch(SimpleTestCase):

    def setUp(self):
        self.mdp = chain(4)

    def test_greedy_set_cover(self):
        subsets = {'a': set([1, 2]), 'b': set([3]), 'c': set([2, 3])}
        self.assertEqual(greedy_set_cover([1, 2, 3], subsets), ['a', 'b'])
        with self.assertRaises(ArgumentError):
            greedy_set_cover([1, 4], subsets)

    def test_a_momi(self):
        options = a_momi(self.mdp, ell=1)
        self.assertEqual([option.init_state for option in options], [0, 1])
        self.assertTrue(all(option.term_state == 3 for option in options))
        self.assertEqual(planning_iterations(self.mdp, options), 1)
        self.assertEqual(len(a_momi(self.mdp, ell=2)), 1)
        self.assertEqual(a_momi(self.mdp, ell=3), [])
        with self.assertRaises(ArgumentError):
            a_momi(self.mdp, ell=0)

    def test_asymmetric_k_center(self):
        distance = iteration_distance(self.mdp)
        self.assertEqual(asymmetric_k_center(distance.distance, distance.plain, 1), [0])
        self.assertEqual(sorted(asymmetric_k_center(distance.distance, distance.plain, 2)),
                         [0, 1])

    def test_a_mimo(self):
        options = a_mimo(self.mdp, k=1)
        self.assertEqual(len(options), 1)
        self.assertEqual(options[0].name, 's0->s3')
        self.assertEqual(planning_iterations(self.mdp, options), 2)
        with self.assertRaises(ArgumentError):
            a_mimo(self.mdp, k=0)

    def test_brute_force_point_options(self):
        options, sweeps = brute_force_point_options(self.mdp, k=1)
        self.assertEqual(sweeps, 2)
        self.assertEqual(options[0].init_state, 0)
        self.assertEqual(brute_force_point_options(self.mdp, k=0), ([], 3))

    def test_brute_force_matches_a_momi(self):
        options = brute_force_min_options(self.mdp, ell=1)
        self.assertEqual([option.init_state for option in options], [0, 1])
        self.assertEqual(brute_force_min_options(self.mdp, ell=3), [])

    def test_enumeration_limit(self):
        with self.assertRaises(ArgumentError):
            brute_force_point_options(self.mdp, k=1, targets='all', max_subsets=5)
        with self.assertRaises(ArgumentError):
            brute_force_point_options(self.mdp, targets='nearby')
