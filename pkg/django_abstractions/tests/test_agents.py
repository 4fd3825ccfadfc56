# -*- coding: utf-8 -*-
import io

import numpy as np
from django.test import SimpleTestCase

from django_abstractions.abstraction.core import StateAbstraction
from django_abstractions.agents.base import (
    AgentParams, LearningRecord, agent_names, get_agent, select_epsilon_greedy,
)
from django_abstractions.agents.runs import (
    make_agent, records_to_csv, run_agent, run_lifelong, run_q_learning, run_random_agent,
    run_rmax, wrap_with_state_abstraction,
)
from django_abstractions.agents.tabular import DelayedQAgent, QLearningAgent, RMaxAgent
from django_abstractions.envs.base import EnvSpec
from django_abstractions.envs.chains import chain
from django_abstractions.envs.tasks import TaskDistribution
from django_abstractions.errors import ArgumentError
from django_abstractions.seeding import make_rng

__all__ = ['AgentParameters', 'ActionSelection', 'TabularLearners', 'LearningRuns']


class AgentParameters(SimpleTestCase):

    def test_defaults(self):
        params = AgentParams()
        self.assertEqual(params.alpha, 0.1)
        self.assertEqual(params.q_init, 'zero')
        self.assertEqual(AgentParams.from_dict(params.to_dict()), params)

    def test_invalid_values(self):
        with self.assertRaises(ArgumentError):
            AgentParams(alpha=1.5)
        with self.assertRaises(ArgumentError):
            AgentParams(q_init='pessimistic')
        with self.assertRaises(ArgumentError):
            AgentParams(m=0)
        with self.assertRaises(ArgumentError):
            AgentParams.from_dict({"gamma": 0.9})

    def test_replace(self):
        params = AgentParams(seed=3).replace(episodes=7)
        self.assertEqual((params.seed, params.episodes), (3, 7))

    def test_registry(self):
        self.assertEqual(set(agent_names()), set(['q_learning', 'rmax', 'delayed_q', 'random']))
        self.assertIs(get_agent('rmax'), RMaxAgent)
        with self.assertRaises(ArgumentError):
            get_agent('sarsa')


class ActionSelection(SimpleTestCase):

    def test_greedy_breaks_ties_low(self):
        q = np.array([[0.0, 1.0, 1.0]])
        self.assertEqual(select_epsilon_greedy(q, 0, 0.0, make_rng(0)), 1)

    def test_full_exploration_never_picks_greedy(self):
        q = np.array([[0.0, 1.0, 0.0]])
        rng = make_rng(1)
        picks = [select_epsilon_greedy(q, 0, 1.0, rng) for _ in range(200)]
        self.assertNotIn(1, picks)
        self.assertEqual(set(picks), set([0, 2]))

    def test_single_action(self):
        self.assertEqual(select_epsilon_greedy(np.zeros((1, 1)), 0, 1.0, make_rng(0)), 0)

    def test_epsilon_range(self):
        with self.assertRaises(ArgumentError):
            select_epsilon_greedy(np.zeros((1, 2)), 0, -0.1, make_rng(0))


class TabularLearners(SimpleTestCase):

    def test_q_learning_update(self):
        agent = QLearningAgent(2, 2, 0.9, 1.0, AgentParams(alpha=0.5), make_rng(0))
        agent.q[1] = [2.0, 4.0]
        agent.observe(0, 1, 1.0, 1, False)
        self.assertAlmostEqual(agent.q[0, 1], 0.5 * (1.0 + 0.9 * 4.0))
        agent.observe(0, 0, 1.0, 1, True)
        self.assertAlmostEqual(agent.q[0, 0], 0.5)

    def test_optimistic_initialisation(self):
        agent = QLearningAgent(3, 2, 0.5, 1.0, AgentParams(q_init='optimistic'))
        self.assertTrue(np.all(agent.values() == 2.0))

    def test_rmax_unknown_pairs_are_worth_v_max(self):
        agent = RMaxAgent(3, 2, 0.5, 1.0, AgentParams(m=2))
        model = agent.model()
        self.assertEqual(model.transition[1, 0, 1], 1.0)
        self.assertEqual(model.expected_reward[1, 0], 1.0)
        self.assertTrue(np.all(agent.values() == 2.0))

    def test_rmax_replans_when_a_pair_becomes_known(self):
        agent = RMaxAgent(3, 2, 0.5, 1.0, AgentParams(m=2))
        agent.observe(0, 0, 0.0, 1, False)
        self.assertEqual(agent.plans, 0)
        agent.observe(0, 0, 0.0, 1, False)
        self.assertEqual(agent.plans, 1)
        self.assertTrue(agent.known[0, 0])
        self.assertAlmostEqual(agent.q[0, 0], 0.5 * 2.0, places=3)

    def test_rmax_cycles_through_ties(self):
        agent = RMaxAgent(1, 3, 0.5, 1.0, AgentParams())
        self.assertEqual([agent.act(0) for _ in range(4)], [0, 1, 2, 0])

    def test_delayed_q_batches_updates(self):
        agent = DelayedQAgent(2, 1, 0.5, 1.0, AgentParams(m=2, epsilon1=0.01))
        agent.observe(0, 0, 0.0, 1, True)
        self.assertEqual(agent.q[0, 0], 2.0)
        agent.observe(0, 0, 0.0, 1, True)
        self.assertAlmostEqual(agent.q[0, 0], 0.01)

    def test_delayed_q_stops_after_a_failed_attempt(self):
        agent = DelayedQAgent(2, 1, 0.5, 1.0, AgentParams(m=1, epsilon1=0.01))
        agent.observe(0, 0, 0.0, 1, True)
        agent.observe(0, 0, 0.0, 1, True)
        self.assertFalse(agent.learning[0, 0])


class LearningRuns(SimpleTestCase):

    def test_rmax_learns_the_chain(self):
        record = run_rmax(chain(4), AgentParams(m=1, episodes=20, horizon=20, seed=5))
        self.assertEqual(record.episodes, 20)
        self.assertEqual(record.rewards[-1], 1.0)
        self.assertEqual(record.steps[-1], 3)

    def test_runs_are_reproducible(self):
        mdp = chain(5, slip=0.2)
        params = AgentParams(episodes=10, horizon=30, seed=11)
        self.assertEqual(run_q_learning(mdp, params), run_q_learning(mdp, params))
        other = run_random_agent(mdp, params.replace(seed=12))
        self.assertEqual(other.agent, 'random')

    def test_episodes_stop_at_the_horizon(self):
        record = run_random_agent(chain(30), AgentParams(episodes=3, horizon=4))
        self.assertEqual(record.steps, [4, 4, 4])
        self.assertEqual(record.total_reward, 0.0)

    def test_state_abstraction_wrapper(self):
        mdp = chain(4)
        phi = StateAbstraction([0, 0, 1, 2])
        agent = wrap_with_state_abstraction('q_learning', phi, mdp, AgentParams())
        self.assertEqual(agent.name, 'q_learning+phi')
        self.assertEqual(agent.values().shape, (3, 2))
        record = run_agent('q_learning', mdp, AgentParams(episodes=2, horizon=5), phi=phi)
        self.assertEqual(record.agent, 'q_learning+phi')
        with self.assertRaises(ArgumentError):
            make_agent('q_learning', chain(5), AgentParams(), phi=phi)
        with self.assertRaises(ArgumentError):
            wrap_with_state_abstraction('q_learning', None, mdp, AgentParams())

    def test_lifelong(self):
        dist = TaskDistribution(EnvSpec('grid9', width=3, height=3), 'top_row')
        records = run_lifelong(dist, 'rmax', AgentParams(episodes=2, horizon=10, seed=1), 4)
        self.assertEqual(len(records), 4)
        self.assertEqual(len(set(record.seed for record in records)), 4)
        with self.assertRaises(ArgumentError):
            run_lifelong(dist, 'rmax', AgentParams(), 0)

    def test_records_to_csv(self):
        record = LearningRecord('q_learning', 'chain', 0, [0.0, 1.0, 1.0], [5, 3, 3])
        self.assertEqual(record.cumulative().tolist(), [0.0, 1.0, 2.0])
        stream = io.StringIO()
        self.assertEqual(records_to_csv([record, record], stream), 6)
        lines = stream.getvalue().splitlines()
        self.assertEqual(lines[0], 'episode,cumulative_reward,steps,seed,agent,env')
        self.assertEqual(lines[3], '2,2.0,3,0,q_learning,chain')

    def test_record_validation(self):
        with self.assertRaises(ArgumentError):
            LearningRecord('random', 'chain', 0, [0.0], [1, 2])
        with self.assertRaises(ArgumentError):
            LearningRecord('random', 'chain', 0, [float('nan')], [1])
