# -*- coding: utf-8 -*-
import logging
import os

from django.test import SimpleTestCase

from django_abstractions import __version__
from django_abstractions.errors import (
    ConfigurationError, ModelError, NoSuchEnvironmentError, NoSuchExperimentError,
    NoSuchTargetError,
)
from django_abstractions.harness.config import WorkspaceConfig
from django_abstractions.workspace import Workspace

__all__ = ['WorkspaceBrowsing']

ASSETS = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'assets')


class WorkspaceBrowsing(SimpleTestCase):

    def setUp(self):
        self.workspace = Workspace(os.path.join(ASSETS, 'abstractions.ini'))

    def test_logger_follows_the_config(self):
        self.assertEqual(self.workspace.logger.name, 'abstractions')
        self.assertEqual(self.workspace.logger.level, logging.ERROR)

    def test_info(self):
        info = self.workspace.info()
        self.assertEqual(info["version"], __version__)
        self.assertEqual(info["root_seed"], 3)
        self.assertEqual(info["delta"], 1e-8)
        self.assertIn('chain', info["environments"])
        self.assertIn('rmax', info["agents"])
        self.assertIn('dibs', info["experiment_kinds"])
        self.assertIn('bound-audits', info["targets"])

    def test_env_spec(self):
        spec = self.workspace.env_spec('chain', {"n_states": "3"})
        self.assertEqual(spec["n_states"], 3)
        with self.assertRaises(NoSuchEnvironmentError):
            self.workspace.env_spec('maze')
        with self.assertRaises(ConfigurationError):
            self.workspace.env_spec('chain', {"speed": "2"})

    def test_model(self):
        model = self.workspace.model(self.workspace.env_spec('chain', {"n_states": 3}))
        self.assertEqual((model["n_states"], model["n_actions"]), (3, 2))
        self.assertEqual(model["terminal"], [2])
        self.assertEqual(model["state_labels"], ['s0', 's1', 's2'])

    def test_plan(self):
        plan = self.workspace.plan(self.workspace.env_spec('chain', {"n_states": 3}))
        self.assertEqual(plan["iterations"], 3)
        self.assertAlmostEqual(plan["start_value"], 0.95)
        self.assertEqual(plan["policy"][:2], [1, 1])
        self.assertEqual(plan["env"]["variant"], 'chain')

    def test_ascii_map(self):
        lines = self.workspace.ascii_map(self.workspace.env_spec('four_rooms')).split('\n')
        self.assertEqual(len(lines), 11)
        self.assertEqual(lines[0], '.....#....G')
        self.assertEqual(lines[-1], 'S....#.....')
        with self.assertRaises(ModelError):
            self.workspace.ascii_map(self.workspace.env_spec('chain'))

    def test_experiments(self):
        listed = self.workspace.list_experiments()
        self.assertEqual([item["name"] for item in listed], ['dibs-chain', 'plan-chain'])
        self.assertEqual(listed[1]["cells"], 2)
        self.assertEqual(self.workspace.experiment('plan-chain').kind, 'plan')
        with self.assertRaises(NoSuchExperimentError):
            self.workspace.experiment('missing')

    def test_without_an_experiments_directory(self):
        workspace = Workspace(WorkspaceConfig())
        with self.assertRaises(ConfigurationError):
            workspace.experiments()
        workspace = Workspace(experiments_dir=os.path.join(ASSETS, 'experiments'))
        self.assertEqual(len(workspace.experiments()), 2)

    def test_targets(self):
        described = self.workspace.target('pac-sample-size')
        self.assertEqual(described["name"], 'pac-sample-size')
        self.assertFalse(described["extended"])
        self.assertTrue(any(item["name"] == 'cover-time-grid9'
                            for item in self.workspace.list_targets()))
        with self.assertRaises(NoSuchTargetError):
            self.workspace.target('fig-99')
