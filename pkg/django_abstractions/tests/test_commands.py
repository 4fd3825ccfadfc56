# -*- coding: utf-8 -*-
import json
import os
import shutil
import tempfile
from io import StringIO

from mock import Mock, patch
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from django_abstractions.harness.targets import Comparison, ReproduceReport
from django_abstractions.management.commands.abstractions import parse_assignments

__all__ = ['AbstractionsCommand', 'Assignments']

ASSETS = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'assets')
EXPERIMENTS = os.path.join(ASSETS, 'experiments')
COMMAND = 'django_abstractions.management.commands.abstractions'


class AbstractionsCommand(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.mkdtemp()
        self.stdout = StringIO()

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def call(self, *args):
        call_command('abstractions', *args, stdout=self.stdout)
        return self.stdout.getvalue()

    def test_plan(self):
        output = self.call('plan', '--env', 'chain', '--env-option', 'n_states=3')
        result = json.loads(output)
        self.assertEqual(result['env']['n_states'], 3)
        self.assertEqual(result['iterations'], 3)
        self.assertAlmostEqual(result['start_value'], 0.95)

    def test_plan_with_a_config(self):
        output = self.call('plan', '--config', os.path.join(EXPERIMENTS, 'plan-chain.json'),
                           '--out', self.tmp)
        self.assertIn('delta=0.0001 iterations: 4 +- 0 (n=2)', output)
        self.assertIn('raw: %s' % os.path.join(self.tmp, 'raw.csv'), output)
        self.assertIn('plot: %s' % os.path.join(self.tmp, 'plan.svg'), output)
        self.assertTrue(os.path.exists(os.path.join(self.tmp, 'summary.csv')))

    @patch(COMMAND + '.run_experiment')
    def test_experiment_defaults_come_from_the_workspace(self, run_experiment):
        run_experiment.return_value = Mock(summaries=[], raw_path='raw.csv',
                                           summary_path='summary.csv', plot_path=None)
        output = self.call('dibs', '--env', 'chain', '--env-option', 'n_states=4',
                           '--param', 'softening=0.2', '--n-seeds', '3', '--jobs', '2')
        config = run_experiment.call_args[0][0]
        self.assertEqual((config.kind, config.n_seeds), ('dibs', 3))
        self.assertEqual(config.params['softening'], 0.2)
        self.assertEqual(config.env['n_states'], 4)
        kwargs = run_experiment.call_args[1]
        self.assertEqual(kwargs['jobs'], 2)
        self.assertEqual(kwargs['seed'], 3)
        self.assertEqual(kwargs['out'], '%s/dibs' % os.path.join(ASSETS, 'results'))
        self.assertEqual(output.splitlines(), ['raw: raw.csv', 'summary: summary.csv'])

    @patch(COMMAND + '.run_experiment')
    def test_config_keeps_its_own_seed(self, run_experiment):
        run_experiment.return_value = Mock(summaries=[], raw_path='raw.csv',
                                           summary_path='summary.csv', plot_path=None)
        self.call('dibs', '--config', os.path.join(EXPERIMENTS, 'dibs-chain.json'),
                  '--param', 'delta_conv=0.01')
        config = run_experiment.call_args[0][0]
        self.assertEqual(config.params, {'softening': 0.1, 'delta_conv': 0.01, 'starts': 'start'})
        self.assertEqual(config.root_seed, 7)
        self.assertIsNone(run_experiment.call_args[1]['seed'])

    def test_invalid_invocations(self):
        with self.assertRaises(CommandError):
            self.call('dibs', '--config', os.path.join(EXPERIMENTS, 'plan-chain.json'))
        with self.assertRaisesRegex(CommandError, 'needs --config or --env'):
            self.call('dibs')
        with self.assertRaisesRegex(CommandError, 'expects NAME=VALUE'):
            self.call('dibs', '--env', 'chain', '--param', 'beta')
        with self.assertRaises(CommandError):
            self.call('plan', '--env', 'maze')
        with self.assertRaises(CommandError):
            self.call('plan', '--env', 'chain', '--env-option', 'n_states=1')

    def test_reproduce_list(self):
        names = self.call('reproduce', '--list').splitlines()
        self.assertIn('pac-sample-size', names)
        self.assertIn('learning-curves-grid9', names)

    @patch(COMMAND + '.reproduce')
    def test_reproduce_failure(self, reproduce):
        reproduce.return_value = ReproduceReport([
            Comparison('stub', 'x', 2.0, 1.0, 0.1, 'relative', False),
            Comparison('stub', 'y', None, None, None, 'report', True),
        ], False, None)
        with self.assertRaisesRegex(CommandError, '1 of 2 comparisons failed'):
            self.call('reproduce', 'stub', '--eigenoptions')
        reproduce.assert_called_once_with(['stub'], extended=False, eigenoptions=True, seed=3,
                                          out=None)
        lines = self.stdout.getvalue().splitlines()
        self.assertTrue(lines[0].startswith('FAIL stub:x'))
        self.assertTrue(lines[1].startswith('PASS stub:y'))


class Assignments(SimpleTestCase):

    def test_parse_assignments(self):
        self.assertEqual(parse_assignments(['a=1', ' b = x=y '], '--param'),
                         {'a': '1', 'b': 'x=y'})
        self.assertEqual(parse_assignments(None, '--param'), {})
        with self.assertRaises(CommandError):
            parse_assignments(['=1'], '--param')
