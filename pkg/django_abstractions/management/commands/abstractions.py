# -*- coding: utf-8 -*-
import json

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from ...envs.base import EnvSpec
from ...errors import AbstractionError
from ...harness.config import ExperimentConfig
from ...harness.experiments import experiment_names
from ...harness.runner import run_experiment
from ...harness.targets import reproduce, target_names
from ...workspace import Workspace

__all__ = ['Command', 'parse_assignments']


def parse_assignments(items, flag):
    """['a=1', 'b=x'] -> {'a': '1', 'b': 'x'}; values are coerced later
    against the declared options."""
    result = {}
    for item in items or []:
        name, sep, value = item.partition('=')
        if not sep or not name:
            raise CommandError("%s expects NAME=VALUE, got '%s'" % (flag, item))
        result[name.strip()] = value.strip()
    return result


class Command(BaseCommand):
    help = 'Runs planning, learning, abstraction and option experiments.'

    def add_arguments(self, parser):
        parser.add_argument('--workspace', dest='workspace', default=None,
                            help='workspace INI file (defaults to settings)')
        subparsers = parser.add_subparsers(dest='subcommand', parser_class=CommandParser)
        subparsers.required = True

        plan = subparsers.add_parser('plan', help='value iteration on one environment')
        plan.add_argument('--env', default='four_rooms', help='environment variant')
        plan.add_argument('--env-option', action='append', dest='env_options',
                          metavar='NAME=VALUE', help='environment option')
        self._add_run_arguments(plan)

        for kind in experiment_names():
            if kind == 'plan':
                continue
            sub = subparsers.add_parser(kind, help='run a %s experiment' % kind)
            sub.add_argument('--env', default=None, help='environment variant')
            sub.add_argument('--env-option', action='append', dest='env_options',
                             metavar='NAME=VALUE', help='environment option')
            self._add_run_arguments(sub)

        targets = subparsers.add_parser('reproduce', help='check pinned reproductions')
        targets.add_argument('targets', nargs='*', metavar='TARGET',
                             help='target ids (default: every quantitative target)')
        targets.add_argument('--extended', action='store_true', default=False,
                             help='also run the learning-curve targets')
        targets.add_argument('--eigenoptions', action='store_true', default=False,
                             help='add eigenoption rows to the connectivity table')
        targets.add_argument('--seed', type=int, default=None, help='root seed')
        targets.add_argument('--out', default=None, help='output directory')
        targets.add_argument('--list', action='store_true', default=False,
                             help='list the registered targets and exit')

    def _add_run_arguments(self, parser):
        parser.add_argument('--config', default=None, help='experiment JSON file')
        parser.add_argument('--param', action='append', dest='params', metavar='NAME=VALUE',
                            help='experiment parameter')
        parser.add_argument('--seed', type=int, default=None, help='root seed')
        parser.add_argument('--n-seeds', type=int, default=None, dest='n_seeds',
                            help='seeds per grid cell')
        parser.add_argument('--out', default=None, help='output directory')
        parser.add_argument('--jobs', type=int, default=None, help='worker processes')

    def get_workspace(self, options):
        config = options.get('workspace') or getattr(settings, 'ABSTRACTIONS_CONFIG_FILE', None)
        experiments_dir = getattr(settings, 'ABSTRACTIONS_EXPERIMENTS_DIR', None)
        return Workspace(config=config, experiments_dir=experiments_dir)

    def handle(self, *args, **options):
        try:
            workspace = self.get_workspace(options)
            subcommand = options['subcommand']
            if subcommand == 'reproduce':
                return self.handle_reproduce(workspace, options)
            if subcommand == 'plan' and not options.get('config'):
                return self.handle_plan(workspace, options)
            return self.handle_experiment(workspace, subcommand, options)
        except AbstractionError as e:
            raise CommandError(str(e))

    def _env_spec(self, variant, options):
        return EnvSpec(variant, **parse_assignments(options.get('env_options'), '--env-option'))

    def handle_plan(self, workspace, options):
        result = workspace.plan(self._env_spec(options['env'], options))
        self.stdout.write(json.dumps(result, indent=2))

    def experiment_config(self, kind, options):
        if options.get('config'):
            config = ExperimentConfig.from_file(options['config'])
            if config.kind != kind:
                raise CommandError("'%s' is a %s experiment, not %s"
                                   % (options['config'], config.kind, kind))
            params = dict(config.params)
            params.update(parse_assignments(options.get('params'), '--param'))
            changes = {"params": params}
            if options.get('env'):
                changes["env"] = self._env_spec(options['env'], options).to_dict()
        else:
            if not options.get('env'):
                raise CommandError("%s needs --config or --env" % kind)
            spec = self._env_spec(options['env'], options)
            config = ExperimentConfig(kind, kind, spec,
                                      params=parse_assignments(options.get('params'), '--param'))
            changes = {}
        if options.get('n_seeds') is not None:
            changes["n_seeds"] = options['n_seeds']
        return config.replace(**changes) if changes else config

    def handle_experiment(self, workspace, kind, options):
        config = self.experiment_config(kind, options)
        seed = options.get('seed')
        if seed is None and not options.get('config'):
            seed = workspace.config.root_seed
        jobs = options.get('jobs') or workspace.config.jobs
        out = options.get('out') or config.output_dir
        if not out:
            out = '%s/%s' % (workspace.config.output_dir, config.name)
        artifacts = run_experiment(config, out=out, jobs=jobs, seed=seed)
        for summary in artifacts.summaries:
            cell = ' '.join('%s=%s' % item for item in summary.cell.items())
            self.stdout.write('%s %s: %.6g +- %.3g (n=%d)' % (
                cell, summary.metric, summary.mean, summary.half_width, summary.n))
        self.stdout.write('raw: %s' % artifacts.raw_path)
        self.stdout.write('summary: %s' % artifacts.summary_path)
        if artifacts.plot_path:
            self.stdout.write('plot: %s' % artifacts.plot_path)

    def handle_reproduce(self, workspace, options):
        if options.get('list'):
            for name in target_names():
                self.stdout.write(name)
            return
        seed = options.get('seed')
        if seed is None:
            seed = workspace.config.root_seed
        report = reproduce(options.get('targets'), extended=options['extended'],
                           eigenoptions=options['eigenoptions'], seed=seed,
                           out=options.get('out'))
        for comparison in report.comparisons:
            self.stdout.write('%s %-32s measured=%-12s expected=%-14s %s' % (
                'PASS' if comparison.passed else 'FAIL', comparison.target + ':' + comparison.name,
                _format(comparison.measured), _format(comparison.expected), comparison.check))
        if report.path:
            self.stdout.write('comparisons: %s' % report.path)
        failed = [comparison for comparison in report.comparisons if not comparison.passed]
        if failed:
            raise CommandError('%d of %d comparisons failed' % (len(failed),
                                                                len(report.comparisons)))


def _format(value):
    if isinstance(value, float):
        return '%.6g' % value
    return str(value)
