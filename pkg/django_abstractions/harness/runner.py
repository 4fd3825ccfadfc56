# -*- coding: utf-8 -*-
"""Runs every (grid cell, seed) of an experiment and writes its artifacts.

Seeds come from the experiment's root seed and the (cell, seed) indices,
and results are merged in task order, so the CSV files do not depend on
the number of workers."""
import csv
import os
from collections import OrderedDict, namedtuple
from concurrent.futures import ProcessPoolExecutor

from ..errors import AbstractionError, ConfigurationError
from ..logging import get_logger
from ..seeding import derive_seed
from .config import DEFAULT_OUTPUT_DIR, ExperimentConfig
from .experiments import get_experiment
from .plots import summary_plot
from .stats import aggregate, summaries_to_rows

__all__ = ['ExperimentArtifacts', 'run_experiment', 'experiment_tasks', 'write_rows']

RAW_FILE = 'raw.csv'
SUMMARY_FILE = 'summary.csv'

ExperimentArtifacts = namedtuple('ExperimentArtifacts', [
    'config', 'directory', 'raw_path', 'summary_path', 'plot_path', 'rows', 'summaries',
])


def experiment_tasks(config):
    """(cell index, cell, seed index, seed) for every run, in order."""
    tasks = []
    for cell_index, cell in enumerate(config.cells()):
        for seed_index in range(config.n_seeds):
            seed = derive_seed(config.root_seed, cell_index, seed_index)
            tasks.append((cell_index, cell, seed_index, seed))
    return tasks


def _run_task(document, cell_index, cell, seed_index, seed):
    config = ExperimentConfig.from_dict(document)
    experiment = config.experiment(config.env, config.params)
    rows = []
    for row in experiment.run(cell, seed):
        full = OrderedDict([("cell", cell_index)])
        full.update(cell)
        full["seed_index"] = seed_index
        full["seed"] = seed
        full.update(row)
        rows.append(full)
    return rows


def write_rows(rows, path):
    """Writes dict rows to CSV; the header is the union of keys in order of
    first appearance."""
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    with open(path, 'w', newline='') as stream:
        writer = csv.DictWriter(stream, fieldnames=columns, restval='')
        writer.writeheader()
        for row in rows:
            writer.writerow(dict((key, '' if value is None else value)
                                 for key, value in row.items()))
    return len(rows)


def _output_dir(config, out):
    directory = out or config.output_dir or os.path.join(DEFAULT_OUTPUT_DIR, config.name)
    try:
        os.makedirs(directory, exist_ok=True)
    except OSError as e:
        raise ConfigurationError("Cannot create output directory '%s': %s" % (directory, e))
    if not os.access(directory, os.W_OK):
        raise ConfigurationError("Output directory '%s' is not writable" % directory)
    return directory


def run_experiment(config, out=None, jobs=1, seed=None, plot=True):
    """Executes `config` and writes raw.csv, summary.csv and <kind>.svg.

    `seed` replaces the root seed and `jobs` > 1 spreads the runs over a
    process pool."""
    if isinstance(config, dict):
        config = ExperimentConfig.from_dict(config)
    if seed is not None:
        config = config.replace(root_seed=seed)
    if jobs < 1:
        raise ConfigurationError("jobs must be at least 1")
    directory = _output_dir(config, out)
    logger = get_logger()
    tasks = experiment_tasks(config)
    logger.info("experiment %s: %d runs on %d worker(s)", config.name, len(tasks), jobs)

    document = config.to_dict()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_task, document, *task) for task in tasks]
            results = [future.result() for future in futures]
    else:
        results = [_run_task(document, *task) for task in tasks]
    rows = [row for result in results for row in result]

    experiment = get_experiment(config.kind)
    keys = list(config.grid)
    plot_spec = experiment.__plot__
    if plot_spec and plot_spec[0] not in keys:
        keys.append(plot_spec[0])
    if plot_spec and plot_spec[2] and plot_spec[2] not in keys:
        keys.append(plot_spec[2])
    metrics = [metric for metric in experiment.__metrics__ if any(
        row.get(metric) is not None for row in rows)]
    summaries = aggregate(rows, [key for key in keys if all(key in row for row in rows)], metrics)
    summary_rows = summaries_to_rows(summaries)

    raw_path = os.path.join(directory, RAW_FILE)
    summary_path = os.path.join(directory, SUMMARY_FILE)
    try:
        write_rows(rows, raw_path)
        write_rows(summary_rows, summary_path)
    except (IOError, OSError) as e:
        raise AbstractionError("Cannot write results to '%s': %s" % (directory, e))

    plot_path = None
    if plot and plot_spec and summary_rows:
        x, y, group = plot_spec
        if x in summary_rows[0]:
            plot_path = os.path.join(directory, '%s.svg' % config.kind)
            summary_plot(summary_rows, x, y, group, plot_path, title=config.name)
    logger.info("experiment %s: %d rows written to %s", config.name, len(rows), directory)
    return ExperimentArtifacts(config, directory, raw_path, summary_path, plot_path, rows,
                               summaries)
