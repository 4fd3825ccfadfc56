# -*- coding: utf-8 -*-
"""SVG views of summary tables and of abstractions over grid worlds.

Plots only draw what the summary rows or the given abstraction hold."""
import matplotlib
matplotlib.use('Agg')

import matplotlib.pyplot as plt  # NOQA
import numpy as np  # NOQA

from ..envs.base import EnvSpec  # NOQA
from ..envs.grids import GridEnvironment  # NOQA
from ..errors import ModelError  # NOQA

__all__ = ['summary_plot', 'abstraction_overlay', 'option_overlay']


def summary_plot(rows, x, y, group, path, title=None):
    """Mean of metric `y` against `x` with its confidence band, one line
    per value of `group`. Returns the number of lines drawn."""
    rows = [row for row in rows if row["metric"] == y]
    groups = []
    for row in rows:
        key = row.get(group) if group else None
        if key not in groups:
            groups.append(key)

    figure, axes = plt.subplots(figsize=(6, 4))
    try:
        for key in groups:
            members = sorted((row for row in rows if (row.get(group) if group else None) == key),
                             key=lambda row: row[x])
            xs = np.array([row[x] for row in members], dtype=float)
            mean = np.array([row["mean"] for row in members], dtype=float)
            half = np.array([row["half_width"] for row in members], dtype=float)
            label = None if key is None else str(key)
            axes.plot(xs, mean, marker='o', label=label)
            axes.fill_between(xs, mean - half, mean + half, alpha=0.2)
        axes.set_xlabel(x)
        axes.set_ylabel(y)
        if title:
            axes.set_title(title)
        if any(key is not None for key in groups):
            axes.legend()
        figure.tight_layout()
        figure.savefig(path, format='svg')
    finally:
        plt.close(figure)
    return len(groups)


def _grid(spec):
    if not isinstance(spec, EnvSpec):
        spec = EnvSpec(spec)
    environment = spec.environment_class(spec.options)
    if not isinstance(environment, GridEnvironment):
        raise ModelError("'%s' is not a grid environment" % spec.variant)
    return environment, environment.build()


def _cell_array(environment, mdp, values):
    layout = environment.layout()
    array = np.full((layout.height, layout.width), np.nan)
    for s, label in enumerate(mdp.state_labels):
        x, y = environment.cell_of(label)
        if np.isnan(array[y - 1, x - 1]):
            array[y - 1, x - 1] = values[s]
    return array


def abstraction_overlay(spec, phi, path, title=None):
    """Colours every open cell of a grid variant by its abstract state."""
    environment, mdp = _grid(spec)
    if phi.n_states != mdp.n_states:
        raise ModelError("abstraction covers %d states, '%s' has %d"
                         % (phi.n_states, spec, mdp.n_states))
    array = _cell_array(environment, mdp, phi.mapping)
    figure, axes = plt.subplots(figsize=(5, 5))
    try:
        axes.imshow(np.ma.masked_invalid(array), origin='lower', cmap='tab20',
                    interpolation='nearest')
        for (row, column), value in np.ndenumerate(array):
            if not np.isnan(value):
                axes.text(column, row, '%d' % value, ha='center', va='center', fontsize=6)
        axes.set_xticks([])
        axes.set_yticks([])
        axes.set_title(title or '%d abstract states' % phi.n_abstract)
        figure.savefig(path, format='svg')
    finally:
        plt.close(figure)


def option_overlay(spec, options, path, title=None):
    """Marks where each option may start (dots) and where it stops (crosses)."""
    environment, mdp = _grid(spec)
    layout = environment.layout()
    walls = np.zeros((layout.height, layout.width))
    for x, y in layout.blocked:
        walls[y - 1, x - 1] = 1.0
    figure, axes = plt.subplots(figsize=(5, 5))
    try:
        axes.imshow(walls, origin='lower', cmap='Greys', interpolation='nearest')
        colours = plt.get_cmap('tab10')
        for number, option in enumerate(options):
            colour = colours(number % 10)
            starts = [environment.cell_of(mdp.state_labels[s]) for s in option.initiation_states()]
            stops = [environment.cell_of(mdp.state_labels[s])
                     for s in np.flatnonzero(option.termination >= 1.0)
                     if not option.initiation[s]]
            if starts:
                axes.scatter([x - 1 for x, _ in starts], [y - 1 for _, y in starts], s=8,
                             color=colour, label=option.name)
            if stops:
                axes.scatter([x - 1 for x, _ in stops], [y - 1 for _, y in stops], s=40,
                             color=colour, marker='x')
        axes.set_xticks([])
        axes.set_yticks([])
        if options:
            axes.legend(fontsize=6, loc='upper left')
        if title:
            axes.set_title(title)
        figure.savefig(path, format='svg')
    finally:
        plt.close(figure)
