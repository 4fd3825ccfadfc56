# -*- coding: utf-8 -*-
"""Per-cell means with normal-approximation confidence intervals."""
import math
from collections import OrderedDict, namedtuple

import numpy as np

from ..errors import ArgumentError

__all__ = ['RunSummary', 'aggregate', 'summaries_to_rows', 'SUMMARY_COLUMNS', 'Z_95']

Z_95 = 1.96
SUMMARY_COLUMNS = ('metric', 'mean', 'sd', 'half_width', 'n')

RunSummary = namedtuple('RunSummary', ['cell', 'metric', 'mean', 'sd', 'half_width', 'n'])


def aggregate(records, keys, metrics, z=Z_95):
    """Groups `records` (dicts) by the values of `keys` and summarises every
    metric column: mean, sample standard deviation and z sd / sqrt(n).

    Groups keep the order in which they first appear."""
    if not metrics:
        raise ArgumentError("aggregate needs at least one metric")
    groups = OrderedDict()
    for record in records:
        cell = tuple(record[key] for key in keys)
        groups.setdefault(cell, []).append(record)

    summaries = []
    for cell, members in groups.items():
        for metric in metrics:
            values = np.array([member[metric] for member in members
                               if member.get(metric) is not None], dtype=float)
            if not len(values):
                continue
            sd = float(values.std(ddof=1)) if len(values) > 1 else 0.0
            summaries.append(RunSummary(OrderedDict(zip(keys, cell)), metric,
                                        float(values.mean()), sd,
                                        z * sd / math.sqrt(len(values)), len(values)))
    return summaries


def summaries_to_rows(summaries):
    rows = []
    for summary in summaries:
        row = OrderedDict(summary.cell)
        row.update(zip(SUMMARY_COLUMNS, (summary.metric, summary.mean, summary.sd,
                                         summary.half_width, summary.n)))
        rows.append(row)
    return rows
