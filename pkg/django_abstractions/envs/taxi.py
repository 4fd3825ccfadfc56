# -*- coding: utf-8 -*-
"""The 5x5 taxi domain with one to three passengers."""
import itertools

import numpy as np

from ..errors import ModelError
from ..extensions import register
from ..mdp import FiniteMdp
from ..seeding import make_rng
from .base import ENVIRONMENT, Environment
from .grids import MOVES

__all__ = ['Taxi', 'taxi_mdp', 'LANDMARKS', 'WAITING', 'IN_TAXI', 'DELIVERED']

SIZE = 5
LANDMARKS = ((1, 5), (5, 5), (1, 1), (4, 1))
LANDMARK_NAMES = ('R', 'G', 'Y', 'B')
# cells with a wall on their east side
EAST_WALLS = frozenset([(2, 5), (2, 4), (1, 2), (1, 1), (3, 2), (3, 1)])

WAITING, IN_TAXI, DELIVERED = 0, 1, 2
PICKUP, DROPOFF = 4, 5


def _drive(cell, action):
    dx, dy = MOVES[action]
    if action == 1 and cell in EAST_WALLS:
        return cell
    if action == 3 and (cell[0] - 1, cell[1]) in EAST_WALLS:
        return cell
    target = (cell[0] + dx, cell[1] + dy)
    if not (1 <= target[0] <= SIZE and 1 <= target[1] <= SIZE):
        return cell
    return target


def taxi_mdp(passengers, gamma=0.95):
    """Builds the MDP for `passengers`, a list of (source, destination)
    landmark indices.

    A passenger is waiting, riding or delivered. Pickup boards every
    waiting passenger at the taxi's cell and dropoff delivers every rider
    whose destination it is; otherwise both are no-ops. Delivering the last
    passenger pays 1 and ends the episode."""
    if not 1 <= len(passengers) <= 3:
        raise ModelError("taxi supports one to three passengers")
    sources = [LANDMARKS[source] for source, _ in passengers]
    destinations = [LANDMARKS[destination] for _, destination in passengers]

    cells = [(x, y) for y in range(1, SIZE + 1) for x in range(1, SIZE + 1)]
    statuses = list(itertools.product(range(3), repeat=len(passengers)))
    labels = [cell + (status,) for status in statuses for cell in cells]
    index = dict((label, i) for i, label in enumerate(labels))
    n = len(labels)

    transition = np.zeros((n, 6, n))
    for (x, y, status), s in index.items():
        cell = (x, y)
        for action in range(4):
            transition[s, action, index[_drive(cell, action) + (status,)]] = 1.0
        boarded = tuple(IN_TAXI if value == WAITING and sources[p] == cell else value
                        for p, value in enumerate(status))
        dropped = tuple(DELIVERED if value == IN_TAXI and destinations[p] == cell else value
                        for p, value in enumerate(status))
        transition[s, PICKUP, index[cell + (boarded,)]] = 1.0
        transition[s, DROPOFF, index[cell + (dropped,)]] = 1.0

    done = tuple([DELIVERED] * len(passengers))
    entry = np.array([1.0 if label[2] == done else 0.0 for label in labels])
    reward = np.broadcast_to(entry[np.newaxis, np.newaxis, :], transition.shape)
    start_dist = np.zeros(n)
    start_dist[index[(1, 1, tuple([WAITING] * len(passengers)))]] = 1.0
    terminal = [i for i, label in enumerate(labels) if label[2] == done]
    return FiniteMdp(transition, reward, gamma, start_dist=start_dist, terminal=terminal,
                     name='taxi', state_labels=labels)


@register(ENVIRONMENT)
class Taxi(Environment):
    """Pick passengers up at landmarks and drop them at their destinations."""
    __extension_name__ = 'taxi'
    __options__ = [
        {"name": "passengers", "type": "int", "default": 1,
         "description": "number of passengers, 1 to 3"},
        {"name": "seed", "type": "int", "default": 0,
         "description": "seed drawing sources and destinations"},
        {"name": "gamma", "type": "float", "default": 0.95, "description": "discount factor"},
    ]

    def passengers(self):
        rng = make_rng(self.options["seed"])
        result = []
        for _ in range(self.options["passengers"]):
            source = int(rng.integers(len(LANDMARKS)))
            others = [i for i in range(len(LANDMARKS)) if i != source]
            result.append((source, others[int(rng.integers(len(others)))]))
        return result

    def build(self):
        return taxi_mdp(self.passengers(), self.options["gamma"])
