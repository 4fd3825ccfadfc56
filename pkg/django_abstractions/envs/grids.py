# -*- coding: utf-8 -*-
"""Grid worlds.

Cells are 1-indexed ``(x, y)`` pairs with ``y`` growing upwards, and states
are enumerated row by row from the bottom-left cell. Actions are
``up, right, down, left``; an action slips to each orthogonal direction
with probability `slip` and bumping into a wall or the border leaves the
agent in place. Goal rewards are paid on entering the goal, and goals are
terminal."""
import pkgutil

import networkx as nx
import numpy as np

from ..errors import ModelError
from ..extensions import register
from ..mdp import FiniteMdp, Policy
from .base import ENVIRONMENT, Environment, EnvSpec

__all__ = [
    'ACTIONS', 'MOVES', 'GridLayout', 'grid_mdp', 'load_layout',
    'GridEnvironment', 'RussellNorvig', 'FourRooms', 'Grid9', 'Upworld',
    'ColorRooms', 'ascii_map', 'room_abstraction', 'upworld_abstraction',
    'hallway_options',
]

ACTIONS = ('up', 'right', 'down', 'left')
MOVES = ((0, 1), (1, 0), (0, -1), (-1, 0))

WALL = '#'
OPEN = '.'


class GridLayout(object):
    """Open and blocked cells of a rectangular grid."""

    def __init__(self, width, height, blocked=()):
        if width < 1 or height < 1:
            raise ModelError("grid dimensions must be positive, got %dx%d" % (width, height))
        self.width = width
        self.height = height
        self.blocked = frozenset(tuple(cell) for cell in blocked)
        self.cells = [(x, y) for y in range(1, height + 1) for x in range(1, width + 1)
                      if (x, y) not in self.blocked]
        if not self.cells:
            raise ModelError("grid has no open cells")
        self.index = dict((cell, i) for i, cell in enumerate(self.cells))

    @classmethod
    def from_text(cls, text):
        """Parses rows of '.' and '#', the first row being the top of the grid."""
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        height = len(lines)
        width = len(lines[0])
        if any(len(line) != width for line in lines):
            raise ModelError("layout rows have different lengths")
        blocked = []
        for row, line in enumerate(lines):
            for column, char in enumerate(line):
                if char == WALL:
                    blocked.append((column + 1, height - row))
                elif char != OPEN:
                    raise ModelError("unexpected layout character %r" % char)
        return cls(width, height, blocked)

    def inside(self, cell):
        return 1 <= cell[0] <= self.width and 1 <= cell[1] <= self.height

    def is_open(self, cell):
        return self.inside(cell) and cell not in self.blocked

    def is_wall(self, cell):
        return self.inside(cell) and cell in self.blocked

    def move(self, cell, action):
        dx, dy = MOVES[action]
        target = (cell[0] + dx, cell[1] + dy)
        return target if self.is_open(target) else cell

    def neighbours(self, cell):
        result = []
        for action in range(len(MOVES)):
            target = self.move(cell, action)
            if target != cell:
                result.append(target)
        return result

    def graph(self, cells=None):
        cells = self.cells if cells is None else cells
        allowed = set(cells)
        graph = nx.Graph()
        graph.add_nodes_from(cells)
        for cell in cells:
            for target in self.neighbours(cell):
                if target in allowed:
                    graph.add_edge(cell, target)
        return graph

    def _walled(self, cell, first, second):
        a = (cell[0] + MOVES[first][0], cell[1] + MOVES[first][1])
        b = (cell[0] + MOVES[second][0], cell[1] + MOVES[second][1])
        return self.is_wall(a) and self.is_wall(b)

    def doorways(self):
        """Open cells squeezed between two walls on opposite sides."""
        return [cell for cell in self.cells
                if self._walled(cell, 1, 3) or self._walled(cell, 0, 2)]

    def rooms(self):
        """Cell blocks separated by doorways.

        A doorway belongs to the room below it when it is a vertical
        passage and to the room on its left otherwise."""
        doors = set(self.doorways())
        inner = [cell for cell in self.cells if cell not in doors]
        components = [set(component) for component in
                      nx.connected_components(self.graph(inner))]
        components.sort(key=lambda component: min(self.index[cell] for cell in component))

        for door in sorted(doors, key=self.index.get):
            if self._walled(door, 1, 3):
                neighbour = (door[0], door[1] - 1)
            else:
                neighbour = (door[0] - 1, door[1])
            for component in components:
                if neighbour in component:
                    component.add(door)
                    break
            else:
                components.append(set([door]))

        return [sorted(component, key=self.index.get) for component in components]

    def render(self, marks=None):
        marks = marks or {}
        rows = []
        for y in range(self.height, 0, -1):
            row = []
            for x in range(1, self.width + 1):
                cell = (x, y)
                if cell in self.blocked:
                    row.append(WALL)
                else:
                    row.append(str(marks.get(cell, OPEN))[:1])
            rows.append(''.join(row))
        return '\n'.join(rows)


def load_layout(name):
    data = pkgutil.get_data('django_abstractions.envs', 'layouts/%s.txt' % name)
    if data is None:
        raise ModelError("no grid layout named '%s'" % name)
    return GridLayout.from_text(data.decode('utf-8'))


def _move_distribution(layout, cell, action, slip):
    """Yields (target cell, probability) for one action."""
    if slip <= 0.0:
        yield layout.move(cell, action), 1.0
        return
    yield layout.move(cell, action), 1.0 - 2.0 * slip
    yield layout.move(cell, (action + 1) % 4), slip
    yield layout.move(cell, (action + 3) % 4), slip


def grid_mdp(layout, gamma, slip=0.0, start=(1, 1), rewards=None, terminal=None,
             step_reward=0.0, name=None):
    """FiniteMdp for `layout`; `rewards` maps cells to the reward paid on
    entering them and `terminal` defaults to the rewarded cells."""
    if not 0.0 <= slip <= 0.5:
        raise ModelError("slip must lie in [0, 0.5], got %r" % slip)
    rewards = dict(rewards or {})
    terminal = list(rewards) if terminal is None else list(terminal)
    for cell in list(rewards) + terminal + [start]:
        if tuple(cell) not in layout.index:
            raise ModelError("cell %s is not an open cell of the grid" % (cell,))

    n = len(layout.cells)
    transition = np.zeros((n, 4, n))
    entry = np.array([rewards.get(cell, 0.0) for cell in layout.cells]) + step_reward
    for s, cell in enumerate(layout.cells):
        for action in range(4):
            for target, probability in _move_distribution(layout, cell, action, slip):
                transition[s, action, layout.index[target]] += probability
    reward = np.broadcast_to(entry[np.newaxis, np.newaxis, :], transition.shape)

    start_dist = np.zeros(n)
    start_dist[layout.index[tuple(start)]] = 1.0
    return FiniteMdp(transition, reward, gamma, start_dist=start_dist,
                     terminal=[layout.index[tuple(cell)] for cell in terminal],
                     name=name, state_labels=layout.cells)


class GridEnvironment(Environment):
    """Grid world whose goals pay `goal_reward` on entry."""

    def layout(self):
        raise NotImplementedError

    def start(self):
        return tuple(self.options.get("start", (1, 1)))

    def goals(self):
        return {tuple(self.options["goal"]): self.options.get("goal_reward", 1.0)}

    def build(self):
        return grid_mdp(self.layout(), self.options["gamma"], slip=self.options.get("slip", 0.0),
                        start=self.start(), rewards=self.goals(),
                        name=self.__extension_name__)

    def cell_of(self, label):
        return tuple(label[:2])

    def ascii_map(self, marks=None):
        layout = self.layout()
        default = dict((cell, 'G') for cell in self.goals())
        default[self.start()] = 'S'
        default.update(marks or {})
        return layout.render(default)

    def task_goals(self, rule):
        layout = self.layout()
        if rule == 'far_corners':
            corners = [(1, 1), (layout.width, 1), (1, layout.height),
                       (layout.width, layout.height)]
            return [corner for corner in corners
                    if layout.is_open(corner) and corner != self.start()]
        if rule == 'top_row':
            return [cell for cell in layout.cells if cell[1] == layout.height]
        if rule == 'any_cell':
            return [cell for cell in layout.cells if cell != self.start()]
        return super(GridEnvironment, self).task_goals(rule)


_GAMMA = {"name": "gamma", "type": "float", "default": 0.99,
          "description": "discount factor"}


@register(ENVIRONMENT)
class RussellNorvig(GridEnvironment):
    """The 4x3 grid with a +1 exit at (4,3) and a -1 exit at (4,2)."""
    __extension_name__ = 'russell_norvig'
    __options__ = [
        _GAMMA,
        {"name": "slip", "type": "float", "default": 0.0,
         "description": "probability of each orthogonal slip"},
    ]

    def layout(self):
        return GridLayout(4, 3, blocked=[(2, 2)])

    def goals(self):
        return {(4, 3): 1.0, (4, 2): -1.0}


@register(ENVIRONMENT)
class FourRooms(GridEnvironment):
    """11x11 grid split into four rooms joined by four doorways."""
    __extension_name__ = 'four_rooms'
    __options__ = [
        _GAMMA,
        {"name": "slip", "type": "float", "default": 0.05,
         "description": "probability of each orthogonal slip"},
        {"name": "goal", "type": "cell", "default": (11, 11),
         "description": "goal cell x,y"},
        {"name": "start", "type": "cell", "default": (1, 1),
         "description": "start cell x,y"},
        {"name": "layout", "type": "string", "default": "four_rooms",
         "description": "layout fixture name"},
    ]

    def layout(self):
        return load_layout(self.options["layout"])


@register(ENVIRONMENT)
class Grid9(GridEnvironment):
    """Open grid without interior walls, 9x9 by default."""
    __extension_name__ = 'grid9'
    __options__ = [
        _GAMMA,
        {"name": "slip", "type": "float", "default": 0.0,
         "description": "probability of each orthogonal slip"},
        {"name": "width", "type": "int", "default": 9, "description": "grid width"},
        {"name": "height", "type": "int", "default": 9, "description": "grid height"},
        {"name": "goal", "type": "cell", "default": None,
         "description": "goal cell x,y, defaults to the top-right corner"},
    ]

    def layout(self):
        return GridLayout(self.options["width"], self.options["height"])

    def goals(self):
        goal = self.options["goal"] or (self.options["width"], self.options["height"])
        return {tuple(goal): 1.0}


@register(ENVIRONMENT)
class Upworld(GridEnvironment):
    """Wide open grid whose goal sits somewhere in the top row."""
    __extension_name__ = 'upworld'
    __options__ = [
        _GAMMA,
        {"name": "width", "type": "int", "default": 30, "description": "grid width"},
        {"name": "height", "type": "int", "default": 11, "description": "grid height"},
        {"name": "goal", "type": "cell", "default": None,
         "description": "goal cell x,y, defaults to the top-right corner"},
    ]

    def layout(self):
        return GridLayout(self.options["width"], self.options["height"])

    def goals(self):
        goal = self.options["goal"] or (self.options["width"], self.options["height"])
        if goal[1] != self.options["height"]:
            raise ModelError("upworld goals live in the top row")
        return {tuple(goal): 1.0}


COLORS = ('red', 'blue', 'green', 'yellow')
PAINT = 4


@register(ENVIRONMENT)
class ColorRooms(FourRooms):
    """Four Rooms with an irrelevant global colour and a paint action.

    Painting redraws the colour uniformly at random and leaves the agent
    where it is; nothing else depends on the colour."""
    __extension_name__ = 'color_rooms'
    __options__ = FourRooms.__options__ + [
        {"name": "colors", "type": "int", "default": len(COLORS),
         "description": "number of colours"},
    ]

    def build(self):
        layout = self.layout()
        n_colors = self.options["colors"]
        if n_colors < 1:
            raise ModelError("colour count must be positive")
        slip = self.options["slip"]
        goals = self.goals()

        labels = [(x, y, c) for c in range(n_colors) for (x, y) in layout.cells]
        index = dict((label, i) for i, label in enumerate(labels))
        n = len(labels)
        transition = np.zeros((n, 5, n))
        for (x, y, c), s in index.items():
            for action in range(4):
                for target, probability in _move_distribution(layout, (x, y), action, slip):
                    transition[s, action, index[target + (c,)]] += probability
            for color in range(n_colors):
                transition[s, PAINT, index[(x, y, color)]] += 1.0 / n_colors

        entry = np.array([goals.get((x, y), 0.0) for (x, y, _) in labels])
        reward = np.broadcast_to(entry[np.newaxis, np.newaxis, :], transition.shape)
        start_dist = np.zeros(n)
        start_dist[index[self.start() + (0,)]] = 1.0
        terminal = [index[goal + (c,)] for goal in goals for c in range(n_colors)]
        return FiniteMdp(transition, reward, self.options["gamma"], start_dist=start_dist,
                         terminal=terminal, name=self.__extension_name__,
                         state_labels=labels)


def _environment(spec):
    if not isinstance(spec, EnvSpec):
        spec = EnvSpec(spec)
    environment = spec.environment_class(spec.options)
    if not isinstance(environment, GridEnvironment):
        raise ModelError("'%s' is not a grid environment" % spec.variant)
    return environment


def ascii_map(spec, marks=None):
    """Renders a grid variant: '#' walls, 'S' start, 'G' goals, plus `marks`
    (cell -> character)."""
    return _environment(spec).ascii_map(marks)


def room_abstraction(spec):
    """Maps every state of a grid variant to the room holding its cell."""
    from ..abstraction.core import StateAbstraction

    environment = _environment(spec)
    rooms = environment.layout().rooms()
    room_of = dict((cell, i) for i, room in enumerate(rooms) for cell in room)
    mdp = environment.build()
    return StateAbstraction([room_of[environment.cell_of(label)] for label in mdp.state_labels])


def upworld_abstraction(spec):
    """Maps every state to its row."""
    from ..abstraction.core import StateAbstraction

    environment = _environment(spec)
    mdp = environment.build()
    return StateAbstraction([label[1] - 1 for label in mdp.state_labels])


def hallway_options(spec):
    """Options that leave a room through one of its doorways.

    Each room gets one option per doorway bordering it; the option starts
    anywhere in the room and follows shortest paths to the doorway. It
    also terminates outside the room and at goals."""
    from ..options.core import Option

    environment = _environment(spec)
    layout = environment.layout()
    mdp = environment.build()
    doors = layout.doorways()
    goals = set(environment.goals())

    options = []
    for number, room in enumerate(layout.rooms()):
        room_cells = set(room) - goals
        targets = [door for door in doors if door in room_cells or
                   any(neighbour in room_cells for neighbour in layout.neighbours(door))]
        for target in targets:
            region = room_cells | set([target])
            distance = nx.single_source_shortest_path_length(layout.graph(list(region)), target)
            initiation = np.zeros(mdp.n_states, dtype=bool)
            termination = np.ones(mdp.n_states)
            actions = np.zeros(mdp.n_states, dtype=int)
            for s, label in enumerate(mdp.state_labels):
                cell = environment.cell_of(label)
                if cell not in region or cell == target or cell not in distance:
                    continue
                initiation[s] = True
                termination[s] = 0.0
                steps = [distance.get(layout.move(cell, a), np.inf) for a in range(4)]
                actions[s] = int(np.argmin(steps))
            if initiation.any():
                options.append(Option(
                    initiation, termination,
                    Policy.deterministic(actions, mdp.n_actions),
                    name='room%d->%d,%d' % (number, target[0], target[1]),
                ))
    return options
