# -*- coding: utf-8 -*-
"""Task distributions for lifelong experiments.

Every task shares the states, actions, discount and start distribution of
its base environment; only the goal moves."""
from ..errors import ModelError
from ..seeding import make_rng
from .base import EnvSpec

__all__ = ['TaskDistribution', 'sample_task', 'TASK_RULES']

TASK_RULES = ('fixed', 'far_corners', 'top_row', 'any_cell')


class TaskDistribution(object):
    """Uniform distribution over the goals selected by `rule`."""

    def __init__(self, spec, rule='fixed', goals=None):
        if not isinstance(spec, EnvSpec):
            spec = EnvSpec(spec)
        if rule not in TASK_RULES and goals is None:
            raise ModelError("unknown task rule '%s' (known: %s)"
                             % (rule, ', '.join(TASK_RULES)))
        self.spec = spec
        self.rule = rule
        if goals is not None:
            self.goals = [tuple(goal) for goal in goals]
        elif rule == 'fixed':
            self.goals = [None]
        else:
            self.goals = spec.environment_class(spec.options).task_goals(rule)
        if not self.goals:
            raise ModelError("task rule '%s' selects no goals" % rule)
        self._cache = {}

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        return cls(EnvSpec.from_dict(data.pop("env")), rule=data.get("rule", "fixed"),
                   goals=data.get("goals"))

    def to_dict(self):
        return {"env": self.spec.to_dict(), "rule": self.rule,
                "goals": [list(goal) if goal else None for goal in self.goals]}

    def __len__(self):
        return len(self.goals)

    def sample_goal(self, rng):
        return self.goals[int(make_rng(rng).integers(len(self.goals)))]

    def task(self, goal):
        """The MDP whose goal is `goal`; built once per goal."""
        if goal not in self._cache:
            spec = self.spec if goal is None else self.spec.with_options(goal=goal)
            self._cache[goal] = spec.environment_class(spec.options).build()
        return self._cache[goal]

    def tasks(self):
        return [(goal, self.task(goal)) for goal in self.goals]


def sample_task(dist, rng):
    """Draws a goal uniformly and returns the matching MDP."""
    return dist.task(dist.sample_goal(rng))
