# -*- coding: utf-8 -*-
from collections import OrderedDict

from ..errors import ModelError, NoSuchEnvironmentError
from ..extensions import Extension, get_extension, extension_names, describe_extensions

__all__ = [
    'EnvSpec', 'Environment', 'build_env', 'get_environment',
    'environment_names', 'describe_environments', 'ENVIRONMENT',
]

ENVIRONMENT = 'environment'


class EnvSpec(object):
    """Names an environment variant and the options to build it with.

    Options are coerced against the variant's declared `__options__` when
    the spec is created, so a spec that exists is a spec that builds."""

    def __init__(self, variant, **options):
        self.variant = variant
        self.environment_class = get_environment(variant)
        self.options = self.environment_class.coerce_options(options)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        try:
            variant = data.pop("variant")
        except KeyError:
            raise ModelError("environment spec needs a 'variant'")
        return cls(variant, **data)

    def to_dict(self):
        result = OrderedDict([("variant", self.variant)])
        for name, value in self.options.items():
            result[name] = list(value) if isinstance(value, tuple) else value
        return result

    def with_options(self, **options):
        merged = dict(self.options)
        merged.update(options)
        return EnvSpec(self.variant, **merged)

    def __getitem__(self, name):
        return self.options[name]

    def __eq__(self, other):
        return (isinstance(other, EnvSpec) and other.variant == self.variant
                and other.options == self.options)

    def __ne__(self, other):
        return not self == other

    __hash__ = None

    def __repr__(self):
        options = ', '.join('%s=%r' % item for item in self.options.items())
        return "EnvSpec(%r, %s)" % (self.variant, options)


class Environment(Extension):
    """Base class of the environment builders."""

    def __init__(self, options):
        self.options = options

    def build(self):
        raise NotImplementedError

    def task_goals(self, rule):
        """Goal values a task distribution may draw under `rule`."""
        raise ModelError("environment '%s' does not support the '%s' task rule"
                         % (self.__extension_name__, rule))


def get_environment(variant):
    return get_extension(ENVIRONMENT, variant, NoSuchEnvironmentError)


def environment_names():
    return extension_names(ENVIRONMENT)


def describe_environments():
    return describe_extensions(ENVIRONMENT)


def build_env(spec, **options):
    """Builds the FiniteMdp named by `spec` (an EnvSpec or a variant name)."""
    if not isinstance(spec, EnvSpec):
        spec = EnvSpec(spec, **options)
    elif options:
        spec = spec.with_options(**options)
    return spec.environment_class(spec.options).build()
