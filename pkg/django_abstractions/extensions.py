# -*- coding: utf-8 -*-
"""Named, self-describing plug-ins.

Environment builders, learning agents, experiment kinds and reproduce
targets are registered here under a kind. Each declares its options as::

    __options__ = [
        {"name": "slip", "type": "float", "default": 0.0,
         "description": "probability of each orthogonal slip"},
    ]

so values coming from INI files, JSON configs or query strings can be
validated and coerced in one place."""
from collections import OrderedDict

from .errors import ConfigurationError, NoSuchExtensionError

__all__ = [
    'Extension', 'register', 'get_extension', 'extension_names',
    'describe_extensions', 'coerce_value',
]

_registry = {}

_TRUE = ('1', 'yes', 'true', 'on')
_FALSE = ('0', 'no', 'false', 'off')


def coerce_value(value, type_name, name='value'):
    """Converts `value` to the declared option type."""
    if value is None:
        return None
    try:
        if type_name == 'int':
            if isinstance(value, bool) or (isinstance(value, float) and not value.is_integer()):
                raise ValueError(value)
            return int(value)
        if type_name == 'float':
            return float(value)
        if type_name == 'bool':
            if isinstance(value, bool):
                return value
            text = str(value).strip().lower()
            if text in _TRUE:
                return True
            if text in _FALSE:
                return False
            raise ValueError(value)
        if type_name == 'string':
            return str(value)
        if type_name == 'cell':
            if isinstance(value, str):
                value = value.split(',')
            x, y = value
            return (int(x), int(y))
        if type_name == 'list':
            if isinstance(value, str):
                return [item.strip() for item in value.split(',') if item.strip()]
            return list(value)
    except (TypeError, ValueError):
        raise ConfigurationError(
            "Option '%s' expects a value of type %s, got %r" % (name, type_name, value)
        )
    return value


class Extension(object):
    __extension_kind__ = 'extension'
    __extension_name__ = None
    __options__ = []

    @classmethod
    def option_defaults(cls):
        return OrderedDict(
            (option["name"], option.get("default")) for option in cls.__options__
        )

    @classmethod
    def coerce_options(cls, options, strict=True):
        """Returns the declared defaults updated with coerced `options`."""
        declared = dict((option["name"], option) for option in cls.__options__)
        result = cls.option_defaults()
        for name, value in (options or {}).items():
            try:
                option = declared[name]
            except KeyError:
                if strict:
                    raise ConfigurationError(
                        "Unknown option '%s' for %s '%s' (known: %s)"
                        % (name, cls.__extension_kind__, cls.__extension_name__,
                           ', '.join(sorted(declared)) or 'none')
                    )
                continue
            result[name] = coerce_value(value, option.get("type", "string"), name)
        return result

    @classmethod
    def describe(cls):
        return {
            "name": cls.__extension_name__,
            "description": (cls.__doc__ or '').strip().split('\n')[0],
            "options": [dict(option) for option in cls.__options__],
        }


def register(kind):
    """Class decorator adding an extension to the `kind` registry."""
    def decorator(cls):
        name = cls.__extension_name__
        if not name:
            raise TypeError("%s does not declare __extension_name__" % cls.__name__)
        cls.__extension_kind__ = kind
        _registry.setdefault(kind, OrderedDict())[name] = cls
        return cls
    return decorator


def get_extension(kind, name, error_class=None):
    try:
        return _registry[kind][name]
    except KeyError:
        if error_class is not None:
            raise error_class(name)
        raise NoSuchExtensionError(kind, name)


def extension_names(kind):
    return list(_registry.get(kind, {}))


def describe_extensions(kind):
    return [cls.describe() for cls in _registry.get(kind, {}).values()]
