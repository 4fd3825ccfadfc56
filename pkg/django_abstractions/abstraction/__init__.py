# -*- coding: utf-8 -*-
from .core import *  # NOQA
from .predicates import *  # NOQA
from .clustering import *  # NOQA
from .pac import *  # NOQA
