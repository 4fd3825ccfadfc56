# -*- coding: utf-8 -*-
from .config import *  # NOQA
from .stats import *  # NOQA
from .experiments import *  # NOQA
from .plots import *  # NOQA
from .runner import *  # NOQA
from .targets import *  # NOQA
