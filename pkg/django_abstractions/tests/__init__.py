# -*- coding: utf-8 -*-

from .test_mdp import *  # NOQA
from .test_envs import *  # NOQA
from .test_agents import *  # NOQA
from .test_abstraction import *  # NOQA
from .test_bottleneck import *  # NOQA
from .test_options import *  # NOQA
from .test_discovery import *  # NOQA
from .test_hierarchy import *  # NOQA
from .test_harness import *  # NOQA
from .test_workspace import *  # NOQA
from .test_api import *  # NOQA
from .test_commands import *  # NOQA
