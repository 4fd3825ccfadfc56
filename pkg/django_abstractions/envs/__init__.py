# -*- coding: utf-8 -*-
from .base import *  # NOQA
from .grids import *  # NOQA
from .chains import *  # NOQA
from .taxi import *  # NOQA
from .randoms import *  # NOQA
from .tasks import *  # NOQA
