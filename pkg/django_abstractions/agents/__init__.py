# -*- coding: utf-8 -*-
from .base import *  # NOQA
from .tabular import *  # NOQA
from .runs import *  # NOQA
