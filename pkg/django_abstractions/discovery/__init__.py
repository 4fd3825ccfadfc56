# -*- coding: utf-8 -*-
from .planning import *  # NOQA
from .spectral import *  # NOQA
