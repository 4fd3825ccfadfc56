# -*- coding: utf-8 -*-
from .core import *  # NOQA
from .models import *  # NOQA
from .smdp import *  # NOQA
