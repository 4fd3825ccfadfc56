# -*- coding: utf-8 -*-
from .pairs import *  # NOQA
from .models import *  # NOQA
from .classes import *  # NOQA
from .levels import *  # NOQA
