# -*- coding:utf-8 -*-
"""
Package for configuration of the tilecast planner.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import os
import re

# import default
# pylint: disable=W0401
from tilecast.config.default import *
# pylint: enable=W0401

try:
    user_settings = __import__(
        os.environ["TILECAST_CONFIG_MODULE"],
        fromlist=["TILECAST_CONFIG_MODULE"]
    )
except KeyError:
    # Don't fail to keep local config optional
    user_settings = {}

# Override with user ones
for attr in dir(user_settings):
    if re.search('^[A-Z]', attr):
        globals()[attr] = getattr(user_settings, attr)
