# coding=utf-8
"""Init for test package.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
