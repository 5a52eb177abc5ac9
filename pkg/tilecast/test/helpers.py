# coding=utf-8
"""Helpers for tests.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import ast
import os

import numpy as np

from tilecast.partition import Message

DATA_PATH = os.path.join(
    os.path.dirname(os.path.realpath(__file__)),
    'test_data')

PARTITION_FIXTURE_PATH = os.path.join(DATA_PATH, 'three_user_partition.txt')

SCENARIO_FIXTURE_PATH = os.path.join(DATA_PATH, 'small_scenario.json')

# Long Monte-Carlo trend checks only run when this is set
SLOW_TESTS = bool(os.environ.get('TILECAST_SLOW_TESTS', False))


def load_fixture(path):
    """Read a python literal fixture."""
    with open(path, 'rb') as fixture:
        return ast.literal_eval(fixture.read().decode('utf-8'))


def random_unit(rng, m):
    vector = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    return vector / np.linalg.norm(vector)


def single_user_messages(demands):
    """One message per entry, each for its own user."""
    return [
        Message(
            subset=(i + 1,),
            level=1,
            audience=(i + 1,),
            tile_count=1,
            demand_bits_per_s=float(demand))
        for i, demand in enumerate(demands)]
