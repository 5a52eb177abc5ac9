# coding=utf-8
"""Test cases for the helper utilities.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import os
import shutil
import tempfile
from unittest import mock

import numpy as np

from tilecast.utilities import (
    mean_and_stderr,
    paired_gap_confidence,
    temp_dir,
    unique_filename)
from tilecast.test.logged_unittest import LoggedTestCase


class UtilitiesTestCase(LoggedTestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()
        self.env = mock.patch.dict(
            os.environ, {'TILECAST_WORK_DIR': self.work_dir})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        shutil.rmtree(self.work_dir)

    def test_temp_dir(self):
        path = temp_dir('results')
        self.assertTrue(os.path.isdir(path))
        self.assertTrue(path.startswith(
            os.path.join(self.work_dir, 'tilecast')))
        self.assertTrue(path.endswith('results'))

    def test_unique_filename(self):
        first = unique_filename(suffix='.csv')
        second = unique_filename(suffix='.csv')
        self.assertNotEqual(first, second)
        self.assertTrue(first.endswith('.csv'))
        self.assertFalse(os.path.exists(first))
        self.assertEqual(os.path.basename(os.path.dirname(first)), 'results')

    def test_mean_and_stderr(self):
        mean, stderr = mean_and_stderr([1.0, 2.0, 3.0, 4.0])
        self.assertAlmostEqual(mean, 2.5)
        self.assertAlmostEqual(stderr, np.std([1, 2, 3, 4], ddof=1) / 2.0)
        self.assertEqual(mean_and_stderr([5.0]), (5.0, 0.0))
        mean, stderr = mean_and_stderr([])
        self.assertTrue(np.isnan(mean))
        self.assertTrue(np.isnan(stderr))

    def test_paired_gap_confidence(self):
        lower = [1.0, 2.0, 3.0, 4.0]
        self.assertTrue(paired_gap_confidence(lower, [2.0, 3.1, 3.9, 5.0]))
        self.assertFalse(paired_gap_confidence(lower, lower))
        self.assertFalse(paired_gap_confidence(lower, [0.0, 4.0, 1.0, 6.0]))
