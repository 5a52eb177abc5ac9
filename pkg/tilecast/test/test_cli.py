# coding=utf-8
"""Test cases for the command line entry point.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import os
import shutil
import tempfile

from tilecast.cli import build_parser, main
from tilecast.harness import SCHEME_BASELINE2
from tilecast.test.helpers import SCENARIO_FIXTURE_PATH
from tilecast.test.logged_unittest import LoggedTestCase


class CliTestCase(LoggedTestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()
        self.out_path = os.path.join(self.work_dir, 'results.csv')

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def test_parser(self):
        options = build_parser().parse_args([
            'run', '--scheme', 'baseline1', '--scheme', 'baseline2',
            '--sweep', 'm', '--trials', '3'])
        self.assertEqual(options.schemes, ['baseline1', 'baseline2'])
        self.assertEqual(options.sweep, 'm')
        self.assertEqual(options.trials, 3)
        self.assertIsNone(options.strict)
        with self.assertRaises(SystemExit):
            build_parser().parse_args(['run', '--scheme', 'baseline3'])
        options = build_parser().parse_args(['run', '--preset', 'antennas'])
        self.assertEqual(options.preset, 'antennas')
        with self.assertRaises(SystemExit):
            build_parser().parse_args([
                'run', '--preset', 'users', '--config', 'scenario.json'])

    def test_run_then_audit(self):
        code = main([
            'run', '--config', SCENARIO_FIXTURE_PATH, '--out', self.out_path,
            '--trials', '1', '--scheme', SCHEME_BASELINE2])
        self.assertEqual(code, 0)
        with open(self.out_path) as results_file:
            lines = results_file.read().splitlines()
        # one trial row plus the mean and stderr rows
        self.assertEqual(len(lines), 4)
        self.assertTrue(lines[1].startswith(SCHEME_BASELINE2))
        self.assertEqual(main(['audit', self.out_path]), 0)
        self.assertEqual(
            main(['audit', self.out_path, '--config', SCENARIO_FIXTURE_PATH,
                  '--recheck', '1']), 0)
        self.assertEqual(
            main(['audit', self.out_path, '--config', SCENARIO_FIXTURE_PATH,
                  '--seed', '8']), 1)

    def test_bad_config(self):
        path = os.path.join(self.work_dir, 'bad.json')
        with open(path, 'w') as bad_file:
            bad_file.write('{"antennas": 4}')
        self.assertEqual(main(['run', '--config', path]), 2)
        self.assertEqual(
            main(['run', '--config', os.path.join(self.work_dir, 'no.json')]),
            2)

    def test_audit_broken_file(self):
        with open(self.out_path, 'w') as broken:
            broken.write('not,a,result,file\n')
        self.assertEqual(main(['audit', self.out_path]), 1)

    def test_oracle_check(self):
        self.assertEqual(
            main(['oracle-check', '--instances', '5', '--seed', '2']), 0)
