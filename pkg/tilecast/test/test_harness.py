# coding=utf-8
"""Test cases for scenarios, trials and result files.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import json
import os
import shutil
import tempfile
import unittest
from dataclasses import replace

import numpy as np

from tilecast.exceptions import (
    ConfigException,
    ConstraintViolationException,
    WrongDirectionCountException)
from tilecast.geometry import TilingConfig, ViewDirection
from tilecast.harness import (
    CSV_HEADER,
    DEFAULT_QUALITIES,
    PRESET_ANTENNAS,
    PRESET_CONCENTRATION,
    PRESET_USERS,
    PRESETS,
    SCHEME_ASYMPTOTIC,
    SCHEME_BASELINE1,
    SCHEME_BASELINE2,
    SCHEME_DC,
    SCHEMES,
    UserSpec,
    audit_results,
    concentrate_directions,
    default_scenario,
    load_scenario,
    preset_scenario,
    random_direction_pool,
    run_experiment,
    run_trial,
    shift_directions,
    trial_directions)
from tilecast.partition import QualityLadder
from tilecast.test.helpers import SCENARIO_FIXTURE_PATH, SLOW_TESTS
from tilecast.test.logged_unittest import LoggedTestCase
from tilecast.utilities import mean_and_stderr, paired_gap_confidence


def _users(yaws, quality=1):
    return tuple(
        UserSpec(ViewDirection(yaw, 90.0), quality) for yaw in yaws)


def small_scenario(yaws, rate_bps, **overrides):
    values = dict(
        tiling=TilingConfig(12, 6, 100.0, 100.0, 15.0),
        ladder=QualityLadder((rate_bps,)),
        users=_users(yaws),
        m=4,
        n_sc=8,
        trials=1,
        base_seed=3)
    values.update(overrides)
    return default_scenario(**values)


class DirectionsTestCase(LoggedTestCase):

    def test_shift_directions(self):
        base = [ViewDirection(yaw, 80.0) for yaw in (10, 20, 30, 40, 358)]
        self.assertEqual(shift_directions(base, 0.0), base)
        shifted = shift_directions(base, 5.0)
        self.assertEqual(
            [direction.yaw_deg for direction in shifted],
            [15.0, 25.0, 30.0, 35.0, 353.0])
        self.assertEqual(
            shift_directions([ViewDirection(358.0, 90.0)] * 5, 5.0)[0].yaw_deg,
            3.0)
        self.assertTrue(all(d.pitch_deg == 80.0 for d in shifted))

    def test_wrong_count(self):
        with self.assertRaises(WrongDirectionCountException):
            shift_directions([ViewDirection(0.0, 90.0)] * 4, 1.0)

    def test_concentrate_any_count(self):
        def yaws(directions):
            return [direction.yaw_deg for direction in directions]
        three = [ViewDirection(yaw, 90.0) for yaw in (10, 20, 30)]
        self.assertEqual(
            yaws(concentrate_directions(three, 12.0)), [22.0, 20.0, 18.0])
        four = [ViewDirection(yaw, 90.0) for yaw in (10, 20, 30, 40)]
        self.assertEqual(
            yaws(concentrate_directions(four, 5.0)), [15.0, 25.0, 25.0, 35.0])
        five = [ViewDirection(yaw, 80.0) for yaw in (10, 20, 30, 40, 358)]
        self.assertEqual(
            concentrate_directions(five, 5.0), shift_directions(five, 5.0))
        self.assertEqual(concentrate_directions([], 5.0), [])
        with self.assertRaises(ValueError):
            concentrate_directions(three, -1.0)

    def test_shift_with_three_users(self):
        cfg = small_scenario((60.0, 90.0, 120.0), 1e3, delta_deg=12.0)
        self.assertEqual(
            [d.yaw_deg for d in trial_directions(cfg, 0)],
            [72.0, 90.0, 108.0])
        result = run_trial(cfg, SCHEME_ASYMPTOTIC, 0)
        self.assertIsNone(result.error)
        self.assertTrue(np.isfinite(result.total_power_w))
        swept = replace(cfg, sweep_param='k')
        for k in swept.sweep_points():
            result = run_trial(swept.at_sweep_point(k), SCHEME_BASELINE2, 0)
            self.assertIsNone(result.error, k)

    def test_direction_pool(self):
        pool = tuple(
            ViewDirection(float(yaw), 90.0) for yaw in range(0, 300, 30))
        cfg = small_scenario((0.0, 90.0, 180.0), 1e3, direction_pool=pool)
        first = trial_directions(cfg, 17)
        self.assertEqual(first, trial_directions(cfg, 17))
        self.assertEqual(len(set(first)), 3)
        self.assertTrue(all(direction in pool for direction in first))


class ScenarioTestCase(LoggedTestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def _write(self, data):
        path = os.path.join(self.work_dir, 'scenario.json')
        with open(path, 'w') as scenario_file:
            json.dump(data, scenario_file)
        return path

    def test_load_fixture(self):
        cfg = load_scenario(SCENARIO_FIXTURE_PATH)
        self.assertEqual(cfg.k_users, 3)
        self.assertEqual(cfg.n_sc, 16)
        self.assertEqual(cfg.ladder.rates, (2000.0, 4000.0))
        self.assertEqual(cfg.users[2].quality, 2)
        self.assertEqual(cfg.tiling.u_h, 12)
        self.assertNotIn(SCHEME_DC, cfg.schemes)

    def test_overrides(self):
        cfg = load_scenario(SCENARIO_FIXTURE_PATH, trials=5, base_seed=None)
        self.assertEqual(cfg.trials, 5)
        self.assertEqual(cfg.base_seed, 7)

    def test_unknown_keys(self):
        with self.assertRaises(ConfigException):
            load_scenario(self._write({'antennas': 4}))
        with self.assertRaises(ConfigException):
            load_scenario(self._write({'tiling': {'columns': 4}}))
        with self.assertRaises(ConfigException):
            load_scenario(self._write(
                {'users': [{'yaw_deg': 10, 'speed': 1}]}))

    def test_bad_values(self):
        with self.assertRaises(ConfigException):
            load_scenario(self._write({'trials': 0}))
        with self.assertRaises(ConfigException):
            load_scenario(self._write({'schemes': ['baseline3']}))
        with self.assertRaises(ConfigException):
            load_scenario(self._write(
                {'users': [{'yaw_deg': 10, 'quality': 9}]}))
        with self.assertRaises(ConfigException):
            load_scenario(self._write({'users': [{'yaw_deg': 400}]}))
        with self.assertRaises(ConfigException):
            load_scenario(os.path.join(self.work_dir, 'missing.json'))

    def test_presets(self):
        users = preset_scenario(PRESET_USERS)
        self.assertEqual(users.k_users, 5)
        self.assertEqual(users.m, 4)
        self.assertEqual(
            tuple(user.quality for user in users.users), (2, 2, 3, 3, 4))
        self.assertEqual(len(users.direction_pool), 30)
        self.assertEqual(users.sweep_points(), (1, 2, 3, 4, 5))
        antennas = preset_scenario(PRESET_ANTENNAS, trials=3)
        self.assertEqual(
            tuple(user.quality for user in antennas.users), (2, 3, 3, 4))
        self.assertEqual(antennas.sweep_points(), (2, 4, 8, 16))
        self.assertEqual(antennas.trials, 3)
        concentration = preset_scenario(PRESET_CONCENTRATION)
        self.assertEqual(concentration.sweep_param, 'delta')
        self.assertEqual(concentration.k_users, 5)
        self.assertEqual(len(PRESETS), 3)
        with self.assertRaises(ConfigException):
            preset_scenario('zipf')
        self.assertEqual(
            tuple(user.quality for user in default_scenario().users),
            DEFAULT_QUALITIES)

    def test_direction_pool_draw(self):
        pool = random_direction_pool()
        self.assertEqual(pool, random_direction_pool())
        self.assertEqual(len(set(pool)), 30)
        self.assertNotEqual(pool, random_direction_pool(seed=1))
        self.assertTrue(all(0 <= d.pitch_deg <= 180 for d in pool))

    def test_sweep_points(self):
        cfg = small_scenario((0.0, 90.0, 180.0), 1e3, sweep_param='k')
        self.assertEqual(cfg.sweep_points(), (1, 2, 3))
        self.assertEqual(cfg.at_sweep_point(2).k_users, 2)
        cfg = replace(cfg, sweep_param='delta')
        self.assertEqual(
            cfg.sweep_points(), (0.0, 30.0, 60.0, 90.0, 120.0, 150.0))
        cfg = replace(cfg, sweep_param='m', sweep_values=(2, 32))
        self.assertEqual(cfg.at_sweep_point(32).m, 32)


class TrialTestCase(LoggedTestCase):

    def test_single_user_schemes_agree(self):
        """With one user every scheme is MRT plus water-filling."""
        cfg = small_scenario((90.0,), 5e3)
        results = {
            scheme: run_trial(cfg, scheme, 0) for scheme in SCHEMES}
        reference = results[SCHEME_ASYMPTOTIC].total_power_w
        self.assertTrue(np.isfinite(reference))
        seeds = {result.seed for result in results.values()}
        self.assertEqual(len(seeds), 1)
        for scheme, result in results.items():
            self.assertIsNone(result.error, scheme)
            self.assertAlmostEqual(
                result.total_power_w / reference, 1.0, delta=0.02)

    def test_multicast_beats_duplicated_unicast(self):
        """Identical FoVs at a high demand favour one multicast message."""
        cfg = small_scenario((90.0, 90.0, 90.0), 35e3)
        unicast = run_trial(cfg, SCHEME_BASELINE1, 0)
        multicast = run_trial(cfg, SCHEME_BASELINE2, 0)
        self.assertIsNone(unicast.error)
        self.assertIsNone(multicast.error)
        self.assertGreaterEqual(
            unicast.total_power_w, multicast.total_power_w)

    def test_failed_trial_is_flagged(self):
        """More messages than subcarriers cannot be scheduled."""
        cfg = small_scenario((0.0, 60.0, 120.0, 180.0), 1e3, n_sc=2)
        result = run_trial(cfg, SCHEME_ASYMPTOTIC, 0)
        self.assertIsNotNone(result.error)
        self.assertTrue(np.isnan(result.total_power_w))
        self.assertFalse(result.converged)


class ExperimentTestCase(LoggedTestCase):

    def setUp(self):
        self.work_dir = tempfile.mkdtemp()
        self.cfg = load_scenario(SCENARIO_FIXTURE_PATH)
        self.cfg = replace(self.cfg, sweep_param='k')

    def tearDown(self):
        shutil.rmtree(self.work_dir)

    def _run(self, name, cfg=None):
        path = os.path.join(self.work_dir, name)
        return run_experiment(cfg or self.cfg, path)

    def test_rows_and_determinism(self):
        first = self._run('first.csv')
        second = self._run('second.csv')
        with open(first, 'rb') as one, open(second, 'rb') as two:
            content = one.read()
            self.assertEqual(content, two.read())
        lines = content.decode('utf-8').splitlines()
        self.assertEqual(lines[0], ','.join(CSV_HEADER))
        # 3 schemes, 3 sweep points, 2 trials and 2 summary rows each
        self.assertEqual(len(lines) - 1, 3 * 3 * 2 + 3 * 3 * 2)
        self.assertEqual(audit_results(first), 18)

    def test_parallel_matches_serial(self):
        cfg = replace(
            self.cfg, schemes=(SCHEME_ASYMPTOTIC,), sweep_param='none')
        serial = self._run('serial.csv', cfg)
        parallel = self._run('parallel.csv', replace(cfg, workers=2))
        with open(serial, 'rb') as one, open(parallel, 'rb') as two:
            self.assertEqual(one.read(), two.read())

    def test_audit_detects_tampering(self):
        path = self._run('results.csv')
        self._tamper(path, (1,))
        with self.assertRaises(ConstraintViolationException):
            audit_results(path)

    def _tamper(self, path, line_numbers):
        with open(path) as results_file:
            lines = results_file.read().splitlines()
        for number in line_numbers:
            fields = lines[number].split(',')
            fields[5] = '%.10e' % (float(fields[5]) * 2)
            lines[number] = ','.join(fields)
        with open(path, 'w') as results_file:
            results_file.write('\n'.join(lines) + '\n')

    def test_audit_solves_trials_again(self):
        path = self._run('results.csv')
        self.assertEqual(audit_results(path, cfg=self.cfg), 18)
        self.assertEqual(audit_results(path, cfg=self.cfg, recheck=2), 18)

    def test_audit_catches_consistent_tampering(self):
        """A trial row doubled together with its mean only shows up when
        the trial is solved again."""
        cfg = replace(
            self.cfg, schemes=(SCHEME_ASYMPTOTIC,), sweep_param='none',
            trials=1)
        path = self._run('results.csv', cfg)
        # header, trial row, mean row, stderr row
        self._tamper(path, (1, 2))
        self.assertEqual(audit_results(path), 1)
        with self.assertRaises(ConstraintViolationException) as context:
            audit_results(path, cfg=cfg)
        self.assertIn('solved again', context.exception.violations[0])
        with self.assertRaises(ConstraintViolationException):
            audit_results(path, cfg=replace(cfg, base_seed=8))


@unittest.skipUnless(SLOW_TESTS, 'Set TILECAST_SLOW_TESTS to run')
class TrendTestCase(LoggedTestCase):
    """Monte-Carlo trends of the schemes; several minutes each."""

    def _means(self, cfg, scheme):
        means = []
        for value in cfg.sweep_points():
            point = cfg.at_sweep_point(value)
            powers = [
                run_trial(point, scheme, trial).total_power_w
                for trial in range(cfg.trials)]
            means.append(powers)
        return [np.asarray(powers) for powers in means]

    def test_scheme_ordering_and_growth_with_users(self):
        cfg = preset_scenario(PRESET_USERS, n_sc=16, trials=50)
        powers = {
            scheme: self._means(cfg, scheme)
            for scheme in (SCHEME_DC, SCHEME_BASELINE2, SCHEME_BASELINE1)}
        for index in range(1, cfg.k_users):
            self.assertTrue(paired_gap_confidence(
                powers[SCHEME_DC][index], powers[SCHEME_BASELINE2][index]))
            self.assertTrue(paired_gap_confidence(
                powers[SCHEME_BASELINE2][index],
                powers[SCHEME_BASELINE1][index]))
        for scheme, per_k in powers.items():
            means = [mean_and_stderr(values)[0] for values in per_k]
            for low, high in zip(means, means[1:]):
                self.assertGreaterEqual(high, low * 0.95, scheme)

    def test_power_falls_with_antennas(self):
        cfg = preset_scenario(PRESET_ANTENNAS, n_sc=16, trials=50)
        schemes = (
            SCHEME_DC, SCHEME_ASYMPTOTIC, SCHEME_BASELINE2, SCHEME_BASELINE1)
        for scheme in schemes:
            means = [
                mean_and_stderr(values)[0]
                for values in self._means(cfg, scheme)]
            for high, low in zip(means, means[1:]):
                self.assertLessEqual(low, high * 1.05, scheme)
        large = replace(cfg, sweep_values=(32,))
        asymptotic = self._means(large, SCHEME_ASYMPTOTIC)[0]
        baseline2 = self._means(large, SCHEME_BASELINE2)[0]
        self.assertLess(np.mean(asymptotic), np.mean(baseline2))

    def test_power_falls_with_concentration(self):
        cfg = preset_scenario(PRESET_CONCENTRATION, n_sc=16, trials=50)
        for scheme in (SCHEME_DC, SCHEME_ASYMPTOTIC, SCHEME_BASELINE2):
            means = [
                mean_and_stderr(values)[0]
                for values in self._means(cfg, scheme)]
            for high, low in zip(means, means[1:]):
                self.assertLessEqual(low, high * 1.05, scheme)
