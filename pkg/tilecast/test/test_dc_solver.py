# coding=utf-8
"""Test cases for the DC solver.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import unittest
from dataclasses import replace

import numpy as np
import numpy.testing as npt

from tilecast.audit import audit_allocation
from tilecast.beamforming import asymptotic_plan
from tilecast.channel import make_rng, sample_channel
from tilecast.dc_solver import (
    DcDuals,
    DcResiduals,
    _rebalance,
    c_rule,
    dc_solve,
    g_value,
    initial_point,
    mu_rule,
    solve_convex_approx,
    subgrad_step,
    w_rule)
from tilecast.exceptions import (
    DimensionMismatchException,
    NoAssignmentException)
from tilecast.ofdma_alloc import (
    LN2,
    allocation_from_assignment,
    assemble_allocation,
    assignment_powers,
    solve_quoted_allocation)
from tilecast.partition import QualityLadder, build_messages, build_partition
from tilecast.test.helpers import (
    PARTITION_FIXTURE_PATH,
    SLOW_TESTS,
    load_fixture,
    single_user_messages)
from tilecast.test.logged_unittest import LoggedTestCase

B = 39e3


def three_user_messages():
    fixture = load_fixture(PARTITION_FIXTURE_PATH)
    part = build_partition([set(tiles) for tiles in fixture['tile_sets']])
    ladder = QualityLadder((4e3, 8e3))
    return build_messages(part, fixture['qualities'], ladder)


class ClosedFormTestCase(LoggedTestCase):
    """Test the per pair closed forms of the dual loop."""

    def test_g_value(self):
        self.assertEqual(g_value(0.0, 2.5), 2.5)
        self.assertEqual(g_value(1.0, 0.0), -np.inf)
        self.assertAlmostEqual(g_value(2 * LN2, 2.0, 3.0), -4.0)
        values = g_value(np.array([0.0, 1.0]), np.array([1.5, 0.0]))
        npt.assert_array_equal(values, [1.5, -np.inf])

    def test_mu_rule(self):
        mu, unique = mu_rule(np.array([1.0, 3.0, 2.0]))
        npt.assert_array_equal(mu, [0, 1, 0])
        self.assertTrue(unique)
        mu, unique = mu_rule(np.array([3.0, 3.0, 1.0]))
        npt.assert_array_equal(mu, [1, 0, 0])
        self.assertFalse(unique)
        mu, _ = mu_rule(np.array([-np.inf, -1.0]))
        npt.assert_array_equal(mu, [0, 1])
        with self.assertRaises(NoAssignmentException):
            mu_rule(np.array([-np.inf, -np.inf]))

    def test_mu_rule_matches_scan(self):
        rng = make_rng(5)
        for _ in range(50):
            g = rng.standard_normal(6)
            mu, _ = mu_rule(g)
            best = 0
            for index, value in enumerate(g):
                if value > g[best]:
                    best = index
            self.assertEqual(int(np.argmax(mu)), best)

    def test_c_rule(self):
        self.assertAlmostEqual(c_rule(2 * LN2, 1.0, 1, 5.0), 5.0)
        self.assertEqual(c_rule(2 * LN2, 1.0, 0, 5.0), 0.0)
        self.assertEqual(c_rule(0.5 * LN2, 1.0, 1, 5.0), 0.0)
        self.assertEqual(c_rule(0.0, 1.0, 1, 5.0), 0.0)

    def test_w_rule_orthogonal_point(self):
        channels = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        w_prev = np.array([0.0, 0.0, 1.0])
        W = w_rule(
            np.ones(2), channels, np.ones(2), w_prev, 1, 0.0, 3, 1.0, 1.0)
        npt.assert_array_equal(W, np.zeros(3))

    def test_w_rule_single_user(self):
        """The linearized rate constraint holds with equality."""
        rng = make_rng(6)
        h = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        w_prev = 0.3 * h / np.linalg.norm(h)
        m, noise, c = 4, 0.5, 2.0 * B
        W = w_rule(
            np.ones(1), h[np.newaxis], np.array([0.8]), w_prev, 1, c,
            m, noise, B)
        npt.assert_allclose(
            np.abs(np.vdot(W, h)), np.linalg.norm(W) * np.linalg.norm(h))
        a_prev = np.vdot(h, w_prev)
        tangent = 0.8 * (
            2 * np.real(np.conj(a_prev) * np.vdot(h, W)) -
            abs(a_prev) ** 2) / (m * noise)
        self.assertAlmostEqual(tangent / (2 ** (c / B) - 1), 1.0, places=10)

    def test_w_rule_unassigned_and_mismatch(self):
        h = np.array([[1.0, 1.0]])
        W = w_rule(np.ones(1), h, np.ones(1), np.ones(2), 0, 0.0, 2, 1.0, B)
        npt.assert_array_equal(W, np.zeros(2))
        with self.assertRaises(DimensionMismatchException):
            w_rule(np.ones(1), h, np.ones(1), np.ones(3), 1, 1.0, 2, 1.0, B)

    def test_subgrad_step(self):
        duals = DcDuals(gamma=np.array([1.0]), lam=np.array([[[0.0, 2.0]]]))
        same = subgrad_step(
            duals, DcResiduals(np.zeros((1, 1, 2)), np.zeros(1)), 0.5)
        npt.assert_array_equal(same.gamma, duals.gamma)
        npt.assert_array_equal(same.lam, duals.lam)
        step = subgrad_step(
            duals,
            DcResiduals(np.array([[[-1.0, 1.0]]]), np.array([-4.0])), 0.5)
        npt.assert_array_equal(step.lam, [[[0.0, 2.5]]])
        npt.assert_array_equal(step.gamma, [0.0])


class DcSolverTestCase(LoggedTestCase):
    """Test the DC iterations end to end."""

    def test_initial_point_is_asymptotic_solution(self):
        state = sample_channel(1, m=4, n_sc=8, k_users=3)
        messages = three_user_messages()
        point = initial_point(state, messages, mode='asymptotic')
        plan = asymptotic_plan(state, messages)
        alloc = assemble_allocation(
            solve_quoted_allocation(messages, plan.quotes, B, m=4), plan)
        self.assertAlmostEqual(
            point.objective_w / alloc.total_power_w, 1.0, places=12)
        npt.assert_array_equal(point.mu.sum(axis=0), 1.0)

    def test_random_start_is_relaxed(self):
        state = sample_channel(2, m=4, n_sc=8, k_users=3)
        messages = three_user_messages()
        point = initial_point(state, messages, mode='random', seed=3)
        npt.assert_allclose(point.mu, 1.0 / len(messages))
        npt.assert_allclose(point.mu.sum(axis=0), 1.0)
        with self.assertRaises(ValueError):
            initial_point(state, messages, mode='other')

    def test_single_user_convex_approximation(self):
        """Linearizing at the optimum keeps the water-filling power."""
        state = sample_channel(3, m=4, n_sc=8, k_users=1)
        messages = single_user_messages([4 * B])
        point = initial_point(state, messages, mode='asymptotic')
        result = solve_convex_approx(point, state, messages)
        self.assertLessEqual(
            result.point.objective_w, point.objective_w * (1 + 1e-12))
        self.assertGreaterEqual(
            result.point.objective_w, point.objective_w * (1 - 1e-3))
        npt.assert_array_equal(result.point.mu.sum(axis=0), 1.0)

    def test_single_user_matches_asymptotic(self):
        state = sample_channel(4, m=4, n_sc=8, k_users=1)
        messages = single_user_messages([4 * B])
        plan = asymptotic_plan(state, messages)
        asym = assemble_allocation(
            solve_quoted_allocation(messages, plan.quotes, B, m=4), plan)
        alloc = dc_solve(state, messages, outer_max=10)
        self.assertLessEqual(
            alloc.total_power_w, asym.total_power_w * (1 + 1e-9))
        self.assertGreaterEqual(
            alloc.total_power_w, asym.total_power_w * 0.98)
        self.assertTrue(audit_allocation(alloc, state, messages))

    def _check_monotone_and_feasible(self, seeds, outer_max):
        messages = three_user_messages()
        for seed in seeds:
            state = sample_channel(seed, m=4, n_sc=8, k_users=3)
            alloc = dc_solve(state, messages, outer_max=outer_max)
            history = np.asarray(alloc.history)
            self.assertTrue(
                np.all(history[1:] <= history[:-1] * (1 + 1e-8)),
                'seed %s: objective went up %s' % (seed, history))
            self.assertLessEqual(
                alloc.total_power_w, history[0] * (1 + 1e-8))
            self.assertAlmostEqual(
                history[-1] / alloc.total_power_w, 1.0, places=9)
            self.assertTrue(np.all(np.isin(alloc.mu, (0, 1))))
            npt.assert_array_equal(alloc.mu.sum(axis=0), 1)
            self.assertTrue(audit_allocation(alloc, state, messages))

    def test_monotone_and_feasible(self):
        self._check_monotone_and_feasible(range(3), outer_max=10)

    @unittest.skipUnless(SLOW_TESTS, 'Set TILECAST_SLOW_TESTS to run')
    def test_monotone_and_feasible_twenty_seeds(self):
        self._check_monotone_and_feasible(range(20), outer_max=100)

    def test_random_start_ends_binary(self):
        state = sample_channel(5, m=4, n_sc=8, k_users=3)
        messages = three_user_messages()
        alloc = dc_solve(
            state, messages, start_mode='random', seed=1, outer_max=5)
        self.assertTrue(np.all(np.isin(alloc.mu, (0, 1))))
        self.assertTrue(audit_allocation(alloc, state, messages))
        if len(alloc.history) > 1:
            self.assertAlmostEqual(
                alloc.history[-1] / alloc.total_power_w, 1.0, places=9)

    def test_idle_pairs_can_take_a_subcarrier(self):
        """Pairs without a beam are linearized along the plan."""
        state = sample_channel(6, m=4, n_sc=8, k_users=3)
        messages = three_user_messages()
        point = initial_point(state, messages, mode='asymptotic')
        plan = asymptotic_plan(state, messages)
        result = solve_convex_approx(
            point, state, messages, max_iter=300, plan=plan)
        candidate = result.point
        self.assertLessEqual(
            candidate.objective_w, point.objective_w * (1 + 1e-12))
        npt.assert_array_equal(candidate.mu.sum(axis=0), 1.0)
        idle = candidate.mu == 0
        self.assertTrue(np.all(candidate.W[idle] == 0))

    def test_rebalance_clears_unassigned_pairs(self):
        state = sample_channel(6, m=4, n_sc=8, k_users=3)
        messages = three_user_messages()
        point = initial_point(state, messages, mode='asymptotic')
        idle = point.mu == 0
        stray = np.where(idle[:, :, np.newaxis], 0.1 + 0.1j, 0.0)
        noisy = replace(point, W=point.W + stray)
        rebalanced = _rebalance(noisy, state, messages)
        npt.assert_array_equal(rebalanced.assignment, point.assignment)
        self.assertTrue(np.all(rebalanced.W[idle] == 0))
        self.assertLess(rebalanced.objective_w, noisy.objective_w)
        self.assertLessEqual(
            rebalanced.objective_w, point.objective_w * (1 + 1e-9))

    def test_poor_start_is_reassigned(self):
        """A start with every subcarrier on the wrong message improves by
        moving subcarriers, since single user beams are already MRT."""
        state = sample_channel(7, m=4, n_sc=8, k_users=2)
        messages = single_user_messages([2 * B, 3 * B])
        plan = asymptotic_plan(state, messages)
        good = solve_quoted_allocation(messages, plan.quotes, B, m=4)
        poor_assign = 1 - good.assignment
        demands = np.array([2 * B, 3 * B])
        _, powers = assignment_powers(poor_assign, plan.quotes, demands, B)
        poor = assemble_allocation(
            allocation_from_assignment(
                poor_assign, plan.quotes, powers, B, m=4), plan)
        self.assertGreater(poor.total_power_w, good.total_power_w)

        alloc = dc_solve(
            state, messages, start=poor, outer_max=5, inner_max=300)
        self.assertTrue(np.any(alloc.assignment != poor_assign))
        self.assertLess(alloc.total_power_w, poor.total_power_w * 0.999)
        self.assertLessEqual(
            alloc.total_power_w, good.total_power_w * (1 + 1e-3))
        self.assertTrue(audit_allocation(alloc, state, messages))
