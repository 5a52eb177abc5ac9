# coding=utf-8
"""Test cases for the allocation audit.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from dataclasses import replace

from tilecast.audit import audit_allocation
from tilecast.beamforming import mrt_plan
from tilecast.channel import sample_channel
from tilecast.exceptions import ConstraintViolationException
from tilecast.ofdma_alloc import assemble_allocation, solve_quoted_allocation
from tilecast.partition import Message
from tilecast.test.logged_unittest import LoggedTestCase

B = 39e3


class AuditTestCase(LoggedTestCase):

    def setUp(self):
        self.state = sample_channel(8, m=4, n_sc=6, k_users=3)
        self.messages = [
            Message((1, 2), 1, (1, 2), 2, 2 * B),
            Message((3,), 1, (3,), 1, B)]
        plan = mrt_plan(self.state, self.messages)
        self.alloc = assemble_allocation(
            solve_quoted_allocation(
                self.messages, plan.quotes, B, m=self.state.m), plan)

    def test_feasible_allocation_passes(self):
        self.assertTrue(
            audit_allocation(self.alloc, self.state, self.messages))

    def test_rate_above_capacity(self):
        inflated = replace(self.alloc, c=self.alloc.c * 1.01)
        with self.assertRaises(ConstraintViolationException) as context:
            audit_allocation(inflated, self.state, self.messages)
        self.assertTrue(any(
            'cannot decode' in violation
            for violation in context.exception.violations))

    def test_demand_not_met(self):
        starved = replace(self.alloc, c=self.alloc.c * 0.5)
        with self.assertRaises(ConstraintViolationException) as context:
            audit_allocation(starved, self.state, self.messages)
        self.assertTrue(any(
            'gets' in violation
            for violation in context.exception.violations))

    def test_structure(self):
        with self.assertRaises(ConstraintViolationException):
            audit_allocation(
                replace(self.alloc, w=None), self.state, self.messages)
        doubled = self.alloc.mu.copy()
        doubled[:, 0] = 1
        with self.assertRaises(ConstraintViolationException):
            audit_allocation(
                replace(self.alloc, mu=doubled), self.state, self.messages)
        with self.assertRaises(ConstraintViolationException):
            audit_allocation(
                replace(self.alloc, w=self.alloc.w * 2.0),
                self.state, self.messages)
        with self.assertRaises(ConstraintViolationException):
            audit_allocation(self.alloc, self.state, self.messages[:1])
