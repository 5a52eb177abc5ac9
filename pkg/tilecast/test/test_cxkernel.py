# coding=utf-8
"""Test cases for the complex vector kernels.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import numpy as np
import numpy.testing as npt

from tilecast.channel import make_rng
from tilecast.cxkernel import (
    axpy_outer,
    cdot,
    cnorm,
    normalize,
    principal_eigenvector)
from tilecast.exceptions import (
    DegenerateChannelException,
    DimensionMismatchException)
from tilecast.test.logged_unittest import LoggedTestCase


class CxKernelTestCase(LoggedTestCase):

    def test_cdot_conjugates_first(self):
        a = np.array([1j, 2.0])
        b = np.array([1.0, 1j])
        self.assertEqual(cdot(a, b), -1j + 2j)
        self.assertEqual(cdot(a, a), 5.0)

    def test_cdot_length_mismatch(self):
        with self.assertRaises(DimensionMismatchException):
            cdot(np.ones(2), np.ones(3))

    def test_cdot_conjugate_symmetry_and_bound(self):
        rng = make_rng(6)
        for _ in range(200):
            size = int(rng.integers(1, 9))
            a = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            b = rng.standard_normal(size) + 1j * rng.standard_normal(size)
            self.assertAlmostEqual(cdot(a, b), np.conj(cdot(b, a)), places=12)
            self.assertLessEqual(
                abs(cdot(a, b)), cnorm(a) * cnorm(b) * (1 + 1e-12))
            self.assertAlmostEqual(
                cdot(a, a).real, cnorm(a) ** 2, places=10)

    def test_normalize(self):
        vector = normalize(np.array([3.0, 4j]))
        self.assertAlmostEqual(cnorm(vector), 1.0)
        with self.assertRaises(DegenerateChannelException):
            normalize(np.zeros(3))

    def test_axpy_outer(self):
        h = np.array([1.0, 1j])
        w = np.array([2.0, 0.0])
        npt.assert_allclose(axpy_outer(w, h, 0.5), 0.5 * 2.0 * h)

    def test_principal_eigenvector(self):
        """Power iteration agrees with a dense eigensolver."""
        rng = make_rng(1)
        channels = rng.standard_normal((3, 4)) + \
            1j * rng.standard_normal((3, 4))
        matrix = channels.T @ channels.conj()
        value, vector, converged = principal_eigenvector(matrix, channels[0])
        values, vectors = np.linalg.eigh(matrix)
        self.assertTrue(converged)
        self.assertAlmostEqual(value / values[-1], 1.0, places=6)
        self.assertAlmostEqual(
            abs(cdot(vectors[:, -1], vector)), 1.0, places=5)
        start_phase = cdot(channels[0], vector)
        self.assertAlmostEqual(start_phase.imag, 0.0, places=12)
        self.assertGreater(start_phase.real, 0.0)

    def test_principal_eigenvector_null_space(self):
        matrix = np.diag([1.0, 0.0]).astype(complex)
        with self.assertRaises(DegenerateChannelException):
            principal_eigenvector(matrix, np.array([0.0, 1.0]))
