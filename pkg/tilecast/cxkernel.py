# coding=utf-8
"""Complex vector kernels shared by the beamformers and the DC solver.

Vectors are one dimensional numpy complex128 arrays. Inner products conjugate
their first argument: cdot(a, b) = a^H b.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import numpy as np

from tilecast import config
from tilecast import LOGGER
from tilecast.exceptions import (
    DimensionMismatchException,
    DegenerateChannelException)


def as_cvec(values):
    """Convert to a finite complex128 vector."""
    vector = np.asarray(values, dtype=np.complex128).ravel()
    if not np.all(np.isfinite(vector)):
        raise DimensionMismatchException(
            'Complex vector has non finite entries: %s' % vector)
    return vector


def _check_lengths(a, b):
    if a.shape != b.shape:
        raise DimensionMismatchException(
            'Vector lengths differ: %s and %s' % (a.shape, b.shape))


def cdot(a, b):
    """Inner product sum(conj(a_i) * b_i).

    :param a: Conjugated vector.
    :type a: numpy.ndarray

    :param b: Second vector.
    :type b: numpy.ndarray

    :returns: a^H b.
    :rtype: complex

    :raises: DimensionMismatchException if the lengths differ.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    _check_lengths(a, b)
    return complex(np.vdot(a, b))


def cnorm(a):
    """Euclidean norm of a complex vector."""
    return float(np.linalg.norm(np.asarray(a)))


def normalize(a):
    """Scale a to unit norm.

    :raises: DegenerateChannelException for the zero vector.
    """
    norm = cnorm(a)
    if norm == 0:
        raise DegenerateChannelException('Cannot normalize a zero vector')
    return np.asarray(a, dtype=np.complex128) / norm


def axpy_outer(w_prev, h, coeff):
    """Compute coeff * h * (h^H w_prev).

    :param w_prev: Vector the rank one matrix h h^H is applied to.
    :type w_prev: numpy.ndarray

    :param h: Channel vector.
    :type h: numpy.ndarray

    :param coeff: Real scale factor.
    :type coeff: float

    :returns: The vector coeff * cdot(h, w_prev) * h.
    :rtype: numpy.ndarray
    """
    h = np.asarray(h, dtype=np.complex128)
    return coeff * cdot(h, w_prev) * h


def principal_eigenvector(
        matrix,
        start,
        tol=config.POWER_ITERATION_TOL,
        max_iter=config.POWER_ITERATION_MAX):
    """Dominant eigenpair of a Hermitian positive semidefinite matrix.

    Power iteration from a given start vector, stopping once the eigenvalue
    estimate changes by less than tol relative to itself. The returned vector
    has unit norm and is phase aligned so that cdot(start, vector) is real
    and non negative.

    :param matrix: Hermitian PSD matrix of shape (m, m).
    :type matrix: numpy.ndarray

    :param start: Nonzero start vector of length m.
    :type start: numpy.ndarray

    :param tol: Relative eigenvalue tolerance.
    :type tol: float

    :param max_iter: Maximum number of matrix products.
    :type max_iter: int

    :returns: Three-tuple (eigenvalue, unit eigenvector, converged flag).
    :rtype: (float, numpy.ndarray, bool)

    :raises: DegenerateChannelException for a zero matrix or a start vector
        in its null space.
    """
    matrix = np.asarray(matrix, dtype=np.complex128)
    start = as_cvec(start)
    if matrix.shape != (start.size, start.size):
        raise DimensionMismatchException(
            'Matrix shape %s does not match vector length %s' % (
                matrix.shape, start.size))
    vector = normalize(start)
    eigenvalue_prev = None
    eigenvalue = 0.0
    converged = False
    for _ in range(max_iter):
        product = matrix @ vector
        eigenvalue = cnorm(product)
        if eigenvalue == 0:
            raise DegenerateChannelException(
                'Power iteration hit the null space of the matrix')
        vector = product / eigenvalue
        if eigenvalue_prev is not None and \
                abs(eigenvalue - eigenvalue_prev) <= tol * eigenvalue:
            converged = True
            break
        eigenvalue_prev = eigenvalue
    if not converged:
        LOGGER.warning(
            'Power iteration stopped after %s steps at eigenvalue %s' % (
                max_iter, eigenvalue))
    phase = cdot(start, vector)
    if abs(phase) > 0:
        vector = vector * (abs(phase) / phase)
    return eigenvalue, vector, converged
