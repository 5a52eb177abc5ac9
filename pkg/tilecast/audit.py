# coding=utf-8
"""Constraint audit of a complete allocation, shared by every scheme.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import numpy as np

from tilecast import LOGGER
from tilecast.exceptions import ConstraintViolationException

AUDIT_RTOL = 1e-6


def audit_allocation(alloc, state, messages, rtol=AUDIT_RTOL):
    """Check an allocation against every transmission constraint.

    Checked: mu binary with one message per subcarrier, eta >= 0, unit
    beamformers, c >= 0, every audience member able to decode its message's
    rate on each subcarrier, c <= B log2(1 + beta_k eta |h_k^H w|^2 /
    (m sigma^2)), and every message's demand met by the sum of its rates.

    :param alloc: The allocation, beamformers included.
    :type alloc: Allocation

    :param state: The channel state the allocation was made for.
    :type state: ChannelState

    :param messages: The messages, in allocation row order.
    :type messages: list

    :param rtol: Relative tolerance of the numeric checks.
    :type rtol: float

    :returns: True when every constraint holds.
    :rtype: bool

    :raises: ConstraintViolationException listing every violation.
    """
    violations = []
    mu = np.asarray(alloc.mu)
    n_msgs, n_sc = mu.shape
    if n_msgs != len(messages) or n_sc != state.n_sc:
        raise ConstraintViolationException(
            'Allocation of shape %s does not fit %s messages on %s '
            'subcarriers' % (mu.shape, len(messages), state.n_sc),
            violations=['shape'])
    if not np.all(np.isin(mu, (0, 1))):
        violations.append('assignment is not binary')
    bad_columns = np.flatnonzero(mu.sum(axis=0) != 1)
    if bad_columns.size:
        violations.append(
            'subcarriers %s do not carry exactly one message' %
            (bad_columns + 1).tolist())
    if np.any(alloc.eta < 0):
        violations.append('negative power')
    if np.any(alloc.c < 0):
        violations.append('negative rate')
    if alloc.w is None:
        violations.append('beamformers are missing')
    else:
        norms = np.linalg.norm(alloc.w, axis=1)
        off = np.flatnonzero(np.abs(norms - 1.0) > rtol)
        if off.size:
            violations.append(
                'beamformers of subcarriers %s are not unit norm' %
                (off + 1).tolist())
        noise = state.m * state.noise_w
        for n in range(n_sc):
            for i in np.flatnonzero(mu[:, n]):
                rate = alloc.c[i, n]
                if rate <= 0:
                    continue
                audience = messages[i].audience
                gains = state.audience_beta(audience) * np.abs(
                    state.audience_channels(n, audience).conj() @
                    alloc.w[n]) ** 2
                capacity = alloc.bandwidth_hz * np.log2(
                    1.0 + alloc.eta[i, n] * gains / noise)
                short = np.flatnonzero(rate > capacity * (1.0 + rtol))
                for index in short:
                    violations.append(
                        'user %s cannot decode %s on subcarrier %s '
                        '(%.6e > %.6e bit/s)' % (
                            audience[index], messages[i].label, n + 1,
                            rate, capacity[index]))
    for i, message in enumerate(messages):
        delivered = float(np.sum(mu[i] * alloc.c[i]))
        if delivered < message.demand_bits_per_s * (1.0 - rtol):
            violations.append(
                'message %s gets %.6e of %.6e bit/s' % (
                    message.label, delivered, message.demand_bits_per_s))
    if violations:
        for violation in violations:
            LOGGER.warning('Audit: %s' % violation)
        raise ConstraintViolationException(
            '%s constraint violation(s): %s' % (
                len(violations), violations[0]),
            violations=violations)
    return True
