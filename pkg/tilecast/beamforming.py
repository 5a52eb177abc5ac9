# coding=utf-8
"""Beam directions and power quotes per (message, subcarrier).

A power quote q is the transmit power per unit of bottleneck SNR: sending
power P along a unit direction w with quote q gives every audience member a
rate of at least B * log2(1 + P / q). Quotes include the m * sigma^2 factor,
so P is the physical transmit power.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from dataclasses import dataclass

import numpy as np

from tilecast import config
from tilecast import LOGGER
from tilecast.cxkernel import (
    as_cvec,
    cnorm,
    normalize,
    principal_eigenvector)
from tilecast.exceptions import (
    DegenerateChannelException,
    DimensionMismatchException,
    InfeasibleDirectionException)

BEAM_EIGEN = 'eigen'
BEAM_SUM = 'sum'
BASELINE2_BEAMS = (BEAM_EIGEN, BEAM_SUM)


@dataclass(frozen=True, eq=False)
class BeamPlan:
    """Unit directions (n_msgs, n_sc, m) and quotes (n_msgs, n_sc).

    An infinite quote marks a pair whose direction misses an audience member.
    """
    directions: np.ndarray
    quotes: np.ndarray

    def __post_init__(self):
        if self.directions.shape[:2] != self.quotes.shape:
            raise DimensionMismatchException(
                'Beam plan directions %s do not match quotes %s' % (
                    self.directions.shape, self.quotes.shape))

    @property
    def n_messages(self):
        return self.quotes.shape[0]

    @property
    def n_sc(self):
        return self.quotes.shape[1]


def _as_channels(channels):
    channels = np.atleast_2d(np.asarray(channels, dtype=np.complex128))
    if channels.shape[0] < 1:
        raise DimensionMismatchException('The audience is empty')
    return channels


def bottleneck_gain(w, channels, beta):
    """min_k beta_k |h_k^H w|^2 over the audience."""
    channels = _as_channels(channels)
    gains = np.asarray(beta, dtype=float) * np.abs(channels.conj() @ w) ** 2
    return float(np.min(gains))


def quote_for(w, channels, beta, m, noise_w):
    """Power quote of a fixed unit direction for an audience.

    :param w: Unit beam direction.
    :type w: numpy.ndarray

    :param channels: Audience channels, one row per user.
    :type channels: numpy.ndarray

    :param beta: Large-scale gains of the audience.
    :type beta: numpy.ndarray

    :param m: Antenna count.
    :type m: int

    :param noise_w: Noise power sigma^2.
    :type noise_w: float

    :returns: q = m * sigma^2 / min_k beta_k |h_k^H w|^2.
    :rtype: float

    :raises: InfeasibleDirectionException when w is orthogonal to an
        audience channel.
    """
    channels = _as_channels(channels)
    if channels.shape[1] != np.asarray(w).size:
        raise DimensionMismatchException(
            'Direction of length %s for channels of length %s' % (
                np.asarray(w).size, channels.shape[1]))
    gain = bottleneck_gain(w, channels, beta)
    if gain <= 0:
        raise InfeasibleDirectionException(
            'Beam direction is orthogonal to an audience channel')
    return m * noise_w / gain


def asymptotic_beam(channels, beta, m, noise_w):
    """Large-antenna beam: the normalized sum of h_k / sqrt(beta_k).

    :param channels: Audience channels, one row per user.
    :type channels: numpy.ndarray

    :param beta: Large-scale gains of the audience.
    :type beta: numpy.ndarray

    :param m: Antenna count.
    :type m: int

    :param noise_w: Noise power sigma^2.
    :type noise_w: float

    :returns: Two-tuple (unit direction, power quote).
    :rtype: (numpy.ndarray, float)

    :raises: DegenerateChannelException if the weighted sum vanishes.
    """
    channels = _as_channels(channels)
    beta = np.asarray(beta, dtype=float)
    aggregate = (channels / np.sqrt(beta)[:, np.newaxis]).sum(axis=0)
    if cnorm(aggregate) == 0:
        raise DegenerateChannelException(
            'Audience channels cancel out; no asymptotic direction')
    w = normalize(aggregate)
    return w, quote_for(w, channels, beta, m, noise_w)


def mrt_unicast(h):
    """Maximum ratio transmission direction h / ||h||."""
    try:
        return normalize(as_cvec(h))
    except DegenerateChannelException:
        raise DegenerateChannelException('Zero channel has no MRT direction')


def mrt_multicast(channels, beta):
    """Principal eigenvector of sum_k beta_k h_k h_k^H.

    Power iteration starts from the audience channel with the largest
    beta_k ||h_k||^2.

    :param channels: Audience channels, one row per user.
    :type channels: numpy.ndarray

    :param beta: Large-scale gains of the audience.
    :type beta: numpy.ndarray

    :returns: Unit direction.
    :rtype: numpy.ndarray

    :raises: DegenerateChannelException for an all zero audience.
    """
    channels = _as_channels(channels)
    beta = np.asarray(beta, dtype=float)
    strengths = beta * np.sum(np.abs(channels) ** 2, axis=1)
    if np.max(strengths) == 0:
        raise DegenerateChannelException('All audience channels are zero')
    # sum_k beta_k h_k h_k^H
    matrix = (channels.T * beta) @ channels.conj()
    start = channels[int(np.argmax(strengths))]
    _, vector, _ = principal_eigenvector(matrix, start)
    return vector


def weighted_sum_beam(channels, beta):
    """Normalized beta weighted channel sum, the alternative multicast MRT."""
    channels = _as_channels(channels)
    beta = np.asarray(beta, dtype=float)
    aggregate = (channels * beta[:, np.newaxis]).sum(axis=0)
    if cnorm(aggregate) == 0:
        raise DegenerateChannelException(
            'Audience channels cancel out; no weighted sum direction')
    return normalize(aggregate)


def _plan(state, messages, direction_for):
    n_msgs = len(messages)
    directions = np.zeros((n_msgs, state.n_sc, state.m), dtype=np.complex128)
    quotes = np.full((n_msgs, state.n_sc), np.inf)
    for i, message in enumerate(messages):
        beta = state.audience_beta(message.audience)
        for n in range(state.n_sc):
            channels = state.audience_channels(n, message.audience)
            w = direction_for(channels, beta)
            directions[i, n] = w
            try:
                quotes[i, n] = quote_for(
                    w, channels, beta, state.m, state.noise_w)
            except InfeasibleDirectionException:
                LOGGER.debug(
                    'Message %s cannot use subcarrier %s' % (
                        message.label, n + 1))
    return BeamPlan(directions=directions, quotes=quotes)


def asymptotic_plan(state, messages):
    """Beam plan of the large-antenna solution.

    :param state: The channel state.
    :type state: ChannelState

    :param messages: The messages to transmit.
    :type messages: list

    :returns: Directions and quotes for every (message, subcarrier).
    :rtype: BeamPlan
    """
    def direction_for(channels, beta):
        w, _ = asymptotic_beam(channels, beta, state.m, state.noise_w)
        return w
    return _plan(state, messages, direction_for)


def mrt_plan(state, messages, beam=config.BASELINE2_BEAM):
    """Beam plan of the MRT baselines.

    Single user audiences get MRT; larger audiences get the principal
    eigenvector ('eigen') or the weighted channel sum ('sum').

    :param state: The channel state.
    :type state: ChannelState

    :param messages: The messages to transmit.
    :type messages: list

    :param beam: Multicast direction rule, 'eigen' or 'sum'.
    :type beam: str

    :returns: Directions and quotes for every (message, subcarrier).
    :rtype: BeamPlan
    """
    if beam not in BASELINE2_BEAMS:
        raise ValueError('Unknown multicast beam %r' % beam)
    multicast = mrt_multicast if beam == BEAM_EIGEN else weighted_sum_beam

    def direction_for(channels, beta):
        if channels.shape[0] == 1:
            return mrt_unicast(channels[0])
        return multicast(channels, beta)
    return _plan(state, messages, direction_for)
