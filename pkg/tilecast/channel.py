# coding=utf-8
"""Synthetic downlink channel state.

Small-scale fading is i.i.d. circularly symmetric complex Gaussian with unit
variance per complex entry. Samples come from numpy's PCG64 bit generator
through Generator.standard_normal (ziggurat transform): the real and
imaginary parts are drawn as two consecutive blocks of shape
(n_sc, k_users, m) and combined as (re + 1j * im) / sqrt(2). The stream for
a seed is therefore stable for a given numpy release series.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from dataclasses import dataclass

import numpy as np

from tilecast import config
from tilecast.exceptions import DimensionMismatchException

# Spacing between the streams of consecutive base seeds
TRIAL_SEED_STRIDE = 2 ** 32


@dataclass(frozen=True, eq=False)
class ChannelState:
    """Channels h[n, k] (length m) of user k + 1 on subcarrier n + 1."""
    m: int
    n_sc: int
    k_users: int
    bandwidth_hz: float
    noise_w: float
    beta: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        if self.m < 1 or self.n_sc < 1 or self.k_users < 1:
            raise DimensionMismatchException(
                'Channel dimensions must be positive, got m=%s n_sc=%s '
                'k_users=%s' % (self.m, self.n_sc, self.k_users))
        if not self.noise_w > 0:
            raise DimensionMismatchException(
                'Noise power must be positive, got %s' % self.noise_w)
        if not self.bandwidth_hz > 0:
            raise DimensionMismatchException(
                'Bandwidth must be positive, got %s' % self.bandwidth_hz)
        beta = np.asarray(self.beta, dtype=float)
        if beta.shape != (self.k_users,) or np.any(beta <= 0):
            raise DimensionMismatchException(
                'Expected %s positive large-scale gains, got %s' % (
                    self.k_users, self.beta))
        h = np.asarray(self.h, dtype=np.complex128)
        if h.shape != (self.n_sc, self.k_users, self.m):
            raise DimensionMismatchException(
                'Channel array has shape %s, expected %s' % (
                    h.shape, (self.n_sc, self.k_users, self.m)))
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'h', h)

    def audience_channels(self, n, audience):
        """Channels on subcarrier n (0 based) of the 1 based users.

        :returns: Array of shape (len(audience), m).
        :rtype: numpy.ndarray
        """
        return self.h[n, [user - 1 for user in audience], :]

    def audience_beta(self, audience):
        return self.beta[[user - 1 for user in audience]]

    def subset(self, users):
        """Channel state restricted to some 1 based users, renumbered 1.."""
        index = [user - 1 for user in users]
        return ChannelState(
            m=self.m,
            n_sc=self.n_sc,
            k_users=len(index),
            bandwidth_hz=self.bandwidth_hz,
            noise_w=self.noise_w,
            beta=self.beta[index],
            h=self.h[:, index, :])


def complex_gaussian(rng, shape):
    """Draw unit variance circularly symmetric complex Gaussian samples.

    :param rng: The generator.
    :type rng: numpy.random.Generator

    :param shape: Output shape.
    :type shape: tuple

    :returns: Complex samples, real and imaginary parts of variance 1/2.
    :rtype: numpy.ndarray
    """
    real = rng.standard_normal(shape)
    imag = rng.standard_normal(shape)
    return (real + 1j * imag) / np.sqrt(2)


def make_rng(seed):
    """The generator used for every random draw of a trial."""
    return np.random.Generator(np.random.PCG64(seed))


def sample_channel(
        seed,
        m=config.ANTENNAS,
        n_sc=config.SUBCARRIERS,
        k_users=1,
        beta=None,
        noise_w=config.NOISE_W,
        bandwidth_hz=config.BANDWIDTH_HZ):
    """Sample a channel state deterministically from a seed.

    :param seed: Non negative integer seed.
    :type seed: int

    :param m: Transmit antennas.
    :type m: int

    :param n_sc: Subcarriers.
    :type n_sc: int

    :param k_users: Users.
    :type k_users: int

    :param beta: Large-scale gain per user, all 1 when omitted.
    :type beta: list

    :param noise_w: Noise power per subcarrier in watts.
    :type noise_w: float

    :param bandwidth_hz: Subcarrier bandwidth in Hz.
    :type bandwidth_hz: float

    :returns: The channel state.
    :rtype: ChannelState
    """
    if beta is None:
        beta = np.ones(k_users)
    rng = make_rng(seed)
    h = complex_gaussian(rng, (n_sc, k_users, m))
    return ChannelState(
        m=m,
        n_sc=n_sc,
        k_users=k_users,
        bandwidth_hz=bandwidth_hz,
        noise_w=noise_w,
        beta=np.asarray(beta, dtype=float),
        h=h)


def derive_trial_seed(base_seed, trial_index):
    """Seed of one Monte-Carlo trial.

    The mapping is base_seed * 2**32 + trial_index. It is injective for
    trial indices below 2**32 and will not change between releases.

    :param base_seed: Experiment seed, non negative.
    :type base_seed: int

    :param trial_index: Trial number, 0 <= trial_index < 2**32.
    :type trial_index: int

    :returns: The trial seed.
    :rtype: int
    """
    if not 0 <= trial_index < TRIAL_SEED_STRIDE:
        raise ValueError('Trial index %s out of range' % trial_index)
    if base_seed < 0:
        raise ValueError('Base seed must be non negative, got %s' % base_seed)
    return int(base_seed) * TRIAL_SEED_STRIDE + int(trial_index)
