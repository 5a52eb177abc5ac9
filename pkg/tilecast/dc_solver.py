# coding=utf-8
"""General case solver: difference-of-convex iterations on the relaxed
problem.

The beam of message i on subcarrier n is merged with its power into one
vector W[i, n] with ||W||^2 = eta. The rate constraint of user k,
mu * (2 ** (c / (B * mu)) - 1) <= beta_k |h^H W|^2 / (m * sigma^2), is a
difference of convex functions; each outer iteration replaces the right
hand side by its tangent at the previous point Wp:

    beta_k * (2 Re{Wp^H h h^H W} - |h^H Wp|^2) / (m * sigma^2)

and solves the resulting convex problem by dual subgradient iterations over
the closed forms g_value, mu_rule, c_rule and w_rule. The dual loop runs in
normalized units (B = 1, W scaled by 1 / sqrt(m * sigma^2)). Between outer
iterations the rates are rebalanced by exact water-filling on the new beam
directions and the subcarriers are reassigned over the new quotes. Pairs
without a beam are linearized along the large-antenna direction so that a
subcarrier can change hands inside the dual loop too. The objective
(1 / m) * sum ||W||^2 never increases.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import nnls

from tilecast import config
from tilecast import LOGGER
from tilecast.beamforming import (
    BeamPlan, asymptotic_plan, mrt_plan, quote_for)
from tilecast.channel import complex_gaussian, make_rng
from tilecast.cxkernel import axpy_outer, cnorm, normalize
from tilecast.exceptions import (
    DimensionMismatchException,
    InfeasibleAllocationException,
    InfeasibleDirectionException,
    NoAssignmentException,
    NonConvergenceException)
from tilecast.ofdma_alloc import (
    LN2,
    allocation_from_assignment,
    assemble_allocation,
    assignment_powers,
    solve_quoted_allocation)

START_ASYMPTOTIC = 'asymptotic'
START_BASELINE2 = 'baseline2'
START_BEST = 'best'
START_RANDOM = 'random'
DC_STARTS = (START_ASYMPTOTIC, START_BASELINE2, START_BEST, START_RANDOM)

# Dual iterations between two feasibility repairs
REPAIR_EVERY = 10
# Dual iterations before a stalled convex approximation may stop
MIN_INNER_ITER = 100
# Largest per subcarrier rate, bits/s/Hz, an idle pair is linearized for
MAX_SEED_RATE = 60.0


@dataclass(frozen=True, eq=False)
class DcState:
    """A point of the relaxed problem.

    W has shape (messages, subcarriers, m), mu and c (bits/s) have shape
    (messages, subcarriers). assignment is the message served on each
    subcarrier and directions the unit beam last used there.
    """
    W: np.ndarray
    mu: np.ndarray
    c: np.ndarray
    assignment: np.ndarray
    directions: np.ndarray
    m: int
    t: int = 0

    def __post_init__(self):
        if self.W.shape[:2] != self.mu.shape or self.mu.shape != self.c.shape:
            raise DimensionMismatchException(
                'Inconsistent DC state shapes %s, %s, %s' % (
                    self.W.shape, self.mu.shape, self.c.shape))

    @property
    def objective_w(self):
        return float(np.sum(np.abs(self.W) ** 2)) / self.m


@dataclass
class DcDuals:
    """Demand multipliers gamma (messages,) and rate constraint
    multipliers lam (messages, subcarriers, users), zero outside audiences."""
    gamma: np.ndarray
    lam: np.ndarray


@dataclass
class DcResiduals:
    """Constraint violations driving one subgradient step."""
    violation: np.ndarray
    shortfall: np.ndarray


@dataclass(frozen=True, eq=False)
class ConvexApproxResult:
    point: DcState
    converged: bool
    unique_argmax: bool
    iterations: int


def g_value(gamma, lambda_sum, bandwidth_hz=1.0):
    """Assignment metric of a (message, subcarrier) pair.

    gamma * log2(gamma / (ln 2 * lambda_sum)) - gamma * B / ln 2
    + lambda_sum, with the value lambda_sum when gamma is 0 and -inf when
    lambda_sum is 0 and gamma is positive. Works elementwise on arrays.

    :param gamma: Demand multiplier of the message, >= 0.
    :type gamma: float

    :param lambda_sum: Sum of the pair's rate constraint multipliers, >= 0.
    :type lambda_sum: float

    :param bandwidth_hz: Bandwidth; 1 in normalized units.
    :type bandwidth_hz: float

    :returns: The metric.
    :rtype: float
    """
    gamma = np.asarray(gamma, dtype=float)
    lambda_sum = np.asarray(lambda_sum, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        core = gamma * np.log2(gamma / (LN2 * lambda_sum)) \
            - gamma * bandwidth_hz / LN2 + lambda_sum
    value = np.where(
        gamma == 0, lambda_sum, np.where(lambda_sum == 0, -np.inf, core))
    return value.item() if value.ndim == 0 else value


def _assign_columns(g, fallback=None):
    """Argmax per column with the first index winning ties.

    Columns without a finite value keep their fallback entry.
    """
    g = np.asarray(g, dtype=float)
    finite = np.any(np.isfinite(g), axis=0)
    if fallback is None and not np.all(finite):
        raise NoAssignmentException(
            'No message can be assigned on %s subcarrier(s)' % np.sum(~finite))
    winners = np.argmax(g, axis=0)
    if fallback is not None:
        winners = np.where(finite, winners, fallback)
    top = g[winners, np.arange(g.shape[1])]
    ties = (np.sum(g == top, axis=0) > 1) & np.isfinite(top)
    return winners, not np.any(ties)


def mu_rule(g):
    """Binary assignment of one subcarrier from its g values.

    :param g: g value of every message on the subcarrier.
    :type g: numpy.ndarray

    :returns: Two-tuple (indicator vector, True if the maximum is unique).
        Ties go to the smallest message index.
    :rtype: (numpy.ndarray, bool)

    :raises: NoAssignmentException when every value is -inf.
    """
    g = np.asarray(g, dtype=float)
    winners, unique = _assign_columns(g[:, np.newaxis])
    mu = np.zeros(g.size, dtype=int)
    mu[winners[0]] = 1
    return mu, unique


def c_rule(gamma, lambda_sum, mu, bandwidth_hz=1.0):
    """Rate mu * B * max(0, log2(gamma / (ln 2 * lambda_sum))).

    It is 0 when mu or gamma is 0 and inf when only lambda_sum is 0.
    Works elementwise on arrays.
    """
    gamma = np.asarray(gamma, dtype=float)
    lambda_sum = np.asarray(lambda_sum, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide='ignore', invalid='ignore'):
        rate = bandwidth_hz * np.maximum(
            0.0, np.log2(gamma / (LN2 * lambda_sum)))
    value = np.where((mu == 0) | (gamma == 0), 0.0, mu * rate)
    return value.item() if value.ndim == 0 else value


def stationary_direction(lam, channels, beta, w_prev):
    """sum_k lam_k * beta_k * h_k * (h_k^H w_prev)."""
    direction = np.zeros(np.asarray(w_prev).shape, dtype=np.complex128)
    for lam_k, h_k, beta_k in zip(lam, channels, beta):
        if lam_k > 0:
            direction += axpy_outer(w_prev, h_k, lam_k * beta_k)
    return direction


def feasibility_scale(
        direction, channels, beta, w_prev, mu, c, m, noise_w, bandwidth_hz):
    """Smallest alpha >= 0 with alpha * direction meeting every audience
    member's linearized rate constraint at (mu, c).

    :raises: InfeasibleDirectionException when some member needs a positive
        right hand side but the direction does not increase it.
    """
    channels = np.atleast_2d(channels)
    beta = np.asarray(beta, dtype=float)
    noise = m * noise_w
    gains_prev = channels.conj() @ w_prev
    projections = channels.conj() @ direction
    slope = 2 * beta * np.real(np.conj(gains_prev) * projections) / noise
    need = beta * np.abs(gains_prev) ** 2 / noise
    if mu > 0:
        need = need + mu * (2.0 ** (c / (bandwidth_hz * mu)) - 1.0)
    active = need > 0
    if not np.any(active):
        return 0.0
    if np.any(slope[active] <= 0):
        raise InfeasibleDirectionException(
            'Direction does not raise the linearized rate of every user')
    return float(np.max(need[active] / slope[active]))


def w_rule(lam, channels, beta, w_prev, mu, c, m, noise_w, bandwidth_hz):
    """Beam vector of one (message, subcarrier) pair.

    The direction is sum_k lam_k beta_k h_k h_k^H w_prev, scaled by the
    smallest factor meeting every linearized rate constraint at (mu, c).

    :param lam: Rate constraint multiplier of each audience member.
    :type lam: numpy.ndarray

    :param channels: Audience channels, one row per user.
    :type channels: numpy.ndarray

    :param beta: Large-scale gains of the audience.
    :type beta: numpy.ndarray

    :param w_prev: Linearization point.
    :type w_prev: numpy.ndarray

    :param mu: Assignment of the pair.
    :type mu: float

    :param c: Rate of the pair.
    :type c: float

    :param m: Antenna count.
    :type m: int

    :param noise_w: Noise power sigma^2.
    :type noise_w: float

    :param bandwidth_hz: Bandwidth B.
    :type bandwidth_hz: float

    :returns: The vector; zero when mu is 0 or the direction vanishes.
    :rtype: numpy.ndarray

    :raises: DimensionMismatchException, InfeasibleDirectionException.
    """
    channels = np.atleast_2d(np.asarray(channels, dtype=np.complex128))
    w_prev = np.asarray(w_prev, dtype=np.complex128)
    if channels.shape[1] != w_prev.size or len(lam) != channels.shape[0]:
        raise DimensionMismatchException(
            'w_rule got %s channels of length %s, %s multipliers and a '
            'point of length %s' % (
                channels.shape[0], channels.shape[1], len(lam), w_prev.size))
    direction = stationary_direction(lam, channels, beta, w_prev)
    if mu == 0 or cnorm(direction) == 0:
        return np.zeros(w_prev.size, dtype=np.complex128)
    alpha = feasibility_scale(
        direction, channels, beta, w_prev, mu, c, m, noise_w, bandwidth_hz)
    return alpha * direction


def subgrad_step(duals, residuals, delta, lambda_scale=1.0, gamma_scale=1.0):
    """Projected subgradient step on both multiplier sets.

    lam grows where a rate constraint is violated and gamma grows while a
    demand is not met; both are projected onto the non negative orthant.

    :param duals: Current multipliers.
    :type duals: DcDuals

    :param residuals: Constraint violations and demand shortfalls.
    :type residuals: DcResiduals

    :param delta: Step size, > 0.
    :type delta: float

    :param lambda_scale: Step scaling of lam (scalar or broadcastable).
    :param gamma_scale: Step scaling of gamma (scalar or broadcastable).

    :returns: The updated multipliers.
    :rtype: DcDuals
    """
    lam = np.maximum(
        0.0, duals.lam + delta * lambda_scale * residuals.violation)
    gamma = np.maximum(
        0.0, duals.gamma + delta * gamma_scale * residuals.shortfall)
    return DcDuals(gamma=gamma, lam=lam)


def _audience_mask(messages, k_users):
    mask = np.zeros((len(messages), k_users), dtype=bool)
    for i, message in enumerate(messages):
        mask[i, [user - 1 for user in message.audience]] = True
    return mask


def _demands(messages):
    return np.array([msg.demand_bits_per_s for msg in messages], dtype=float)


def dc_state_from_allocation(alloc):
    """DC point W = sqrt(eta) * w on the assigned pairs of an allocation."""
    n_msgs, n_sc = alloc.mu.shape
    columns = np.arange(n_sc)
    W = np.zeros((n_msgs, n_sc, alloc.w.shape[1]), dtype=np.complex128)
    W[alloc.assignment, columns] = \
        np.sqrt(alloc.eta[alloc.assignment, columns])[:, np.newaxis] * alloc.w
    return DcState(
        W=W,
        mu=alloc.mu.astype(float),
        c=alloc.c.copy(),
        assignment=alloc.assignment.copy(),
        directions=alloc.w.copy(),
        m=alloc.m)


def _random_point(state, messages, seed):
    """All pairs active with random beams, mu = 1 / messages and the demand
    spread evenly; W is scaled to meet the exact rate constraints."""
    rng = make_rng(seed)
    n_msgs, n_sc, m = len(messages), state.n_sc, state.m
    B = state.bandwidth_hz
    mu = np.full((n_msgs, n_sc), 1.0 / n_msgs)
    c = np.zeros((n_msgs, n_sc))
    W = np.zeros((n_msgs, n_sc, m), dtype=np.complex128)
    for i, message in enumerate(messages):
        beta = state.audience_beta(message.audience)
        for n in range(n_sc):
            direction = normalize(complex_gaussian(rng, (m,)))
            quote = quote_for(
                direction, state.audience_channels(n, message.audience),
                beta, m, state.noise_w)
            c[i, n] = message.demand_bits_per_s / n_sc
            power = mu[i, n] * (2.0 ** (c[i, n] / (B * mu[i, n])) - 1.0)
            W[i, n] = np.sqrt(power * quote) * direction
    assignment = np.arange(n_sc) % n_msgs
    directions = np.array([
        normalize(W[assignment[n], n]) for n in range(n_sc)])
    return DcState(
        W=W, mu=mu, c=c, assignment=assignment, directions=directions, m=m)


def initial_point(
        state,
        messages,
        mode=config.DC_START,
        seed=0,
        beam=config.BASELINE2_BEAM,
        **alloc_kwargs):
    """Feasible start of the DC iterations.

    :param state: The channel state.
    :type state: ChannelState

    :param messages: The messages.
    :type messages: list

    :param mode: 'asymptotic' (large-antenna solution), 'baseline2'
        (multicast MRT solution), 'best' (lower power of the two) or
        'random'.
    :type mode: str

    :param seed: Seed of the random start.
    :type seed: int

    :param beam: Multicast MRT rule of the baseline2 start.
    :type beam: str

    :param alloc_kwargs: Passed on to solve_quoted_allocation.

    :returns: The start point.
    :rtype: DcState
    """
    if mode not in DC_STARTS:
        raise ValueError('Unknown DC start %r' % mode)
    if not messages:
        raise InfeasibleAllocationException('There is no message to send')
    if mode == START_RANDOM:
        return _random_point(state, messages, seed)
    plans = []
    if mode in (START_ASYMPTOTIC, START_BEST):
        plans.append(asymptotic_plan(state, messages))
    if mode in (START_BASELINE2, START_BEST):
        plans.append(mrt_plan(state, messages, beam))
    allocations = []
    for plan in plans:
        alloc = solve_quoted_allocation(
            messages, plan.quotes, state.bandwidth_hz, m=state.m,
            **alloc_kwargs)
        allocations.append(assemble_allocation(alloc, plan))
    best = min(allocations, key=lambda alloc: alloc.total_power_w)
    return dc_state_from_allocation(best)


class _ConvexApprox(object):
    """Dual loop of one convex approximation, in normalized units."""

    def __init__(self, point, state, messages, plan=None):
        self.point = point
        self.state = state
        self.messages = messages
        self.n_msgs = len(messages)
        self.unit = np.sqrt(state.m * state.noise_w)
        self.beta = state.beta
        self.h = state.h
        self.audience = _audience_mask(messages, state.k_users)
        self.aud3 = self.audience[:, np.newaxis, :]
        self.demand = _demands(messages) / state.bandwidth_hz

        self.w_point = point.W / self.unit
        self.w_prev = self.w_point
        if plan is not None:
            self.w_prev = self.seed_idle_pairs(plan)
        self.a = np.einsum(
            'nkm,inm->ink', self.h.conj(), self.w_prev) * self.aud3
        self.abs2 = np.abs(self.a) ** 2
        # Pairs whose tangent lets them carry rate
        self.carrying = np.all((self.abs2 > 0) | ~self.aud3, axis=2)
        for i, message in enumerate(messages):
            if not np.any(self.carrying[i]):
                raise InfeasibleAllocationException(
                    'Message %s has no subcarrier to linearize at' %
                    message.label)
        self.active3 = self.aud3 & self.carrying[:, :, np.newaxis]

    def seed_idle_pairs(self, plan):
        """Linearization point with a beam on every pair.

        A pair without a beam would keep a zero tangent and could never
        carry rate. It is linearized along the plan's direction instead,
        with the power that direction needs for the message's per subcarrier
        share of its demand. The point itself, and so the objective, keeps
        those pairs at zero.
        """
        idle = np.all(self.w_point == 0, axis=2) & np.isfinite(plan.quotes)
        if not np.any(idle):
            return self.w_point
        owned = np.bincount(
            np.asarray(self.point.assignment, dtype=int),
            minlength=self.n_msgs)
        # Keeps 2 ** share finite
        share = np.minimum(self.demand / np.maximum(owned, 1), MAX_SEED_RATE)
        quotes = np.where(idle, plan.quotes, 0.0) / self.unit ** 2
        scale = np.sqrt(quotes * (2.0 ** share[:, np.newaxis] - 1.0))
        return np.where(
            idle[:, :, np.newaxis],
            scale[:, :, np.newaxis] * plan.directions, self.w_point)

    def warm_start(self):
        """Multipliers fitted to the linearization point."""
        lam = np.zeros(self.a.shape)
        for i, n in zip(*np.nonzero(self.carrying)):
            users = np.flatnonzero(self.audience[i])
            basis = (self.beta[users] * self.a[i, n, users])[:, np.newaxis] \
                * self.h[n, users]
            matrix = np.vstack([basis.real.T, basis.imag.T])
            target = np.concatenate(
                [self.w_prev[i, n].real, self.w_prev[i, n].imag])
            lam[i, n, users], _ = nnls(matrix, target)
        lam_sum = lam.sum(axis=2)
        positive = lam_sum[self.carrying & (lam_sum > 0)]
        reference = float(np.median(positive)) if positive.size else 1.0
        n_audience = self.audience.sum(axis=1)[:, np.newaxis]
        # Pairs the fit left without weight share the reference evenly
        empty = self.carrying & (lam_sum == 0)
        lam = np.where(
            (empty[:, :, np.newaxis]) & self.aud3,
            reference / n_audience[:, :, np.newaxis], lam)
        lam_sum = lam.sum(axis=2)

        mu_prev = np.maximum(self.point.mu, 1e-300)
        exponent = np.where(
            self.point.mu > 0,
            self.point.c / (self.state.bandwidth_hz * mu_prev), 0.0)
        gamma = np.zeros(self.n_msgs)
        for i in range(self.n_msgs):
            rated = self.carrying[i] & (self.point.c[i] > 0)
            if np.any(rated):
                gamma[i] = np.median(
                    LN2 * lam_sum[i, rated] * 2.0 ** exponent[i, rated])
            else:
                share = self.demand[i] / max(1, np.sum(self.carrying[i]))
                gamma[i] = LN2 * reference * 2.0 ** share
        self.lambda_scale = np.where(
            lam_sum > 0, lam_sum / n_audience, reference)[:, :, np.newaxis]
        self.gamma_scale = gamma / self.demand
        rho = (self.point.mu * (2.0 ** exponent - 1.0))[:, :, np.newaxis] \
            + self.beta * self.abs2
        self.rho = np.where(self.active3 & (rho > 0), rho, 1.0)
        return DcDuals(gamma=gamma, lam=lam)

    def pair_beam(self, lam, i, n, c):
        """Feasible W of an assigned pair at rate c, normalized units."""
        users = np.flatnonzero(self.audience[i])
        channels = self.h[n, users]
        beta = self.beta[users]
        w_prev = self.w_prev[i, n]
        try:
            W = w_rule(
                lam[i, n, users], channels, beta, w_prev, 1.0, c,
                1, 1.0, 1.0)
            if cnorm(W) > 0:
                return W
        except InfeasibleDirectionException:
            pass
        # Scaling the linearization point along itself always works.
        return feasibility_scale(
            w_prev, channels, beta, w_prev, 1.0, c, 1, 1.0, 1.0) * w_prev

    def repair(self, duals, winners, rates):
        """Feasible candidate from the current dual iterate.

        Only the assigned pairs get a beam; mu = 0 and c = 0 hold exactly
        with W = 0 on the others.
        """
        n_sc = winners.size
        owned = (winners == np.arange(self.n_msgs)[:, np.newaxis]) \
            & self.carrying
        rates = np.where(owned, rates, 0.0)
        for i in range(self.n_msgs):
            if not np.any(owned[i]):
                return None
            total = rates[i].sum()
            if total > 0:
                rates[i] *= self.demand[i] / total
            else:
                rates[i, owned[i]] = self.demand[i] / np.sum(owned[i])
        W = np.zeros(self.w_prev.shape, dtype=np.complex128)
        for i, n in zip(*np.nonzero(owned)):
            W[i, n] = self.pair_beam(duals.lam, i, n, rates[i, n])
        mu = np.zeros(rates.shape)
        mu[winners, np.arange(n_sc)] = 1.0
        return W, mu, rates

    def to_state(self, W, mu, rates, winners):
        W = W * self.unit
        directions = self.point.directions.copy()
        for n, i in enumerate(winners):
            norm = cnorm(W[i, n])
            if norm > 0:
                directions[n] = W[i, n] / norm
        return DcState(
            W=W,
            mu=mu,
            c=rates * self.state.bandwidth_hz,
            assignment=np.asarray(winners, dtype=int),
            directions=directions,
            m=self.state.m,
            t=self.point.t)

    def run(self, max_iter, tol, window, step_size, step_tau):
        duals = self.warm_start()
        n_sc = self.state.n_sc
        columns = np.arange(n_sc)
        best = self.point
        best_objective = float(np.sum(np.abs(self.w_point) ** 2))
        history = [best_objective]
        stall = max(1, window // REPAIR_EVERY)
        winners = np.asarray(self.point.assignment, dtype=int)
        unique = True
        converged = False
        iteration = 0
        for iteration in range(1, max_iter + 1):
            lam_sum = duals.lam.sum(axis=2)
            gamma = duals.gamma[:, np.newaxis]
            free_rate = c_rule(gamma, lam_sum, 1.0)
            g = g_value(gamma, lam_sum)
            # A pair left at zero rate is worth nothing to its message.
            g = np.where(free_rate > 0, g, np.where(np.isinf(g), g, 0.0))
            g = np.where(self.carrying, g, -np.inf)
            winners, unique = _assign_columns(g, fallback=winners)
            mu = np.zeros(g.shape)
            mu[winners, columns] = 1.0
            rates = np.where(
                (mu > 0) & self.carrying,
                np.minimum(free_rate, self.demand[:, np.newaxis]), 0.0)

            weights = duals.lam * self.beta * self.a
            direction = np.einsum('ink,nkm->inm', weights, self.h)
            projections = np.einsum('nkm,inm->ink', self.h.conj(), direction)
            tangent = self.beta * (
                2 * np.real(np.conj(self.a) * projections) - self.abs2)
            need = (mu * (2.0 ** rates - 1.0))[:, :, np.newaxis]
            violation = np.where(
                self.active3, (need - tangent) / self.rho, 0.0)
            shortfall = self.demand - rates.sum(axis=1)

            kkt = np.max(np.abs(shortfall) / self.demand) <= tol and \
                np.max(violation) <= tol
            if kkt or iteration % REPAIR_EVERY == 0 or iteration == max_iter:
                candidate = self.repair(duals, winners, rates)
                if candidate is not None:
                    objective = float(np.sum(np.abs(candidate[0]) ** 2))
                    if objective < best_objective:
                        best_objective = objective
                        best = self.to_state(*candidate, winners)
                history.append(best_objective)
                if kkt:
                    converged = True
                    break
                if iteration >= MIN_INNER_ITER and len(history) > stall:
                    drop = history[-1 - stall] - history[-1]
                    if drop <= tol * history[-1]:
                        converged = True
                        break

            delta = step_size / (1.0 + (iteration - 1) / step_tau)
            duals = subgrad_step(
                duals, DcResiduals(violation, shortfall), delta,
                self.lambda_scale, self.gamma_scale)
        return ConvexApproxResult(
            point=best,
            converged=converged,
            unique_argmax=unique,
            iterations=iteration)


def solve_convex_approx(
        point,
        state,
        messages,
        max_iter=config.DC_INNER_MAX,
        tol=config.DC_INNER_TOL,
        window=config.ALLOC_WINDOW,
        step_size=config.STEP_SIZE,
        step_tau=config.STEP_TAU,
        plan=None):
    """Solve the convex problem obtained by linearizing at a point.

    :param point: Linearization point, feasible for the relaxed problem.
    :type point: DcState

    :param state: The channel state.
    :type state: ChannelState

    :param messages: The messages.
    :type messages: list

    :param max_iter: Maximum dual iterations.
    :type max_iter: int

    :param tol: Relative tolerance of the stopping tests.
    :type tol: float

    :param window: Iterations over which the best objective must stall.
    :type window: int

    :param plan: Beam plan whose directions linearize the pairs that have
        no beam at the point; without it those pairs cannot take a
        subcarrier.
    :type plan: BeamPlan

    :returns: The best feasible point found (never worse than the
        linearization point) and the loop's flags.
    :rtype: ConvexApproxResult
    """
    loop = _ConvexApprox(point, state, messages, plan)
    result = loop.run(max_iter, tol, window, step_size, step_tau)
    if not result.converged:
        LOGGER.warning(
            'Convex approximation stopped after %s iterations' % max_iter)
    if not result.unique_argmax:
        LOGGER.warning('Subcarrier assignment was decided by a tie')
    return result


def _rebalance(point, state, messages):
    """Exact water-filling of each message's rate on the current beams."""
    n_msgs, n_sc = point.mu.shape
    columns = np.arange(n_sc)
    assign = point.assignment
    directions = point.directions.copy()
    quotes = np.full((n_msgs, n_sc), np.inf)
    for n in range(n_sc):
        i = assign[n]
        norm = cnorm(point.W[i, n])
        if norm > 0:
            directions[n] = point.W[i, n] / norm
        audience = messages[i].audience
        try:
            quotes[i, n] = quote_for(
                directions[n], state.audience_channels(n, audience),
                state.audience_beta(audience), state.m, state.noise_w)
        except InfeasibleDirectionException:
            pass
    total, powers = assignment_powers(
        assign, quotes, _demands(messages), state.bandwidth_hz)
    if not np.isfinite(total):
        return None
    alloc = allocation_from_assignment(
        assign, quotes, powers, state.bandwidth_hz, m=state.m)
    # Unassigned pairs carry nothing
    W = np.zeros(point.W.shape, dtype=np.complex128)
    W[assign, columns] = \
        np.sqrt(powers[assign, columns])[:, np.newaxis] * directions
    return DcState(
        W=W,
        mu=alloc.mu.astype(float),
        c=alloc.c,
        assignment=assign.copy(),
        directions=directions,
        m=state.m,
        t=point.t)


def _reassign(point, state, messages, plan):
    """Subcarriers assigned afresh over the current beams.

    Every pair is quoted with the cheaper of its current DC direction and
    the plan's direction, then the quoted allocation picks the assignment.
    """
    directions = plan.directions.copy()
    quotes = plan.quotes.copy()
    for n, i in enumerate(point.assignment):
        norm = cnorm(point.W[i, n])
        if norm == 0:
            continue
        audience = messages[i].audience
        try:
            quote = quote_for(
                point.W[i, n] / norm, state.audience_channels(n, audience),
                state.audience_beta(audience), state.m, state.noise_w)
        except InfeasibleDirectionException:
            continue
        if quote < quotes[i, n]:
            directions[i, n] = point.W[i, n] / norm
            quotes[i, n] = quote
    try:
        alloc = solve_quoted_allocation(
            messages, quotes, state.bandwidth_hz, m=state.m)
    except InfeasibleAllocationException:
        return None
    alloc = assemble_allocation(alloc, BeamPlan(directions, quotes))
    return replace(dc_state_from_allocation(alloc), t=point.t)


def recover_allocation(point, state, messages, **flags):
    """Binary solution of the total power problem from a DC point.

    eta = ||W||^2 and w = W / ||W|| on the assigned pairs, rates from the
    exact rate formula; other pairs are dropped.

    :returns: The allocation, beamformers included.
    :rtype: Allocation
    """
    n_msgs, n_sc = point.mu.shape
    assign = point.assignment
    directions = point.directions.copy()
    eta = np.zeros((n_msgs, n_sc))
    quotes = np.full((n_msgs, n_sc), np.inf)
    for n in range(n_sc):
        i = assign[n]
        norm = cnorm(point.W[i, n])
        if norm > 0:
            directions[n] = point.W[i, n] / norm
        eta[i, n] = norm ** 2
        audience = messages[i].audience
        try:
            quotes[i, n] = quote_for(
                directions[n], state.audience_channels(n, audience),
                state.audience_beta(audience), state.m, state.noise_w)
        except InfeasibleDirectionException:
            LOGGER.debug('Subcarrier %s beam misses its audience' % (n + 1))
    alloc = allocation_from_assignment(
        assign, quotes, eta, state.bandwidth_hz, m=state.m, **flags)
    return replace(alloc, w=directions)


def dc_solve(
        state,
        messages,
        outer_max=config.DC_OUTER_MAX,
        tol=config.DC_TOL,
        start=None,
        start_mode=config.DC_START,
        seed=0,
        beam=config.BASELINE2_BEAM,
        inner_max=config.DC_INNER_MAX,
        inner_tol=config.DC_INNER_TOL,
        strict=False):
    """Suboptimal solution of the total power problem for any antenna count.

    :param state: The channel state.
    :type state: ChannelState

    :param messages: The messages.
    :type messages: list

    :param outer_max: Maximum number of convex approximations.
    :type outer_max: int

    :param tol: Stop once the objective drops by less than this fraction.
    :type tol: float

    :param start: Start point, as a DcState or a complete Allocation; built
        with initial_point(start_mode) when omitted.
    :type start: DcState

    :param start_mode: See initial_point.
    :type start_mode: str

    :param seed: Seed of the random start.
    :type seed: int

    :param beam: Multicast MRT rule of the baseline2 start.
    :type beam: str

    :param inner_max: Dual iterations per convex approximation.
    :type inner_max: int

    :param inner_tol: Tolerance of each convex approximation.
    :type inner_tol: float

    :param strict: Raise NonConvergenceException instead of flagging.
    :type strict: bool

    :returns: Binary allocation with beamformers; history holds the
        objective after every accepted iteration.
    :rtype: Allocation
    """
    if start is None:
        point = initial_point(
            state, messages, mode=start_mode, seed=seed, beam=beam)
    elif isinstance(start, DcState):
        point = start
    else:
        point = dc_state_from_allocation(start)

    plan = asymptotic_plan(state, messages)
    history = [point.objective_w]
    converged = False
    unique = True
    outer = 0
    for outer in range(1, outer_max + 1):
        result = solve_convex_approx(
            point, state, messages, max_iter=inner_max, tol=inner_tol,
            plan=plan)
        unique = result.unique_argmax
        candidates = [
            result.point,
            _rebalance(result.point, state, messages),
            _reassign(result.point, state, messages, plan)]
        candidate = min(
            (option for option in candidates if option is not None),
            key=lambda option: option.objective_w)
        if candidate.objective_w > point.objective_w:
            LOGGER.debug('DC iteration %s found no better point' % outer)
            converged = True
            break
        change = (point.objective_w - candidate.objective_w) / \
            point.objective_w
        point = replace(candidate, t=outer)
        history.append(point.objective_w)
        LOGGER.debug('DC iteration %s: objective %s' % (
            outer, point.objective_w))
        if change < tol:
            converged = True
            break

    if not np.all(point.mu.sum(axis=0) == 1) or \
            not np.all(np.isin(point.mu, (0.0, 1.0))):
        # Still relaxed (random start without progress): binarize.
        balanced = _rebalance(point, state, messages)
        if balanced is not None:
            point = balanced

    allocation = recover_allocation(
        point, state, messages,
        converged=converged,
        unique_argmax=unique,
        iterations=outer,
        history=tuple(history))
    if not converged:
        message = 'DC iterations did not converge in %s steps' % outer_max
        if strict:
            raise NonConvergenceException(message, result=allocation)
        LOGGER.warning(message)
    return allocation
