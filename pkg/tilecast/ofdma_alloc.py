# coding=utf-8
"""Subcarrier assignment with power and rate allocation for fixed quotes.

Given a power quote Q[i, n] for every message i and subcarrier n, find a
binary assignment of subcarriers to messages and powers P minimizing
sum P subject to each message receiving sum_n B * log2(1 + P / Q) bits/s
at least equal to its demand.

The solver runs projected subgradient ascent on one multiplier per message
(each subcarrier goes to the message with the largest water-filling gain).
Every assignment met on the way is turned into a feasible allocation by
exact per-message water-filling, the best one is improved by local search
and the best dual value is kept as a lower bound.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import itertools
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from tilecast import config
from tilecast import LOGGER
from tilecast.exceptions import (
    DimensionMismatchException,
    InfeasibleAllocationException,
    InstanceTooLargeException,
    NonConvergenceException)

LN2 = np.log(2.0)
BRUTE_FORCE_LIMIT = 10 ** 5
# Three-subcarrier rotations are only tried on small instances
ROTATION_MAX_SC = 12
LOCAL_SEARCH_PASSES = 50


@dataclass(frozen=True, eq=False)
class Allocation:
    """Assignment mu, power eta and rate c per (message, subcarrier).

    w holds the unit beamformer of each subcarrier once known. Powers are
    in quote units: the transmitted power is sum(mu * eta) / m.
    """
    mu: np.ndarray
    eta: np.ndarray
    c: np.ndarray
    assignment: np.ndarray
    bandwidth_hz: float
    m: int = 1
    w: np.ndarray = None
    converged: bool = True
    unique_argmax: bool = True
    iterations: int = 0
    dual_bound: float = float('nan')
    history: tuple = ()

    @property
    def total_power_w(self):
        return float(np.sum(self.mu * self.eta)) / self.m

    @property
    def message_rates(self):
        return self.c.sum(axis=1)

    @property
    def duality_gap(self):
        """Relative gap between the total power and the dual bound."""
        total = self.total_power_w
        if not np.isfinite(self.dual_bound) or total <= 0:
            return float('nan')
        return max(0.0, (total - self.dual_bound) / total)


@dataclass
class DualState:
    """Multiplier of each message's demand constraint."""
    gamma: np.ndarray

    def __post_init__(self):
        self.gamma = np.asarray(self.gamma, dtype=float)
        if np.any(self.gamma < 0):
            raise ValueError('Multipliers must be non negative')


def waterfill_power(gamma, q, bandwidth_hz):
    """Power minimizing P - gamma * B * log2(1 + P / q).

    :param gamma: Rate multiplier.
    :type gamma: float

    :param q: Power quote, > 0. An infinite quote gets no power.
    :type q: float

    :param bandwidth_hz: Subcarrier bandwidth B.
    :type bandwidth_hz: float

    :returns: max(0, gamma * B / ln 2 - q).
    :rtype: float
    """
    if not np.isfinite(q):
        return 0.0
    return max(0.0, gamma * bandwidth_hz / LN2 - q)


def assignment_gain(gamma, q, bandwidth_hz):
    """Value gamma * B * log2(1 + P*/q) - P* of serving a message on a
    subcarrier at the water-filling power P*."""
    power = waterfill_power(gamma, q, bandwidth_hz)
    if power <= 0:
        return 0.0
    return gamma * bandwidth_hz * np.log2(1.0 + power / q) - power


def _gains(gamma, quotes, bandwidth_hz):
    # Vectorized assignment_gain; rows are messages.
    level = (gamma * bandwidth_hz / LN2)[:, np.newaxis]
    with np.errstate(invalid='ignore', divide='ignore'):
        powers = np.maximum(0.0, level - quotes)
        rates = np.where(
            powers > 0, bandwidth_hz * np.log2(1.0 + powers / quotes), 0.0)
    gains = gamma[:, np.newaxis] * rates - powers
    return gains, rates


def water_level_log2(quotes, demand, bandwidth_hz):
    """log2 of the water level meeting a demand on some subcarriers.

    :param quotes: Quotes of the subcarriers, infinite ones are skipped.
    :type quotes: numpy.ndarray

    :param demand: Rate to reach in bits/s, > 0.
    :type demand: float

    :param bandwidth_hz: Subcarrier bandwidth B.
    :type bandwidth_hz: float

    :returns: log2 of the level nu with sum_j B * log2(max(1, nu / q_j))
        equal to demand.
    :rtype: float

    :raises: InfeasibleAllocationException without a finite quote.
    """
    quotes = np.asarray(quotes, dtype=float)
    finite = np.sort(quotes[np.isfinite(quotes)])
    if finite.size == 0:
        raise InfeasibleAllocationException(
            'No usable subcarrier to carry %s bits/s' % demand)
    log_q = np.log2(finite)
    counts = np.arange(1, finite.size + 1)
    levels = (demand / bandwidth_hz + np.cumsum(log_q)) / counts
    # The active set is a prefix; the last active level is the answer.
    active = np.flatnonzero(log_q < levels)
    return float(levels[active[-1]])


def waterfill_message(quotes, demand, bandwidth_hz):
    """Minimum power split meeting a demand on a set of subcarriers.

    :returns: Power per subcarrier, in the order of quotes.
    :rtype: numpy.ndarray
    """
    quotes = np.asarray(quotes, dtype=float)
    powers = np.zeros(quotes.shape)
    if demand <= 0:
        return powers
    level_log2 = water_level_log2(quotes, demand, bandwidth_hz)
    with np.errstate(over='ignore', invalid='ignore'):
        level = np.exp2(level_log2)
        powers = np.where(
            np.isfinite(quotes), np.maximum(0.0, level - quotes), 0.0)
    return powers


def _message_power(quotes, demand, bandwidth_hz):
    if not np.any(np.isfinite(quotes)):
        return np.inf
    return float(np.sum(waterfill_message(quotes, demand, bandwidth_hz)))


def _check_instance(messages, quotes):
    quotes = np.asarray(quotes, dtype=float)
    demands = np.array(
        [message.demand_bits_per_s for message in messages], dtype=float)
    if quotes.ndim != 2 or quotes.shape[0] != len(messages):
        raise DimensionMismatchException(
            'Quotes of shape %s for %s messages' % (
                quotes.shape, len(messages)))
    if not messages:
        raise InfeasibleAllocationException('There is no message to send')
    if np.any(quotes <= 0) or np.any(np.isnan(quotes)):
        raise DimensionMismatchException('Quotes must be positive')
    if np.any(demands <= 0):
        raise InfeasibleAllocationException('Demands must be positive')
    for i, message in enumerate(messages):
        if not np.any(np.isfinite(quotes[i])):
            raise InfeasibleAllocationException(
                'Message %s has no usable subcarrier' % message.label)
    if len(messages) > quotes.shape[1]:
        raise InfeasibleAllocationException(
            '%s messages cannot share %s subcarriers' % (
                len(messages), quotes.shape[1]))
    _matching(quotes)
    return quotes, demands


def _matching(quotes):
    # Distinct usable subcarrier per message, cheapest in log quote.
    with np.errstate(divide='ignore'):
        cost = np.log(quotes)
    try:
        rows, cols = linear_sum_assignment(cost)
    except ValueError:
        raise InfeasibleAllocationException(
            'Messages cannot each get a usable subcarrier')
    return rows, cols


def _repair(assign, quotes):
    """Move subcarriers so every message owns a usable one."""
    n_msgs, n_sc = quotes.shape
    usable = np.isfinite(quotes)
    assign = assign.copy()
    for i in range(n_msgs):
        owned = usable[i] & (assign == i)
        if np.any(owned):
            continue
        counts = np.array([
            np.sum(usable[j] & (assign == j)) for j in range(n_msgs)])
        candidates = [
            n for n in range(n_sc)
            if usable[i, n] and (
                not usable[assign[n], n] or counts[assign[n]] > 1)]
        if not candidates:
            return _matching_repair(assign, quotes)
        assign[min(candidates, key=lambda n: quotes[i, n])] = i
    return assign


def _matching_repair(assign, quotes):
    rows, cols = _matching(quotes)
    usable = np.isfinite(quotes)
    repaired = assign.copy()
    for n in range(quotes.shape[1]):
        if not usable[repaired[n], n]:
            repaired[n] = int(np.argmin(quotes[:, n]))
    repaired[cols] = rows
    return repaired


def assignment_powers(assign, quotes, demands, bandwidth_hz):
    """Water-fill every message on the subcarriers assigned to it.

    :returns: Two-tuple (total power, powers per (message, subcarrier)).
        The total is inf and the powers None when a message has no usable
        subcarrier.
    :rtype: (float, numpy.ndarray)
    """
    powers = np.zeros(quotes.shape)
    for i in range(quotes.shape[0]):
        cols = np.flatnonzero(assign == i)
        if not np.any(np.isfinite(quotes[i, cols])):
            return np.inf, None
        powers[i, cols] = waterfill_message(
            quotes[i, cols], demands[i], bandwidth_hz)
    return float(np.sum(powers)), powers


class _LocalSearch(object):
    """Single moves, pairwise swaps and (small instances) rotations."""

    def __init__(self, quotes, demands, bandwidth_hz):
        self.quotes = quotes
        self.demands = demands
        self.bandwidth_hz = bandwidth_hz
        self.n_msgs, self.n_sc = quotes.shape

    def cost(self, i, mask):
        return _message_power(
            self.quotes[i, mask], self.demands[i], self.bandwidth_hz)

    def costs(self, assign):
        return np.array(
            [self.cost(i, assign == i) for i in range(self.n_msgs)])

    def _try(self, assign, costs, changes):
        """Apply {subcarrier: new owner} if it lowers the total power."""
        trial = assign.copy()
        for n, owner in changes.items():
            trial[n] = owner
        touched = set(assign[n] for n in changes) | set(changes.values())
        before = sum(costs[i] for i in touched)
        after = {i: self.cost(i, trial == i) for i in touched}
        total_after = sum(after.values())
        if total_after < before - 1e-12 * max(before, 1e-300):
            assign[:] = trial
            for i, value in after.items():
                costs[i] = value
            return True
        return False

    def _moves(self, assign, costs):
        improved = False
        for n in range(self.n_sc):
            for j in range(self.n_msgs):
                if j != assign[n] and np.isfinite(self.quotes[j, n]):
                    improved |= self._try(assign, costs, {n: j})
        return improved

    def _swaps(self, assign, costs):
        improved = False
        for n1, n2 in itertools.combinations(range(self.n_sc), 2):
            i, j = assign[n1], assign[n2]
            if i != j:
                improved |= self._try(assign, costs, {n1: j, n2: i})
        return improved

    def _rotations(self, assign, costs):
        improved = False
        for n1, n2, n3 in itertools.combinations(range(self.n_sc), 3):
            i, j, k = assign[n1], assign[n2], assign[n3]
            if len({i, j, k}) < 3:
                continue
            improved |= self._try(assign, costs, {n1: j, n2: k, n3: i})
            i, j, k = assign[n1], assign[n2], assign[n3]
            if len({i, j, k}) == 3:
                improved |= self._try(assign, costs, {n1: k, n2: i, n3: j})
        return improved

    def run(self, assign):
        assign = assign.copy()
        costs = self.costs(assign)
        for _ in range(LOCAL_SEARCH_PASSES):
            improved = self._moves(assign, costs)
            improved |= self._swaps(assign, costs)
            if self.n_sc <= ROTATION_MAX_SC and self.n_msgs >= 3:
                improved |= self._rotations(assign, costs)
            if not improved:
                break
        return assign


def _initial_gamma(quotes, demands, bandwidth_hz):
    # Water level each message would need on an even share of its best
    # subcarriers.
    n_msgs, n_sc = quotes.shape
    share = max(1, n_sc // n_msgs)
    gamma = np.zeros(n_msgs)
    for i in range(n_msgs):
        best = np.sort(quotes[i][np.isfinite(quotes[i])])[:share]
        level_log2 = water_level_log2(best, demands[i], bandwidth_hz)
        gamma[i] = np.exp2(level_log2) * LN2 / bandwidth_hz
    return gamma


def allocation_from_assignment(
        assign, quotes, powers, bandwidth_hz, m=1, **flags):
    """Build an Allocation from an assignment and its powers.

    :param assign: Message index of every subcarrier.
    :type assign: numpy.ndarray

    :param quotes: Quotes of shape (messages, subcarriers).
    :type quotes: numpy.ndarray

    :param powers: Powers of the same shape; only assigned pairs are used.
    :type powers: numpy.ndarray

    :param bandwidth_hz: Subcarrier bandwidth B.
    :type bandwidth_hz: float

    :param m: Antenna count (power normalization).
    :type m: int

    :param flags: Extra Allocation fields (converged, iterations, ...).

    :returns: The allocation, with c = B * log2(1 + P / Q) on assigned pairs.
    :rtype: Allocation
    """
    n_msgs, n_sc = quotes.shape
    assign = np.asarray(assign, dtype=int)
    mu = np.zeros((n_msgs, n_sc), dtype=int)
    mu[assign, np.arange(n_sc)] = 1
    eta = np.where(mu == 1, powers, 0.0)
    with np.errstate(invalid='ignore', divide='ignore'):
        c = np.where(
            (mu == 1) & (eta > 0) & np.isfinite(quotes),
            bandwidth_hz * np.log2(1.0 + eta / quotes),
            0.0)
    return Allocation(
        mu=mu,
        eta=eta,
        c=c,
        assignment=assign,
        bandwidth_hz=bandwidth_hz,
        m=m,
        **flags)


def solve_quoted_allocation(
        messages,
        quotes,
        bandwidth_hz,
        max_iter=config.ALLOC_MAX_ITER,
        tol=config.ALLOC_TOL,
        m=1,
        step_size=config.STEP_SIZE,
        step_tau=config.STEP_TAU,
        window=config.ALLOC_WINDOW,
        gap_tol=config.ALLOC_GAP_TOL,
        strict=False):
    """Minimize total power for fixed quotes by dual decomposition.

    :param messages: The messages; their demands are the rate targets.
    :type messages: list

    :param quotes: Quote per (message, subcarrier); inf marks unusable.
    :type quotes: numpy.ndarray

    :param bandwidth_hz: Subcarrier bandwidth B.
    :type bandwidth_hz: float

    :param max_iter: Maximum number of dual iterations.
    :type max_iter: int

    :param tol: Relative duality gap, or relative change of the best dual
        value over `window` iterations, at which the loop stops.
    :type tol: float

    :param m: Antenna count; the reported total power is sum(P) / m.
    :type m: int

    :param step_size: Initial step, relative to each multiplier's start.
    :type step_size: float

    :param step_tau: Step decay: step_size / (1 + i / step_tau).
    :type step_tau: float

    :param window: Number of iterations of the stability test.
    :type window: int

    :param gap_tol: Relative duality gap under which a loop stopped by the
        stability test still counts as converged.
    :type gap_tol: float

    :param strict: Raise instead of flagging a loop that did not converge.
    :type strict: bool

    :returns: A feasible binary allocation (no beamformers yet).
    :rtype: Allocation

    :raises: InfeasibleAllocationException when some message cannot be
        served; NonConvergenceException in strict mode.
    """
    quotes, demands = _check_instance(messages, quotes)
    n_msgs, n_sc = quotes.shape
    gamma = _initial_gamma(quotes, demands, bandwidth_hz)
    scale = gamma / demands
    owners = np.arange(n_msgs)[:, np.newaxis]

    visited = set()
    best_total, best_assign = np.inf, None
    best_dual = -np.inf
    dual_history = []
    converged = False
    stalled = False
    unique = True
    iteration = 0
    for iteration in range(1, max_iter + 1):
        gains, rates = _gains(gamma, quotes, bandwidth_hz)
        assign = np.argmax(gains, axis=0)
        top = gains[assign, np.arange(n_sc)]
        ties = (np.sum(gains == top, axis=0) > 1) & (top > 0)
        unique = not np.any(ties)
        dual = float(gamma @ demands - np.sum(top))
        best_dual = max(best_dual, dual)
        dual_history.append(best_dual)

        key = assign.tobytes()
        if key not in visited:
            visited.add(key)
            candidate = _repair(assign, quotes)
            total, _ = assignment_powers(
                candidate, quotes, demands, bandwidth_hz)
            if total < best_total:
                best_total, best_assign = total, candidate

        if np.isfinite(best_total) and \
                best_total - best_dual <= tol * best_total:
            converged = True
            break
        if iteration > window:
            drift = dual_history[-1] - dual_history[-1 - window]
            if drift <= tol * abs(dual_history[-1]):
                stalled = True
                break

        residual = demands - np.sum(rates * (assign == owners), axis=1)
        delta = step_size / (1.0 + (iteration - 1) / step_tau)
        gamma = np.maximum(0.0, gamma + delta * scale * residual)

    search = _LocalSearch(quotes, demands, bandwidth_hz)
    best_assign = search.run(best_assign)
    total, powers = assignment_powers(
        best_assign, quotes, demands, bandwidth_hz)
    if stalled:
        converged = total - best_dual <= gap_tol * total
    LOGGER.debug(
        'Quoted allocation: %s iterations, %s assignments, power %s, '
        'dual bound %s' % (
            iteration, len(visited), total / m, best_dual / m))
    if not unique:
        LOGGER.debug('Subcarrier argmax was not unique at the last step')

    allocation = allocation_from_assignment(
        best_assign, quotes, powers, bandwidth_hz, m=m,
        converged=converged,
        unique_argmax=unique,
        iterations=iteration,
        dual_bound=min(best_dual, total) / m)
    if not converged:
        message = (
            'Quoted allocation did not converge after %s iterations '
            '(duality gap %.3g)' % (iteration, allocation.duality_gap))
        if strict:
            raise NonConvergenceException(message, result=allocation)
        LOGGER.warning(message)
    return allocation


def _bisect_message(quotes, demand, bandwidth_hz):
    """Water-filling powers found by root finding on the water level."""
    finite = np.isfinite(quotes)
    if not np.any(finite):
        return None
    log_q = np.log2(quotes[finite])

    def shortfall(level_log2):
        return bandwidth_hz * np.sum(
            np.maximum(0.0, level_log2 - log_q)) - demand

    low = float(np.min(log_q))
    # shortfall(high) >= B even after rounding
    high = float(np.max(log_q)) + demand / bandwidth_hz + 1.0
    level_log2 = brentq(shortfall, low, high, xtol=1e-14)
    powers = np.zeros(quotes.shape)
    powers[finite] = np.maximum(0.0, np.exp2(level_log2) - quotes[finite])
    return powers


def brute_force_allocation(messages, quotes, bandwidth_hz, m=1):
    """Exact minimum by enumerating every binary assignment.

    :param messages: The messages.
    :type messages: list

    :param quotes: Quote per (message, subcarrier).
    :type quotes: numpy.ndarray

    :param bandwidth_hz: Subcarrier bandwidth B.
    :type bandwidth_hz: float

    :param m: Antenna count (power normalization).
    :type m: int

    :returns: The optimal allocation.
    :rtype: Allocation

    :raises: InstanceTooLargeException beyond 10**5 assignments;
        InfeasibleAllocationException if no assignment serves everyone.
    """
    quotes = np.asarray(quotes, dtype=float)
    n_msgs, n_sc = quotes.shape
    if n_msgs ** n_sc > BRUTE_FORCE_LIMIT:
        raise InstanceTooLargeException(
            '%s messages on %s subcarriers is %s assignments' % (
                n_msgs, n_sc, n_msgs ** n_sc))
    demands = np.array([msg.demand_bits_per_s for msg in messages])

    best_total, best_assign, best_powers = np.inf, None, None
    count = 0
    for assign in itertools.product(range(n_msgs), repeat=n_sc):
        assign = np.array(assign)
        powers = np.zeros(quotes.shape)
        for i in range(n_msgs):
            cols = np.flatnonzero(assign == i)
            message_powers = _bisect_message(
                quotes[i, cols], demands[i], bandwidth_hz)
            if message_powers is None:
                break
            powers[i, cols] = message_powers
        else:
            count += 1
            total = float(np.sum(powers))
            if total < best_total:
                best_total, best_assign, best_powers = total, assign, powers
    if best_assign is None:
        raise InfeasibleAllocationException(
            'No assignment gives every message a usable subcarrier')
    return allocation_from_assignment(
        best_assign, quotes, best_powers, bandwidth_hz, m=m,
        iterations=count)


def assemble_allocation(alloc, beam_plan):
    """Attach the beamformers and final rates to a quoted allocation.

    Subcarrier n uses the direction of its assigned message, the power is
    kept and the rate becomes B * log2(1 + P / Q).

    :param alloc: Binary allocation from the quoted problem.
    :type alloc: Allocation

    :param beam_plan: Directions and quotes used to build the quotes.
    :type beam_plan: BeamPlan

    :returns: The complete allocation.
    :rtype: Allocation

    :raises: DimensionMismatchException if the plan does not cover the
        allocation.
    """
    if beam_plan.quotes.shape != alloc.mu.shape:
        raise DimensionMismatchException(
            'Beam plan %s does not cover allocation %s' % (
                beam_plan.quotes.shape, alloc.mu.shape))
    if not np.all((alloc.mu == 0) | (alloc.mu == 1)) or \
            not np.all(alloc.mu.sum(axis=0) == 1):
        raise DimensionMismatchException('Assignment is not binary')
    n_sc = alloc.mu.shape[1]
    columns = np.arange(n_sc)
    w = beam_plan.directions[alloc.assignment, columns]
    if not np.all(np.isfinite(w)):
        raise DimensionMismatchException('Beam plan has missing directions')
    rebuilt = allocation_from_assignment(
        alloc.assignment, beam_plan.quotes, alloc.eta, alloc.bandwidth_hz,
        m=alloc.m)
    return replace(alloc, c=rebuilt.c, w=w)
