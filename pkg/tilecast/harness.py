# coding=utf-8
"""Scenarios, Monte-Carlo trials and result files.

A scenario fixes the tiling, the quality ladder, the users (viewing
direction and quality index) and the radio parameters. Every trial index
maps to one seed; all schemes of a trial see the same channel.

Result files are CSV with one row per (sweep value, scheme, trial) followed
by a mean row and a stderr row for each (sweep value, scheme).

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import csv
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from tilecast import config
from tilecast import LOGGER
from tilecast.audit import audit_allocation
from tilecast.beamforming import BASELINE2_BEAMS, asymptotic_plan, mrt_plan
from tilecast.channel import derive_trial_seed, make_rng, sample_channel
from tilecast.dc_solver import DC_STARTS, dc_solve
from tilecast.exceptions import (
    ConfigException,
    ConstraintViolationException,
    QualityLevelException,
    TileBoundsException,
    TilecastException,
    WrongDirectionCountException)
from tilecast.geometry import (
    TilingConfig,
    ViewDirection,
    compute_tile_set,
    wrap_yaw)
from tilecast.ofdma_alloc import (
    assemble_allocation,
    brute_force_allocation,
    solve_quoted_allocation)
from tilecast.partition import (
    Message,
    QualityLadder,
    build_messages,
    build_partition,
    unicast_messages)
from tilecast.utilities import mean_and_stderr, unique_filename

SCHEME_ASYMPTOTIC = 'proposed-asymptotic'
SCHEME_DC = 'proposed-dc'
SCHEME_BASELINE1 = 'baseline1'
SCHEME_BASELINE2 = 'baseline2'
SCHEMES = (SCHEME_ASYMPTOTIC, SCHEME_DC, SCHEME_BASELINE1, SCHEME_BASELINE2)

SWEEP_K = 'k'
SWEEP_M = 'm'
SWEEP_DELTA = 'delta'
SWEEP_NONE = 'none'
SWEEPS = (SWEEP_K, SWEEP_M, SWEEP_DELTA, SWEEP_NONE)
DEFAULT_M_SWEEP = (2, 4, 8, 16)
DELTA_STEPS = 6

CSV_HEADER = (
    'scheme', 'sweep_param', 'sweep_value', 'trial', 'seed',
    'total_power_w', 'converged', 'unique_argmax', 'iterations')
FLOAT_FORMAT = '%.10e'
MEAN_ROW = 'mean'
STDERR_ROW = 'stderr'

# Per trial stream of the viewing direction draw, apart from the channel's
DIRECTION_STREAM = 1

# Five synthetic users, spread so that shifting them concentrates them
DEFAULT_YAWS = (60.0, 120.0, 180.0, 240.0, 300.0)
DEFAULT_PITCH = 90.0
# Quality levels of the five users; four user scenarios drop the first
DEFAULT_QUALITIES = (2, 2, 3, 3, 4)
# Quality of a scenario file user that names none
DEFAULT_QUALITY = 1

# Viewing directions that trials draw their users from
POOL_SIZE = 30
POOL_SEED = 360
POOL_PITCH_SPREAD_DEG = 20.0

PRESET_USERS = 'users'
PRESET_ANTENNAS = 'antennas'
PRESET_CONCENTRATION = 'concentration'
PRESETS = (PRESET_USERS, PRESET_ANTENNAS, PRESET_CONCENTRATION)

SCENARIO_KEYS = {
    'tiling', 'ladder', 'users', 'm', 'n_sc', 'bandwidth_hz', 'noise_w',
    'beta', 'delta_deg', 'trials', 'base_seed', 'schemes', 'sweep',
    'direction_pool', 'strict', 'baseline2_beam', 'dc_start', 'workers'}
TILING_KEYS = {'u_h', 'u_v', 'fov_h_deg', 'fov_v_deg', 'margin_deg'}
LADDER_KEYS = {'rates', 'levels', 'base_bps', 'ratio'}
USER_KEYS = {'yaw_deg', 'pitch_deg', 'quality'}
DIRECTION_KEYS = {'yaw_deg', 'pitch_deg'}
SWEEP_KEYS = {'param', 'values'}


@dataclass(frozen=True)
class UserSpec:
    direction: ViewDirection
    quality: int


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything a trial needs besides its index."""
    tiling: TilingConfig
    ladder: QualityLadder
    users: tuple
    m: int = config.ANTENNAS
    n_sc: int = config.SUBCARRIERS
    bandwidth_hz: float = config.BANDWIDTH_HZ
    noise_w: float = config.NOISE_W
    beta: tuple = None
    delta_deg: float = 0.0
    trials: int = config.TRIALS
    base_seed: int = config.BASE_SEED
    schemes: tuple = SCHEMES
    sweep_param: str = SWEEP_NONE
    sweep_values: tuple = ()
    direction_pool: tuple = ()
    strict: bool = False
    baseline2_beam: str = config.BASELINE2_BEAM
    dc_start: str = config.DC_START
    workers: int = config.WORKERS

    def __post_init__(self):
        if not self.users:
            raise ConfigException('A scenario needs at least one user')
        if self.trials < 1:
            raise ConfigException('trials must be >= 1, got %s' % self.trials)
        if not self.schemes:
            raise ConfigException('A scenario needs at least one scheme')
        unknown = [name for name in self.schemes if name not in SCHEMES]
        if unknown:
            raise ConfigException(
                'Unknown scheme(s) %s, expected some of %s' % (
                    unknown, SCHEMES))
        for user in self.users:
            try:
                self.ladder.check_level(user.quality)
            except QualityLevelException as e:
                raise ConfigException(str(e))
        if self.beta is not None and len(self.beta) != len(self.users):
            raise ConfigException(
                'beta has %s entries for %s users' % (
                    len(self.beta), len(self.users)))
        if self.sweep_param not in SWEEPS:
            raise ConfigException(
                'Unknown sweep %r, expected one of %s' % (
                    self.sweep_param, SWEEPS))
        if self.direction_pool and \
                len(self.direction_pool) < len(self.users):
            raise ConfigException(
                'The direction pool has %s directions for %s users' % (
                    len(self.direction_pool), len(self.users)))
        if self.baseline2_beam not in BASELINE2_BEAMS:
            raise ConfigException(
                'Unknown baseline2 beam %r' % self.baseline2_beam)
        if self.dc_start not in DC_STARTS:
            raise ConfigException('Unknown DC start %r' % self.dc_start)
        if self.workers < 1:
            raise ConfigException(
                'workers must be >= 1, got %s' % self.workers)
        if self.delta_deg < 0:
            raise ConfigException(
                'delta_deg must be >= 0, got %s' % self.delta_deg)

    @property
    def k_users(self):
        return len(self.users)

    def sweep_points(self):
        """Values of the swept parameter, defaults filled in."""
        if self.sweep_param == SWEEP_NONE:
            return (None,)
        if self.sweep_values:
            return tuple(self.sweep_values)
        if self.sweep_param == SWEEP_K:
            return tuple(range(1, self.k_users + 1))
        if self.sweep_param == SWEEP_M:
            return DEFAULT_M_SWEEP
        return tuple(
            step * self.tiling.col_width_deg for step in range(DELTA_STEPS))

    def at_sweep_point(self, value):
        """The scenario with the swept parameter set to value."""
        if self.sweep_param == SWEEP_K:
            k = int(value)
            if not 1 <= k <= self.k_users:
                raise ConfigException(
                    'Cannot sweep to K=%s with %s users' % (k, self.k_users))
            beta = None if self.beta is None else self.beta[:k]
            return replace(self, users=self.users[:k], beta=beta)
        if self.sweep_param == SWEEP_M:
            return replace(self, m=int(value))
        if self.sweep_param == SWEEP_DELTA:
            return replace(self, delta_deg=float(value))
        return self


@dataclass(frozen=True)
class TrialResult:
    scheme: str
    trial: int
    seed: int
    total_power_w: float
    converged: bool
    unique_argmax: bool
    iterations: int
    sweep_param: str = SWEEP_NONE
    sweep_value: object = None
    error: str = field(default=None, repr=False)

    def __post_init__(self):
        if self.total_power_w < 0:
            raise ValueError(
                'Negative power %s in a trial result' % self.total_power_w)


def default_ladder():
    return QualityLadder.geometric(
        config.LADDER_LEVELS, config.LADDER_BASE_BPS, config.LADDER_RATIO)


def default_tiling():
    return TilingConfig(
        u_h=config.TILES_H,
        u_v=config.TILES_V,
        fov_h_deg=config.FOV_DEG,
        fov_v_deg=config.FOV_DEG,
        margin_deg=config.MARGIN_DEG)


def _synthetic_users(yaws, qualities):
    return tuple(
        UserSpec(ViewDirection(yaw, DEFAULT_PITCH), quality)
        for yaw, quality in zip(yaws, qualities))


def default_scenario(**overrides):
    """The five user synthetic scenario, with optional field overrides."""
    values = dict(
        tiling=default_tiling(),
        ladder=default_ladder(),
        users=_synthetic_users(DEFAULT_YAWS, DEFAULT_QUALITIES))
    values.update(overrides)
    return ScenarioConfig(**values)


def random_direction_pool(seed=POOL_SEED, size=POOL_SIZE):
    """Viewing directions with a uniform yaw and a pitch near the horizon.

    :param seed: Seed of the draw.
    :type seed: int

    :param size: Number of directions.
    :type size: int

    :returns: The directions.
    :rtype: tuple
    """
    rng = make_rng(seed)
    yaws = rng.uniform(0.0, 360.0, size)
    pitches = np.clip(
        rng.normal(DEFAULT_PITCH, POOL_PITCH_SPREAD_DEG, size), 0.0, 180.0)
    return tuple(
        ViewDirection(wrap_yaw(float(yaw)), float(pitch))
        for yaw, pitch in zip(yaws, pitches))


def preset_scenario(name, **overrides):
    """Scenario of one of the standard experiments.

    'users' sweeps K from 1 to 5 at m = 4 with qualities (2, 2, 3, 3, 4),
    'antennas' sweeps m with four users of qualities (2, 3, 3, 4); both draw
    the users of every trial from a pool of 30 directions. 'concentration'
    sweeps delta for the five synthetic users at m = 4.

    :param name: One of PRESETS.
    :type name: str

    :param overrides: ScenarioConfig fields to change.

    :returns: The scenario.
    :rtype: ScenarioConfig

    :raises: ConfigException for an unknown name.
    """
    if name == PRESET_USERS:
        values = dict(
            m=4, sweep_param=SWEEP_K, direction_pool=random_direction_pool())
    elif name == PRESET_ANTENNAS:
        values = dict(
            users=_synthetic_users(DEFAULT_YAWS[1:], DEFAULT_QUALITIES[1:]),
            sweep_param=SWEEP_M,
            sweep_values=DEFAULT_M_SWEEP,
            direction_pool=random_direction_pool())
    elif name == PRESET_CONCENTRATION:
        values = dict(m=4, sweep_param=SWEEP_DELTA)
    else:
        raise ConfigException(
            'Unknown preset %r, expected one of %s' % (name, PRESETS))
    values.update(overrides)
    return default_scenario(**values)


def _check_keys(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigException('%s must be an object' % section)
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigException(
            'Unknown key(s) %s in %s' % (', '.join(unknown), section))


def _direction(section, data):
    _check_keys(section, data, DIRECTION_KEYS)
    try:
        return ViewDirection(
            float(data['yaw_deg']),
            float(data.get('pitch_deg', DEFAULT_PITCH)))
    except KeyError as e:
        raise ConfigException('%s misses %s' % (section, e))
    except TileBoundsException as e:
        raise ConfigException('%s: %s' % (section, e))


def scenario_from_dict(data):
    """Build a scenario from parsed JSON.

    Keys mirror ScenarioConfig; nested objects describe the tiling, the
    ladder (explicit rates, or levels/base_bps/ratio), the users and the
    sweep. Missing keys take the tilecast.config defaults.

    :param data: The parsed scenario.
    :type data: dict

    :returns: The scenario.
    :rtype: ScenarioConfig

    :raises: ConfigException for unknown keys or bad values.
    """
    _check_keys('scenario', data, SCENARIO_KEYS)
    values = {}
    try:
        if 'tiling' in data:
            tiling = data['tiling']
            _check_keys('tiling', tiling, TILING_KEYS)
            defaults = default_tiling()
            values['tiling'] = TilingConfig(
                u_h=int(tiling.get('u_h', defaults.u_h)),
                u_v=int(tiling.get('u_v', defaults.u_v)),
                fov_h_deg=float(tiling.get('fov_h_deg', defaults.fov_h_deg)),
                fov_v_deg=float(tiling.get('fov_v_deg', defaults.fov_v_deg)),
                margin_deg=float(
                    tiling.get('margin_deg', defaults.margin_deg)))
        if 'ladder' in data:
            ladder = data['ladder']
            _check_keys('ladder', ladder, LADDER_KEYS)
            if 'rates' in ladder:
                values['ladder'] = QualityLadder(tuple(ladder['rates']))
            else:
                values['ladder'] = QualityLadder.geometric(
                    int(ladder.get('levels', config.LADDER_LEVELS)),
                    float(ladder.get('base_bps', config.LADDER_BASE_BPS)),
                    float(ladder.get('ratio', config.LADDER_RATIO)))
        if 'users' in data:
            users = []
            for index, user in enumerate(data['users'], start=1):
                section = 'user %s' % index
                _check_keys(section, user, USER_KEYS)
                quality = int(user.get('quality', DEFAULT_QUALITY))
                direction = {
                    key: user[key] for key in DIRECTION_KEYS if key in user}
                users.append(UserSpec(_direction(section, direction), quality))
            values['users'] = tuple(users)
        if 'direction_pool' in data:
            values['direction_pool'] = tuple(
                _direction('direction pool entry %s' % index, entry)
                for index, entry in enumerate(data['direction_pool'], 1))
        if 'sweep' in data:
            sweep = data['sweep']
            _check_keys('sweep', sweep, SWEEP_KEYS)
            values['sweep_param'] = sweep.get('param', SWEEP_NONE)
            values['sweep_values'] = tuple(sweep.get('values', ()))
        for key in ('m', 'n_sc', 'trials', 'base_seed', 'workers'):
            if key in data:
                values[key] = int(data[key])
        for key in ('bandwidth_hz', 'noise_w', 'delta_deg'):
            if key in data:
                values[key] = float(data[key])
        for key in ('baseline2_beam', 'dc_start'):
            if key in data:
                values[key] = str(data[key])
        if 'strict' in data:
            values['strict'] = bool(data['strict'])
        if 'schemes' in data:
            values['schemes'] = tuple(data['schemes'])
        if data.get('beta') is not None:
            values['beta'] = tuple(float(beta) for beta in data['beta'])
    except (TypeError, ValueError, TilecastException) as e:
        if isinstance(e, ConfigException):
            raise
        raise ConfigException('Bad scenario value: %s' % e)
    return default_scenario(**values)


def load_scenario(path, **overrides):
    """Read a JSON scenario file; overrides replace file values.

    :param path: Path of the JSON file.
    :type path: str

    :returns: The scenario.
    :rtype: ScenarioConfig

    :raises: ConfigException for unreadable files, unknown keys or bad
        values.
    """
    try:
        with open(path) as scenario_file:
            data = json.load(scenario_file)
    except (IOError, ValueError) as e:
        raise ConfigException('Cannot read scenario %s: %s' % (path, e))
    scenario = scenario_from_dict(data)
    overrides = {
        key: value for key, value in overrides.items() if value is not None}
    if overrides:
        try:
            scenario = replace(scenario, **overrides)
        except TypeError as e:
            raise ConfigException(str(e))
    LOGGER.info('Loaded scenario %s' % path)
    return scenario


def shift_directions(base, delta_deg):
    """Concentrate five viewing directions.

    Yaw moves by +delta, +delta, 0, -delta, -delta, wrapped into [0, 360);
    pitch is kept.

    :param base: Exactly five directions.
    :type base: list

    :param delta_deg: Shift in degrees, >= 0.
    :type delta_deg: float

    :returns: The shifted directions.
    :rtype: list

    :raises: WrongDirectionCountException unless there are five directions.
    """
    if len(base) != 5:
        raise WrongDirectionCountException(
            'Shifting needs exactly 5 directions, got %s' % len(base))
    return concentrate_directions(base, delta_deg)


def concentrate_directions(base, delta_deg):
    """Concentrate any number of viewing directions.

    The first half of the users move by +delta and the second half by
    -delta; with an odd count the middle user stays. Five users get the
    same shifts as shift_directions.

    :param base: The directions, in user order.
    :type base: list

    :param delta_deg: Shift in degrees, >= 0.
    :type delta_deg: float

    :returns: The shifted directions.
    :rtype: list
    """
    if delta_deg < 0:
        raise ValueError('delta must be >= 0, got %s' % delta_deg)
    half = len(base) // 2
    shifts = [delta_deg] * half + [0.0] * (len(base) % 2) + \
        [-delta_deg] * half
    return [
        ViewDirection(wrap_yaw(direction.yaw_deg + shift), direction.pitch_deg)
        for direction, shift in zip(base, shifts)]


def trial_directions(cfg, seed):
    """Viewing directions of a trial: drawn from the pool when one is set,
    then concentrated by delta_deg."""
    if cfg.direction_pool:
        rng = make_rng([seed, DIRECTION_STREAM])
        picks = rng.choice(
            len(cfg.direction_pool), size=cfg.k_users, replace=False)
        directions = [cfg.direction_pool[pick] for pick in picks]
    else:
        directions = [user.direction for user in cfg.users]
    if cfg.delta_deg > 0:
        directions = concentrate_directions(directions, cfg.delta_deg)
    return directions


def trial_messages(cfg, scheme, directions):
    tile_sets = [compute_tile_set(d, cfg.tiling) for d in directions]
    qualities = [user.quality for user in cfg.users]
    if scheme == SCHEME_BASELINE1:
        return unicast_messages(tile_sets, qualities, cfg.ladder)
    return build_messages(build_partition(tile_sets), qualities, cfg.ladder)


def solve_scheme(cfg, scheme, state, messages, seed=0):
    """Run one scheme on one channel state.

    :returns: The complete allocation.
    :rtype: Allocation
    """
    if scheme == SCHEME_DC:
        return dc_solve(
            state, messages, start_mode=cfg.dc_start, seed=seed,
            beam=cfg.baseline2_beam)
    if scheme == SCHEME_ASYMPTOTIC:
        plan = asymptotic_plan(state, messages)
    else:
        plan = mrt_plan(state, messages, cfg.baseline2_beam)
    alloc = solve_quoted_allocation(
        messages, plan.quotes, state.bandwidth_hz, m=state.m)
    return assemble_allocation(alloc, plan)


def run_trial(cfg, scheme, trial_index):
    """Run one scheme on one Monte-Carlo trial.

    Failures are logged and returned as a flagged result with a nan power.

    :param cfg: The scenario.
    :type cfg: ScenarioConfig

    :param scheme: One of SCHEMES.
    :type scheme: str

    :param trial_index: Trial number, from 0.
    :type trial_index: int

    :returns: The trial result; its power passed the constraint audit.
    :rtype: TrialResult
    """
    if scheme not in SCHEMES:
        raise ConfigException('Unknown scheme %r' % scheme)
    seed = derive_trial_seed(cfg.base_seed, trial_index)
    try:
        directions = trial_directions(cfg, seed)
        messages = trial_messages(cfg, scheme, directions)
        state = sample_channel(
            seed,
            m=cfg.m,
            n_sc=cfg.n_sc,
            k_users=cfg.k_users,
            beta=cfg.beta,
            noise_w=cfg.noise_w,
            bandwidth_hz=cfg.bandwidth_hz)
        alloc = solve_scheme(cfg, scheme, state, messages, seed=seed)
        audit_allocation(alloc, state, messages)
    except TilecastException as e:
        LOGGER.exception(
            'Trial %s of %s failed: %s' % (trial_index, scheme, e))
        return TrialResult(
            scheme=scheme,
            trial=trial_index,
            seed=seed,
            total_power_w=float('nan'),
            converged=False,
            unique_argmax=False,
            iterations=0,
            error=str(e))
    LOGGER.info('Trial %s of %s: %s messages, %.6e W' % (
        trial_index, scheme, len(messages), alloc.total_power_w))
    return TrialResult(
        scheme=scheme,
        trial=trial_index,
        seed=seed,
        total_power_w=alloc.total_power_w,
        converged=bool(alloc.converged),
        unique_argmax=bool(alloc.unique_argmax),
        iterations=int(alloc.iterations))


def _run_task(task):
    cfg, scheme, trial_index, sweep_value = task
    result = run_trial(cfg, scheme, trial_index)
    return replace(
        result, sweep_param=cfg.sweep_param, sweep_value=sweep_value)


def _format_value(value):
    if value is None:
        return ''
    if isinstance(value, float):
        if value.is_integer():
            return '%d' % value
        return FLOAT_FORMAT % value
    return str(value)


def _format_float(value):
    return FLOAT_FORMAT % value


def summary_values(results, strict=False):
    """Powers that enter the summary: finite, and converged in strict mode."""
    return [
        result.total_power_w for result in results
        if np.isfinite(result.total_power_w) and
        (result.converged or not strict)]


def result_rows(cfg, results):
    """CSV rows: trial rows then mean and stderr rows per group."""
    rows = []
    groups = {}
    for result in results:
        groups.setdefault((result.sweep_value, result.scheme), []).append(
            result)
    for (sweep_value, scheme), group in groups.items():
        for result in group:
            rows.append([
                scheme, cfg.sweep_param, _format_value(sweep_value),
                result.trial, result.seed,
                _format_float(result.total_power_w),
                result.converged, result.unique_argmax, result.iterations])
        values = summary_values(group, cfg.strict)
        mean, stderr = mean_and_stderr(values)
        converged = all(result.converged for result in group)
        unique = all(result.unique_argmax for result in group)
        for label, value in ((MEAN_ROW, mean), (STDERR_ROW, stderr)):
            rows.append([
                scheme, cfg.sweep_param, _format_value(sweep_value),
                label, '', _format_float(value), converged, unique,
                len(values)])
    return rows


def run_experiment(cfg, out_path=None):
    """Run every (sweep value, scheme, trial) and write the result file.

    Rows come in sweep, scheme and trial order whatever the worker count,
    so identical scenarios give byte-identical files.

    :param cfg: The scenario.
    :type cfg: ScenarioConfig

    :param out_path: Output CSV path; a unique file in the results work
        directory when omitted.
    :type out_path: str

    :returns: Path of the written file.
    :rtype: str
    """
    if out_path is None:
        out_path = unique_filename(suffix='.csv', dir='results')
    tasks = []
    for value in cfg.sweep_points():
        point = cfg.at_sweep_point(value)
        for scheme in cfg.schemes:
            for trial_index in range(cfg.trials):
                tasks.append((point, scheme, trial_index, value))
    LOGGER.info('Running %s trials on %s worker(s)' % (
        len(tasks), cfg.workers))

    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
            results = list(executor.map(_run_task, tasks))
    else:
        results = [_run_task(task) for task in tasks]

    failed = sum(1 for result in results if result.error)
    if failed:
        LOGGER.warning('%s of %s trials failed' % (failed, len(results)))
    directory = os.path.dirname(os.path.abspath(out_path))
    if not os.path.exists(directory):
        os.makedirs(directory)
    with open(out_path, 'w', newline='') as out_file:
        writer = csv.writer(out_file, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        writer.writerows(result_rows(cfg, results))
    LOGGER.info('Wrote %s' % out_path)
    return out_path


def audit_results(path, strict=False, rtol=1e-8, cfg=None, recheck=None):
    """Re-verify a result file.

    Checks the header, that every group has its mean and stderr rows after
    its trial rows, that the row counts agree, and recomputes the
    summaries from the trial rows. Given the scenario the file was run
    with, trials are also solved again, their allocations audited, and
    their seeds and powers compared with the stored rows.

    :param path: The CSV file.
    :type path: str

    :param strict: Whether the run excluded non-converged trials.
    :type strict: bool

    :param rtol: Relative tolerance of the recomputed summaries and powers.
    :type rtol: float

    :param cfg: Scenario of the run; no trial is solved again without it.
    :type cfg: ScenarioConfig

    :param recheck: Number of trial rows to solve again, spread evenly over
        the file; every row when omitted.
    :type recheck: int

    :returns: Number of trial rows checked.
    :rtype: int

    :raises: ConstraintViolationException listing every problem found.
    """
    violations = []
    with open(path, newline='') as in_file:
        reader = csv.reader(in_file)
        header = next(reader, None)
        rows = list(reader)
    if tuple(header or ()) != CSV_HEADER:
        raise ConstraintViolationException(
            'Unexpected header %s' % header, violations=['header'])

    trials = {}
    summaries = {}
    for number, row in enumerate(rows, start=2):
        if len(row) != len(CSV_HEADER):
            violations.append('line %s has %s fields' % (number, len(row)))
            continue
        key = (row[0], row[1], row[2])
        if row[3] in (MEAN_ROW, STDERR_ROW):
            summaries.setdefault(key, {})[row[3]] = row
        else:
            if key in summaries:
                violations.append(
                    'line %s: trial row after the summary of %s' % (
                        number, key))
            trials.setdefault(key, []).append(row)

    counts = set()
    for key, group in trials.items():
        counts.add(len(group))
        summary = summaries.get(key, {})
        if set(summary) != {MEAN_ROW, STDERR_ROW}:
            violations.append('%s lacks its summary rows' % (key,))
            continue
        values = [
            float(row[5]) for row in group
            if np.isfinite(float(row[5])) and
            (row[6] == 'True' or not strict)]
        if int(summary[MEAN_ROW][8]) != len(values):
            violations.append(
                '%s averages %s trials, found %s' % (
                    key, summary[MEAN_ROW][8], len(values)))
        for label, expected in zip(
                (MEAN_ROW, STDERR_ROW), mean_and_stderr(values)):
            written = float(summary[label][5])
            if np.isnan(expected) and np.isnan(written):
                continue
            if not np.isclose(written, expected, rtol=rtol, atol=0.0):
                violations.append(
                    '%s %s is %s, recomputed %s' % (
                        key, label, written, expected))
    for key in set(summaries) - set(trials):
        violations.append('%s has summary rows but no trials' % (key,))
    if len(counts) > 1:
        violations.append('groups have different trial counts %s' % (
            sorted(counts),))
    if cfg is not None:
        rows = [row for group in trials.values() for row in group]
        if recheck is not None and 0 < recheck < len(rows):
            picks = np.linspace(0, len(rows) - 1, recheck).astype(int)
            rows = [rows[pick] for pick in np.unique(picks)]
        violations.extend(recheck_trials(cfg, rows, rtol))
    if violations:
        raise ConstraintViolationException(
            '%s problem(s) in %s: %s' % (len(violations), path, violations[0]),
            violations=violations)
    checked = sum(len(group) for group in trials.values())
    LOGGER.info('Audited %s trial rows in %s' % (checked, path))
    return checked


def _scenario_at(cfg, sweep_param, sweep_value):
    point = replace(cfg, sweep_param=sweep_param)
    if sweep_param == SWEEP_NONE:
        return point
    return point.at_sweep_point(float(sweep_value))


def recheck_trials(cfg, rows, rtol=1e-8):
    """Solve stored trial rows again and compare them.

    :param cfg: Scenario of the run.
    :type cfg: ScenarioConfig

    :param rows: Trial rows of a result file.
    :type rows: list

    :param rtol: Relative tolerance of the power comparison.
    :type rtol: float

    :returns: A description of every mismatch.
    :rtype: list
    """
    violations = []
    for row in rows:
        scheme, sweep_param, sweep_value, trial = row[:4]
        label = '%s trial %s at %s=%s' % (
            scheme, trial, sweep_param, sweep_value)
        try:
            point = _scenario_at(cfg, sweep_param, sweep_value)
            result = run_trial(point, scheme, int(trial))
        except (ConfigException, ValueError) as e:
            violations.append('%s cannot be solved again: %s' % (label, e))
            continue
        if str(result.seed) != row[4]:
            violations.append('%s has seed %s, expected %s' % (
                label, row[4], result.seed))
        stored = float(row[5])
        if np.isnan(stored) and np.isnan(result.total_power_w):
            continue
        if not np.isclose(
                stored, result.total_power_w, rtol=rtol, atol=0.0):
            violations.append('%s stores %s W, solved again %s W' % (
                label, row[5], _format_float(result.total_power_w)))
    LOGGER.info('Solved %s trial rows again' % len(rows))
    return violations


def random_quoted_instance(rng, max_messages=3, max_sc=4):
    """Small random (messages, quotes, bandwidth) instance."""
    n_msgs = int(rng.integers(1, max_messages + 1))
    n_sc = int(rng.integers(n_msgs, max_sc + 1))
    bandwidth_hz = config.BANDWIDTH_HZ
    quotes = rng.exponential(1.0, size=(n_msgs, n_sc))
    messages = [
        Message(
            subset=(i + 1,),
            level=1,
            audience=(i + 1,),
            tile_count=1,
            demand_bits_per_s=float(
                bandwidth_hz * rng.uniform(0.2, 3.0)))
        for i in range(n_msgs)]
    return messages, quotes, bandwidth_hz


def oracle_check(instances=50, seed=0, max_messages=3, max_sc=4):
    """Compare the dual solver with exhaustive search on small instances.

    :param instances: Number of random instances.
    :type instances: int

    :param seed: Seed of the instance stream.
    :type seed: int

    :returns: Relative power gap of every instance.
    :rtype: list
    """
    rng = make_rng(seed)
    gaps = []
    for index in range(instances):
        messages, quotes, bandwidth_hz = random_quoted_instance(
            rng, max_messages, max_sc)
        solved = solve_quoted_allocation(messages, quotes, bandwidth_hz)
        exact = brute_force_allocation(messages, quotes, bandwidth_hz)
        gap = (solved.total_power_w - exact.total_power_w) / \
            exact.total_power_w
        LOGGER.debug('Oracle instance %s: gap %.3e' % (index, gap))
        gaps.append(gap)
    return gaps
