# coding=utf-8
"""Command line entry point.

    python runexperiment.py run --config scenario.json --out results.csv
    python runexperiment.py oracle-check --instances 50
    python runexperiment.py audit results.csv --config scenario.json

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import argparse

import numpy as np

from tilecast import config
from tilecast import LOGGER
from tilecast.exceptions import ConfigException, TilecastException
from tilecast.harness import (
    PRESETS,
    SCHEMES,
    SWEEPS,
    audit_results,
    default_scenario,
    load_scenario,
    oracle_check,
    preset_scenario,
    run_experiment)

ORACLE_GAP = 1e-3


def build_parser():
    parser = argparse.ArgumentParser(
        prog='tilecast',
        description='Power minimization for multicast tiled 360 video.')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    run = commands.add_parser('run', help='run a Monte-Carlo experiment')
    source = run.add_mutually_exclusive_group()
    source.add_argument('--config', dest='config_path', help='JSON scenario')
    source.add_argument(
        '--preset', choices=PRESETS, help='standard experiment to run')
    run.add_argument('--out', dest='out_path', help='output CSV path')
    run.add_argument('--seed', type=int, help='base seed')
    run.add_argument('--trials', type=int, help='trials per sweep point')
    run.add_argument(
        '--scheme', action='append', choices=SCHEMES, dest='schemes',
        help='scheme to run, repeatable (default: all)')
    run.add_argument('--sweep', choices=SWEEPS, help='parameter to sweep')
    run.add_argument('--workers', type=int, help='worker processes')
    run.add_argument(
        '--strict', action='store_true', default=None,
        help='leave non-converged trials out of the means')

    oracle = commands.add_parser(
        'oracle-check', help='compare the allocator with exhaustive search')
    oracle.add_argument('--instances', type=int, default=50)
    oracle.add_argument('--seed', type=int, default=config.BASE_SEED)

    audit = commands.add_parser('audit', help='re-verify a result file')
    audit.add_argument('path', help='CSV result file')
    audit.add_argument('--strict', action='store_true')
    scenario = audit.add_mutually_exclusive_group()
    scenario.add_argument(
        '--config', dest='config_path',
        help='JSON scenario of the run; its trials are solved again')
    scenario.add_argument(
        '--preset', choices=PRESETS,
        help='standard experiment of the run; its trials are solved again')
    audit.add_argument('--seed', type=int, help='base seed of the run')
    audit.add_argument(
        '--recheck', type=int,
        help='number of trials to solve again (default: all)')
    return parser


def _scenario(options):
    overrides = {
        'trials': options.trials,
        'base_seed': options.seed,
        'schemes': tuple(options.schemes) if options.schemes else None,
        'workers': options.workers,
        'strict': options.strict,
    }
    if options.sweep:
        overrides['sweep_param'] = options.sweep
        overrides['sweep_values'] = ()
    if options.config_path:
        return load_scenario(options.config_path, **overrides)
    overrides = {
        key: value for key, value in overrides.items() if value is not None}
    if options.preset:
        return preset_scenario(options.preset, **overrides)
    return default_scenario(**overrides)


def _audit_scenario(options):
    if options.config_path:
        return load_scenario(options.config_path, base_seed=options.seed)
    if options.preset:
        if options.seed is None:
            return preset_scenario(options.preset)
        return preset_scenario(options.preset, base_seed=options.seed)
    return None


def main(argv=None):
    """Run a command; returns the process exit code."""
    options = build_parser().parse_args(argv)
    try:
        if options.command == 'run':
            scenario = _scenario(options)
            path = run_experiment(scenario, options.out_path)
            print(path)
        elif options.command == 'oracle-check':
            gaps = np.asarray(oracle_check(options.instances, options.seed))
            worst = float(np.max(gaps)) if gaps.size else 0.0
            print('instances: %s, worst relative gap: %.3e' % (
                gaps.size, worst))
            if worst > ORACLE_GAP:
                LOGGER.error('Oracle gap %.3e above %s' % (worst, ORACLE_GAP))
                return 1
        else:
            checked = audit_results(
                options.path,
                strict=options.strict,
                cfg=_audit_scenario(options),
                recheck=options.recheck)
            print('%s trial rows verified' % checked)
    except ConfigException as e:
        LOGGER.error('Configuration error: %s' % e)
        return 2
    except TilecastException as e:
        LOGGER.exception(e)
        return 1
    return 0
