# -*- coding:utf-8 -*-
"""Configuration options for the tilecast planner.

Every value can be overridden through an environment variable of the same
name, or through a module named by TILECAST_CONFIG_MODULE.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
import os
import tempfile

# Subcarrier bandwidth B in Hz
BANDWIDTH_HZ = float(os.environ.get('BANDWIDTH_HZ')) \
    if os.environ.get('BANDWIDTH_HZ', False) else 39e3
# Number of subcarriers N
SUBCARRIERS = int(os.environ.get('SUBCARRIERS')) \
    if os.environ.get('SUBCARRIERS', False) else 64
# Noise power per subcarrier in watts
NOISE_W = float(os.environ.get('NOISE_W')) \
    if os.environ.get('NOISE_W', False) else 1e-9
# Transmit antennas at the server
ANTENNAS = int(os.environ.get('ANTENNAS')) \
    if os.environ.get('ANTENNAS', False) else 4

# Equirectangular tiling and field of view, in tiles and degrees
TILES_H = int(os.environ.get('TILES_H')) \
    if os.environ.get('TILES_H', False) else 30
TILES_V = int(os.environ.get('TILES_V')) \
    if os.environ.get('TILES_V', False) else 15
FOV_DEG = float(os.environ.get('FOV_DEG')) \
    if os.environ.get('FOV_DEG', False) else 100.0
# Extra angle transmitted in the four directions of the FoV
MARGIN_DEG = float(os.environ.get('MARGIN_DEG')) \
    if os.environ.get('MARGIN_DEG', False) else 15.0

# Placeholder geometric quality ladder: D_l = BASE * RATIO ** (l - 1)
LADDER_LEVELS = int(os.environ.get('LADDER_LEVELS')) \
    if os.environ.get('LADDER_LEVELS', False) else 5
LADDER_BASE_BPS = float(os.environ.get('LADDER_BASE_BPS')) \
    if os.environ.get('LADDER_BASE_BPS', False) else 20e3
LADDER_RATIO = float(os.environ.get('LADDER_RATIO')) \
    if os.environ.get('LADDER_RATIO', False) else 1.5

# Monte-Carlo
TRIALS = int(os.environ.get('TRIALS')) \
    if os.environ.get('TRIALS', False) else 100
BASE_SEED = int(os.environ.get('BASE_SEED')) \
    if os.environ.get('BASE_SEED', False) else 20190
WORKERS = int(os.environ.get('WORKERS')) \
    if os.environ.get('WORKERS', False) else 1

# Quoted allocation (dual decomposition)
ALLOC_MAX_ITER = int(os.environ.get('ALLOC_MAX_ITER')) \
    if os.environ.get('ALLOC_MAX_ITER', False) else 5000
ALLOC_TOL = float(os.environ.get('ALLOC_TOL')) \
    if os.environ.get('ALLOC_TOL', False) else 1e-6
# Number of iterations over which the dual objective must be stable
ALLOC_WINDOW = int(os.environ.get('ALLOC_WINDOW')) \
    if os.environ.get('ALLOC_WINDOW', False) else 20
# Relative duality gap below which a stalled dual loop counts as converged
ALLOC_GAP_TOL = float(os.environ.get('ALLOC_GAP_TOL')) \
    if os.environ.get('ALLOC_GAP_TOL', False) else 1e-2
STEP_SIZE = float(os.environ.get('STEP_SIZE')) \
    if os.environ.get('STEP_SIZE', False) else 0.5
STEP_TAU = float(os.environ.get('STEP_TAU')) \
    if os.environ.get('STEP_TAU', False) else 50.0

# DC programming
DC_OUTER_MAX = int(os.environ.get('DC_OUTER_MAX')) \
    if os.environ.get('DC_OUTER_MAX', False) else 100
DC_TOL = float(os.environ.get('DC_TOL')) \
    if os.environ.get('DC_TOL', False) else 1e-4
DC_INNER_MAX = int(os.environ.get('DC_INNER_MAX')) \
    if os.environ.get('DC_INNER_MAX', False) else 5000
DC_INNER_TOL = float(os.environ.get('DC_INNER_TOL')) \
    if os.environ.get('DC_INNER_TOL', False) else 1e-6
# One of asymptotic, baseline2, best, random
DC_START = os.environ.get('DC_START') \
    if os.environ.get('DC_START', False) else 'asymptotic'

# Beamforming
POWER_ITERATION_TOL = float(os.environ.get('POWER_ITERATION_TOL')) \
    if os.environ.get('POWER_ITERATION_TOL', False) else 1e-10
POWER_ITERATION_MAX = int(os.environ.get('POWER_ITERATION_MAX')) \
    if os.environ.get('POWER_ITERATION_MAX', False) else 10000
# One of eigen, sum
BASELINE2_BEAM = os.environ.get('BASELINE2_BEAM') \
    if os.environ.get('BASELINE2_BEAM', False) else 'eigen'

# Where to write result files when no --out is given
CACHE_DIR = os.environ.get('CACHE_DIR') \
    if os.environ.get('CACHE_DIR', False) else tempfile.gettempdir()
