# coding=utf-8
"""Equirectangular tiling of the 360 sphere and FoV to tile-set mapping.

Yaw runs over [0, 360) and wraps; pitch runs over [0, 180] and is clamped.
Tile (col, row) covers the yaw band of column col and the pitch band of
row row, both counted from 1.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from collections import namedtuple
from dataclasses import dataclass

from tilecast.exceptions import TileBoundsException

TileId = namedtuple('TileId', ['col', 'row'])


@dataclass(frozen=True)
class TilingConfig:
    """Tile grid, FoV extents and the margin added on all four sides."""
    u_h: int
    u_v: int
    fov_h_deg: float
    fov_v_deg: float
    margin_deg: float = 0.0

    def __post_init__(self):
        if self.u_h < 1 or self.u_v < 1:
            raise TileBoundsException(
                'Tile grid must be at least 1x1, got %sx%s' % (
                    self.u_h, self.u_v))
        if not 0 < self.fov_h_deg <= 360:
            raise TileBoundsException(
                'Horizontal FoV must be in (0, 360], got %s' % self.fov_h_deg)
        if not 0 < self.fov_v_deg <= 180:
            raise TileBoundsException(
                'Vertical FoV must be in (0, 180], got %s' % self.fov_v_deg)
        if self.margin_deg < 0:
            raise TileBoundsException(
                'Margin must be non negative, got %s' % self.margin_deg)

    @property
    def col_width_deg(self):
        return 360.0 / self.u_h

    @property
    def row_height_deg(self):
        return 180.0 / self.u_v


@dataclass(frozen=True)
class ViewDirection:
    """Center of a user's FoV."""
    yaw_deg: float
    pitch_deg: float

    def __post_init__(self):
        if not 0 <= self.yaw_deg < 360:
            raise TileBoundsException(
                'Yaw must be in [0, 360), got %s' % self.yaw_deg)
        if not 0 <= self.pitch_deg <= 180:
            raise TileBoundsException(
                'Pitch must be in [0, 180], got %s' % self.pitch_deg)


def wrap_yaw(yaw_deg):
    """Wrap an angle in degrees onto [0, 360).

    :param yaw_deg: Any angle in degrees.
    :type yaw_deg: float

    :returns: The equivalent angle in [0, 360).
    :rtype: float
    """
    wrapped = yaw_deg % 360.0
    # -1e-18 % 360 rounds to 360.0
    if wrapped >= 360.0:
        wrapped = 0.0
    return wrapped


def tile_coverage(tile, cfg):
    """Get the angular rectangle covered by a tile.

    :param tile: The tile, 1 based.
    :type tile: TileId

    :param cfg: The tiling.
    :type cfg: TilingConfig

    :returns: Two (low, high) tuples: the yaw interval and the pitch interval
        in degrees.
    :rtype: ((float, float), (float, float))

    :raises: TileBoundsException if the tile is outside the grid.
    """
    col, row = tile
    if not (1 <= col <= cfg.u_h and 1 <= row <= cfg.u_v):
        raise TileBoundsException(
            'Tile %s is outside a %sx%s grid' % (
                (col, row), cfg.u_h, cfg.u_v))
    yaw = ((col - 1) * 360.0 / cfg.u_h, col * 360.0 / cfg.u_h)
    pitch = ((row - 1) * 180.0 / cfg.u_v, row * 180.0 / cfg.u_v)
    return yaw, pitch


def extended_fov(direction, cfg):
    """Get the FoV rectangle grown by the margin on all four sides.

    The yaw interval is returned unwrapped (it may leave [0, 360)); the
    pitch interval is clamped to [0, 180].

    :param direction: The viewing direction.
    :type direction: ViewDirection

    :param cfg: The tiling and FoV settings.
    :type cfg: TilingConfig

    :returns: Yaw interval and pitch interval in degrees.
    :rtype: ((float, float), (float, float))
    """
    half_h = (cfg.fov_h_deg + 2 * cfg.margin_deg) / 2.0
    half_v = (cfg.fov_v_deg + 2 * cfg.margin_deg) / 2.0
    yaw = (direction.yaw_deg - half_h, direction.yaw_deg + half_h)
    pitch = (
        max(0.0, direction.pitch_deg - half_v),
        min(180.0, direction.pitch_deg + half_v))
    return yaw, pitch


def _overlaps(low, high, other_low, other_high):
    # Open intervals: touching at a single point is not an overlap.
    return min(high, other_high) - max(low, other_low) > 0


def _yaw_overlaps(yaw_interval, col_interval):
    low, high = yaw_interval
    col_low, col_high = col_interval
    for shift in (-360.0, 0.0, 360.0):
        if _overlaps(low + shift, high + shift, col_low, col_high):
            return True
    return False


def compute_tile_set(direction, cfg):
    """Compute the tiles that must be sent for a viewing direction.

    A tile is included when its coverage rectangle intersects the extended
    FoV with nonzero area. The yaw interval wraps modulo 360 and the pitch
    interval is clamped at the poles.

    :param direction: The viewing direction.
    :type direction: ViewDirection

    :param cfg: The tiling and FoV settings.
    :type cfg: TilingConfig

    :returns: The tiles to transmit, never empty.
    :rtype: frozenset
    """
    yaw, pitch = extended_fov(direction, cfg)
    full_circle = yaw[1] - yaw[0] >= 360.0

    columns = []
    for col in range(1, cfg.u_h + 1):
        col_interval = (
            (col - 1) * 360.0 / cfg.u_h, col * 360.0 / cfg.u_h)
        if full_circle or _yaw_overlaps(yaw, col_interval):
            columns.append(col)

    rows = []
    for row in range(1, cfg.u_v + 1):
        row_low = (row - 1) * 180.0 / cfg.u_v
        row_high = row * 180.0 / cfg.u_v
        if _overlaps(pitch[0], pitch[1], row_low, row_high):
            rows.append(row)

    return frozenset(TileId(col, row) for col in columns for row in rows)
