# coding=utf-8
"""Exact-audience partition of the requested tiles and message building.

Users are numbered from 1. A user subset is a sorted tuple of user numbers,
e.g. (1, 2), which makes it usable as a dict key and gives a stable order.

:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""
from dataclasses import dataclass, field

from tilecast import LOGGER
from tilecast.exceptions import QualityLevelException


@dataclass(frozen=True)
class QualityLadder:
    """Per-tile encoding rates D_1 < ... < D_L in bits/s."""
    rates: tuple

    def __post_init__(self):
        rates = tuple(float(rate) for rate in self.rates)
        if not rates:
            raise QualityLevelException('A quality ladder needs a level')
        if rates[0] <= 0:
            raise QualityLevelException(
                'Encoding rates must be positive, got %s' % (rates,))
        for low, high in zip(rates, rates[1:]):
            if not high > low:
                raise QualityLevelException(
                    'Encoding rates must be strictly increasing, got %s' % (
                        rates,))
        object.__setattr__(self, 'rates', rates)

    @classmethod
    def geometric(cls, levels, base_bps, ratio):
        """Build the ladder D_l = base_bps * ratio ** (l - 1).

        :param levels: Number of quality levels L.
        :type levels: int

        :param base_bps: Rate of the lowest level in bits/s.
        :type base_bps: float

        :param ratio: Growth factor between consecutive levels, > 1.
        :type ratio: float

        :returns: The ladder.
        :rtype: QualityLadder
        """
        return cls(tuple(base_bps * ratio ** level for level in range(levels)))

    @property
    def levels(self):
        return len(self.rates)

    def rate(self, level):
        """Encoding rate of a 1 based quality level."""
        self.check_level(level)
        return self.rates[level - 1]

    def check_level(self, level):
        if not 1 <= level <= self.levels:
            raise QualityLevelException(
                'Quality level %s outside ladder 1..%s' % (level, self.levels))


@dataclass(frozen=True)
class TilePartition:
    """Tiles grouped by the exact set of users requesting them.

    groups maps a user subset to its nonempty tile set. index_set lists the
    subsets in canonical order: by size, then lexicographically.
    """
    groups: dict
    index_set: tuple
    k_users: int
    user_tiles: tuple = field(default=(), repr=False)

    @property
    def is_empty(self):
        return not self.index_set

    def subsets_of_user(self, user):
        """Subsets in the index set that contain user."""
        return [subset for subset in self.index_set if user in subset]

    def tile_count(self):
        return sum(len(tiles) for tiles in self.groups.values())


@dataclass(frozen=True)
class Message:
    """Quality level `level` of the tiles exclusive to `subset`."""
    subset: tuple
    level: int
    audience: tuple
    tile_count: int
    demand_bits_per_s: float

    @property
    def label(self):
        return '(%s, %s)' % (
            '{%s}' % ','.join(str(user) for user in self.subset), self.level)


def subset_sort_key(subset):
    return len(subset), subset


def build_partition(tile_sets):
    """Partition the union of the users' tile sets by exact audience.

    Every requested tile goes into the group keyed by the subset of users
    whose tile set contains it. Empty groups are omitted.

    :param tile_sets: Tile set G_k of each user, user k at position k - 1.
    :type tile_sets: list

    :returns: The partition. It is empty (and a warning is logged) when
        nobody requests anything.
    :rtype: TilePartition
    """
    user_tiles = tuple(frozenset(tiles) for tiles in tile_sets)
    members = {}
    for user, tiles in enumerate(user_tiles, start=1):
        for tile in tiles:
            members.setdefault(tile, []).append(user)

    grouped = {}
    for tile, users in members.items():
        grouped.setdefault(tuple(sorted(users)), set()).add(tile)

    index_set = tuple(sorted(grouped, key=subset_sort_key))
    groups = {subset: frozenset(grouped[subset]) for subset in index_set}
    if not index_set:
        LOGGER.warning('No user requests any tile; the partition is empty')
    else:
        LOGGER.debug('Partition of %s tiles into %s groups' % (
            len(members), len(index_set)))
    return TilePartition(
        groups=groups,
        index_set=index_set,
        k_users=len(user_tiles),
        user_tiles=user_tiles)


def _check_qualities(qualities, k_users, ladder):
    if len(qualities) != k_users:
        raise QualityLevelException(
            'Expected %s quality indices, got %s' % (k_users, len(qualities)))
    for quality in qualities:
        ladder.check_level(quality)


def build_messages(part, qualities, ladder):
    """Aggregate each partition group into one message per requested level.

    :param part: The tile partition.
    :type part: TilePartition

    :param qualities: Quality index r_k of each user, user k at k - 1.
    :type qualities: list

    :param ladder: Encoding rates per level.
    :type ladder: QualityLadder

    :returns: Messages ordered by subset (canonical order) then level.
    :rtype: list

    :raises: QualityLevelException if a quality index is outside the ladder.
    """
    _check_qualities(qualities, part.k_users, ladder)
    messages = []
    for subset in part.index_set:
        tile_count = len(part.groups[subset])
        for level in sorted({qualities[user - 1] for user in subset}):
            audience = tuple(
                user for user in subset if qualities[user - 1] == level)
            messages.append(Message(
                subset=subset,
                level=level,
                audience=audience,
                tile_count=tile_count,
                demand_bits_per_s=tile_count * ladder.rate(level)))
    return messages


def unicast_messages(tile_sets, qualities, ladder):
    """Give every user its own message carrying its whole tile set.

    :param tile_sets: Tile set G_k of each user.
    :type tile_sets: list

    :param qualities: Quality index r_k of each user.
    :type qualities: list

    :param ladder: Encoding rates per level.
    :type ladder: QualityLadder

    :returns: One message per user with a nonempty tile set.
    :rtype: list
    """
    _check_qualities(qualities, len(tile_sets), ladder)
    messages = []
    for user, tiles in enumerate(tile_sets, start=1):
        if not tiles:
            continue
        level = qualities[user - 1]
        messages.append(Message(
            subset=(user,),
            level=level,
            audience=(user,),
            tile_count=len(tiles),
            demand_bits_per_s=len(tiles) * ladder.rate(level)))
    return messages


def total_demand(messages):
    """Sum of the message demands in bits/s."""
    return sum(message.demand_bits_per_s for message in messages)
