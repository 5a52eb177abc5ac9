# coding=utf-8
"""tilecast exceptions.
:copyright: (c) 2026 by the tilecast developers
:license: GPLv3, see LICENSE for more details.
"""


class TilecastException(Exception):
    pass


class TileBoundsException(TilecastException):
    pass


class QualityLevelException(TilecastException):
    pass


class DimensionMismatchException(TilecastException):
    pass


class DegenerateChannelException(TilecastException):
    pass


class InfeasibleDirectionException(TilecastException):
    pass


class InfeasibleAllocationException(TilecastException):
    pass


class NoAssignmentException(TilecastException):
    pass


class InstanceTooLargeException(TilecastException):
    pass


class WrongDirectionCountException(TilecastException):
    pass


class ConfigException(TilecastException):
    pass


class NonConvergenceException(TilecastException):
    """Raised in strict mode; result holds the best feasible solution."""

    def __init__(self, message, result=None):
        super(NonConvergenceException, self).__init__(message)
        self.result = result


class ConstraintViolationException(TilecastException):
    """Raised by the constraint audit; violations lists what failed."""

    def __init__(self, message, violations=None):
        super(ConstraintViolationException, self).__init__(message)
        self.violations = violations or []
