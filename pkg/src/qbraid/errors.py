"""Exception types shared across the toolkit."""


class QBraidError(Exception):
    """Base class for all errors raised by qbraid."""


class RankError(QBraidError):
    pass


class DimensionError(QBraidError):
    pass


class LatticeMembershipError(QBraidError):
    """A point was expected to lie in a lattice but does not."""


class CrepancyError(QBraidError):
    pass


class SizeError(QBraidError):
    pass


class BoundaryPointError(QBraidError):
    pass


class FanError(QBraidError):
    pass


class NotInFanError(QBraidError):
    pass


class NotCompactError(QBraidError):
    pass


class SmoothnessError(QBraidError):
    pass


class EmptyIntersection(QBraidError):
    pass


class ConfigError(QBraidError):
    pass


class UnsupportedError(QBraidError):
    pass


class Inconclusive(QBraidError):
    """A bounded search ran out of budget without deciding."""


class SchemaError(QBraidError):
    """A fan document is malformed."""
