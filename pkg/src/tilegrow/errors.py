"""Exception hierarchy shared by all tilegrow modules."""


class TilingError(Exception):
    """Base class for every error raised by tilegrow."""


# geometry
class DegenerateHull(TilingError):
    pass


class Unbounded(TilingError):
    pass


class Empty(TilingError):
    pass


class LowerDimensional(TilingError):
    pass


class EmptySet(TilingError):
    pass


# tilings and shells
class OverlappingTiles(TilingError):
    pass


class EmptySeed(TilingError):
    pass


class GuardBandExceeded(TilingError):
    """A BFS shell would reach the incomplete margin of a finite patch.

    ``max_safe_n`` is the largest shell index that can still be computed
    exactly from the same seed.
    """

    def __init__(self, message, max_safe_n=None):
        super().__init__(message)
        self.max_safe_n = max_safe_n


class IndexOutOfRange(TilingError, IndexError):
    pass


# periodic
class InvalidSpec(TilingError, ValueError):
    pass


class NoEquivalentsFound(TilingError):
    pass


# grids
class OnGridHyperplane(TilingError):
    pass


class IrregularGrid(TilingError):
    pass


class ParallelGridVectors(TilingError):
    pass


class DegenerateTriple(TilingError):
    pass


class NumericallySingular(TilingError):
    pass


# substitution / analysis
class InvalidRules(TilingError):
    pass


class InsufficientSamples(TilingError):
    pass


class InvalidB(TilingError, ValueError):
    pass


class MethodMismatch(TilingError):
    pass
