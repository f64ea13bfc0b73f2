"""Exception and warning types shared across the package."""


class LevyLiouvilleError(Exception):
    """Base class for all package-specific errors."""


class QuadratureDivergence(LevyLiouvilleError):
    """A jump-measure integral failed its convergence estimate."""


class ResolutionError(LevyLiouvilleError):
    """The frequency lattice cannot resolve the requested transition density."""


class GrowthError(LevyLiouvilleError):
    """A growth order is incompatible with the available moment order."""


class WindowError(LevyLiouvilleError):
    """An operation needs lattice points outside the sampled window."""


class UnsupportedFamily(LevyLiouvilleError):
    """The requested operation is not available for this symbol family."""


class AliasWarning(UserWarning):
    """A grid function is not negligible near the window boundary."""


class NonLiouvilleWarning(UserWarning):
    """The symbol vanishes away from the origin; Liouville property may fail."""
