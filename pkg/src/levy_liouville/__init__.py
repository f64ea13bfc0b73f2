"""Numerical toolkit for Levy generators and their harmonic functions."""

__version__ = "0.1.0"

from .errors import (
    AliasWarning,
    GrowthError,
    LevyLiouvilleError,
    NonLiouvilleWarning,
    QuadratureDivergence,
    ResolutionError,
    UnsupportedFamily,
    WindowError,
)
from .grids import Grid, GridFunction
from .symbols import (
    LevyMeasureSpec,
    LevyTriplet,
    MomentReport,
    SubordinatorSpec,
    SymbolSpec,
    brownian,
    compound_poisson,
    custom,
    eval_symbol,
    hartman_wintner_diagnostic,
    isotropic_stable,
    levy_measure_moment,
    levy_triplet,
    relativistic,
    stable_levy_measure,
    subordinated_bm,
    symbol_zero_set,
    tempered_stable,
)

__all__ = [name for name in dir() if not name.startswith("_")]
