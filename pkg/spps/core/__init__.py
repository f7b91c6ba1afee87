"""Core SPPS modules: grids, formal powers, solution pairs and root finding."""

from spps.core.formal_powers import (
    FamilyKind,
    FormalPowerFamily,
    Parity,
    WeightPair,
    build_family,
    evaluate_series,
)
from spps.core.grid import Grid, SampledFunction, cumulative_integral, make_grid, sample
from spps.core.models import Root, RootConstraint, RootReport, SpectrumResult
from spps.core.rootfind import CharacteristicSeries, locate_roots, real_roots_in_interval
from spps.core.spps_core import (
    ParticularSolution,
    SLCoefficients,
    SppsSolutionPair,
    build_solution_pair,
    nonvanishing_u0,
)

__all__ = [
    "Grid",
    "SampledFunction",
    "make_grid",
    "sample",
    "cumulative_integral",
    "FamilyKind",
    "FormalPowerFamily",
    "Parity",
    "WeightPair",
    "build_family",
    "evaluate_series",
    "SLCoefficients",
    "ParticularSolution",
    "SppsSolutionPair",
    "nonvanishing_u0",
    "build_solution_pair",
    "CharacteristicSeries",
    "locate_roots",
    "real_roots_in_interval",
    "Root",
    "RootConstraint",
    "RootReport",
    "SpectrumResult",
]
