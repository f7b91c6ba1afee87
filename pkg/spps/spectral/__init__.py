"""Spectral problems solved on top of the SPPS core."""

from spps.spectral.hill import PeriodicProblem, solve_hill
from spps.spectral.schrodinger_line import WellPotential, solve_well
from spps.spectral.sl_spectral import SLProblem, solve
from spps.spectral.transmission import (
    LayerProfile,
    PlaneWaveQuery,
    reflectance_transmittance,
    sweep,
)
from spps.spectral.zakharov_shabat import ZSPotential, solve_zs

__all__ = [
    "SLProblem",
    "solve",
    "PeriodicProblem",
    "solve_hill",
    "WellPotential",
    "solve_well",
    "LayerProfile",
    "PlaneWaveQuery",
    "reflectance_transmittance",
    "sweep",
    "ZSPotential",
    "solve_zs",
]
