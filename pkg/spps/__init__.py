"""
SPPS: spectral parameter power series solvers for Sturm-Liouville type problems
"""

__version__ = "1.0.0"
__author__ = "SPPS Team"

from spps.core.formal_powers import build_family
from spps.core.grid import make_grid, sample
from spps.core.spps_core import SLCoefficients, build_solution_pair

__all__ = ["SLCoefficients", "build_family", "build_solution_pair", "make_grid", "sample"]
