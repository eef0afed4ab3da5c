"""Exact generating series of DT invariants on the local projective plane."""

from .engine import (DTEngine, DTRecord, GroupedWall, WallData, blowup_factor,
                     dt_series, s_series, s_series_bruteforce, u_series,
                     u_series_bruteforce)
from .geometry import LexSlope, NSVec, SheafClass, intersect, k_dot, ns_box, slope_fplus, slope_h0
from .joyce import Digraph, Tree, s_coeff, trees, u_coeff
from .qseries import QSeries, eta_pow
from .theta import (XiData, classical_theta, indefinite_theta,
                    indefinite_theta_bruteforce, restrict_xi, validate_xi)

__version__ = "1.0.0"

__all__ = [
    "DTEngine", "DTRecord", "GroupedWall", "WallData", "blowup_factor", "dt_series",
    "s_series", "s_series_bruteforce", "u_series", "u_series_bruteforce",
    "LexSlope", "NSVec", "SheafClass", "intersect", "k_dot", "ns_box", "slope_fplus", "slope_h0",
    "Digraph", "Tree", "s_coeff", "trees", "u_coeff",
    "QSeries", "eta_pow",
    "XiData", "classical_theta", "indefinite_theta", "indefinite_theta_bruteforce",
    "restrict_xi", "validate_xi",
]
