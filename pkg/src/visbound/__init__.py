"""Desk-scale computations around thick-thin decompositions, nerves and homology bounds."""

from .constants import ConstantsLedger, N_packing, build_ledger
from .geometry import BoundaryPoint, MoebiusIsometry, UhpPoint
from .homology import SimplicialComplex
from .warped import CuspModel, WarpFunction

__all__ = [
    "BoundaryPoint", "ConstantsLedger", "CuspModel", "MoebiusIsometry", "N_packing",
    "SimplicialComplex", "UhpPoint", "WarpFunction", "build_ledger",
]
__version__ = "0.1.0"
