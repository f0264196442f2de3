"""Spatial pseudoanalytic function theory on uniform grids.

Biquaternion-valued fields, the Vekua operators of a factorized stationary
Schrodinger equation, Bers derivatives and antiderivatives, exact solutions from
symmetry, and the classical planar theory as a cross-check.
"""

from .biquaternion import Biquaternion
from .errors import PseudoanalyticError
from .grid_calculus import BiquaternionField, GridDomain, ScalarField, VectorField
from .settings import SETTINGS, Settings
from .vekua_ops import FactorizingFunction, make_factorizer

__version__ = "0.1.0"

__all__ = [
    "SETTINGS",
    "Biquaternion",
    "BiquaternionField",
    "FactorizingFunction",
    "GridDomain",
    "PseudoanalyticError",
    "ScalarField",
    "Settings",
    "VectorField",
    "make_factorizer",
]
