"""Reciprocals of theta series over GF(2): packed Laurent series, the theta
ring, Groebner certificates over GF(2) and a catalog of checked identities.

Set THETA2_BACKEND to numba (default), numpy or reference to pick the
multiplication kernels.
"""

from ._kernels import get_backend, set_backend
from .groebner import PolyF2m, certify_quotient, quintic_generators, quintic_relation
from .series import LaurentSeriesF2, PrecisionError
from .theta import (
    CongruenceClass,
    SPoly,
    b_set,
    basic_classes,
    density_count,
    exceptional_set,
    symbolic_project,
    theta_series,
    ustar_classes,
)

__version__ = "0.1.0"

__all__ = [
    "CongruenceClass",
    "LaurentSeriesF2",
    "PolyF2m",
    "PrecisionError",
    "SPoly",
    "b_set",
    "basic_classes",
    "certify_quotient",
    "density_count",
    "exceptional_set",
    "get_backend",
    "quintic_generators",
    "quintic_relation",
    "set_backend",
    "symbolic_project",
    "theta_series",
    "ustar_classes",
]
