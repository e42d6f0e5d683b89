"""Airy-type uniform asymptotic expansions with explicit error bounds.

The Bessel instance J_ν(νz) is built in; see :mod:`tpbounds.besselmap`.
"""

from .besselmap import BesselModel, liouville_point
from .lgbounds import matching_constant_c, script_AB, script_AB_pair
from .mpnum import DomainError, PrecisionContext, PrecisionError, QuadratureError
from .tploop import build_loop_data, cauchy_AB, l0_kernel

__all__ = [
    "BesselModel",
    "DomainError",
    "PrecisionContext",
    "PrecisionError",
    "QuadratureError",
    "build_loop_data",
    "cauchy_AB",
    "l0_kernel",
    "liouville_point",
    "matching_constant_c",
    "script_AB",
    "script_AB_pair",
]

__version__ = "0.1.0"
