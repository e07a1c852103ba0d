"""Arbitrary-precision scalars, polynomials in (x, E), rational functions, roots and parsing."""

from aimkit.numcore.parser import parse_expr
from aimkit.numcore.poly import EPoly, Poly
from aimkit.numcore.ratfun import ParamRatFun, differentiate, ratfun_combine
from aimkit.numcore.roots import Pole, PoleDecomposition, partial_fractions, poly_roots
from aimkit.numcore.special import hermite

__all__ = [
    "EPoly",
    "ParamRatFun",
    "Pole",
    "PoleDecomposition",
    "Poly",
    "differentiate",
    "hermite",
    "parse_expr",
    "partial_fractions",
    "poly_roots",
    "ratfun_combine",
]
