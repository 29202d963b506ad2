"""Exact rational tropical series on the unit square."""

from .arrangement import (CurveEdge, FaceArrangement, build_arrangement, canonical_coefficient,
                          canonicalize, face_areas, is_canonical, prune)
from .series import (Exponent, Monomial, Q, RPoint, Rational, TropicalSeries, boundary_zero_check,
                     degree, evaluate, format_rational, is_on_curve, min_monomials, parse_point,
                     parse_rational)

__all__ = [
    "CurveEdge", "Exponent", "FaceArrangement", "Monomial", "Q", "RPoint", "Rational",
    "TropicalSeries", "boundary_zero_check", "build_arrangement", "canonical_coefficient",
    "canonicalize", "degree", "evaluate", "face_areas", "format_rational", "is_canonical",
    "is_on_curve", "min_monomials", "parse_point", "parse_rational", "prune",
]
