"""Exact solver for minimal tropical series through points of the unit square,
with an abelian sandpile cross-check and seeded experiment harness."""

from .core import (Q, RPoint, TropicalSeries, boundary_zero_check, build_arrangement,
                   canonical_coefficient, canonicalize, degree, evaluate, is_on_curve,
                   min_monomials)
from .curve import curve_graph, genus, is_generic_tree
from .gp import brute_force_gp, competitor_bound, shrink_step, solve_gp

__version__ = "0.1.0"

__all__ = [
    "Q", "RPoint", "TropicalSeries", "boundary_zero_check", "brute_force_gp", "build_arrangement",
    "canonical_coefficient", "canonicalize", "competitor_bound", "curve_graph", "degree",
    "evaluate", "genus", "is_generic_tree", "is_on_curve", "min_monomials", "shrink_step",
    "solve_gp",
]
