"""Eigenvalues of polynomial-potential Schrodinger problems."""

from aimkit.eigen.escalation import build_escalation_graph, solve_level, solve_spectrum
from aimkit.eigen.solver import (
    EigenProblem,
    EigenResult,
    delta_at,
    find_root,
    first_approximation,
    metric_at,
    reduce_potential,
    reduce_schrodinger,
    scan_brackets,
)

__all__ = [
    "EigenProblem",
    "EigenResult",
    "build_escalation_graph",
    "delta_at",
    "find_root",
    "first_approximation",
    "metric_at",
    "reduce_potential",
    "reduce_schrodinger",
    "scan_brackets",
    "solve_level",
    "solve_spectrum",
]
