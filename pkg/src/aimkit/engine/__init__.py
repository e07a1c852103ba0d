"""The iteration ladder, its point diagnostics and the solutions it produces."""

from aimkit.engine.diagnostics import DiagnosticEntry, DiagnosticSeries, convergence_metric, run_ladder
from aimkit.engine.ladder import (
    AimProblem,
    AimState,
    aim_step,
    alpha,
    climb,
    delta,
    initial_state,
    matrix_step,
    perturbation,
)
from aimkit.engine.solutions import ClosedForm, SolutionPair, build_solutions, closed_form_from_alpha
from aimkit.engine.taylor import TaylorLadder

__all__ = [
    "AimProblem",
    "AimState",
    "ClosedForm",
    "DiagnosticEntry",
    "DiagnosticSeries",
    "SolutionPair",
    "TaylorLadder",
    "aim_step",
    "alpha",
    "build_solutions",
    "climb",
    "closed_form_from_alpha",
    "convergence_metric",
    "delta",
    "initial_state",
    "matrix_step",
    "perturbation",
    "run_ladder",
]
