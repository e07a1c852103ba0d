"""Verdict labels and the human-readable notes written next to command output."""

from typing import Any, Optional

from aimkit.const_coeff import CharClass, DistinctModuli, DoubleRoot, EqualModuliDistinct
from aimkit.numcore import scalar as sc

DISTINCT_MODULI = "DISTINCT_MODULI"
DOUBLE_ROOT = "DOUBLE_ROOT"
EQUAL_MODULI_FAILURE = "EQUAL_MODULI_FAILURE"
TERMINATED = "TERMINATED"
CONVERGING = "CONVERGING"
NOT_CONVERGED = "NOT_CONVERGED"

FAILURE_VERDICTS = frozenset({EQUAL_MODULI_FAILURE, NOT_CONVERGED})

VERDICT_NOTES = {
    DISTINCT_MODULI: """Characteristic roots have distinct moduli.
alpha_n converges to -r2, the root of smaller modulus, at the rate |r2/r1|^n,
and y = exp(r2 x) is recovered.""",
    DOUBLE_ROOT: """Characteristic root is double.
alpha_n converges to -r like 1/n, so n^2 Delta_n stays bounded; convergence is
slow but the limit is the exact solution.""",
    EQUAL_MODULI_FAILURE: """Characteristic roots are distinct with equal moduli.
alpha_n oscillates with the angle between the roots and has no limit, so the
iteration fails for this equation. Subsequences that look constant (for
instance every fourth rung when the half angle is pi/4) are not solutions.""",
    TERMINATED: """delta_n vanishes identically.
The ladder terminates and y = exp(-integral alpha_n) is an exact solution.""",
    CONVERGING: """The convergence metric |Delta_{n+2} - Delta_{n+1}| at x0 fell below the
tolerance; alpha_n approximates the log-derivative of a solution.""",
    NOT_CONVERGED: """The convergence metric at x0 did not fall below the tolerance within the
requested number of rungs.""",
}

COMPLEX_BASIS_NOTE = """For y'' - a i y' - b(b + a i) y = 0 the characteristic roots are b + a i and -b.
Direct substitution confirms the basis {exp((b + a i) x), exp(-b x)}; with
a = b = 2 that is {exp((2 + 2i) x), exp(-2x)}. The converged alpha_n equals
2 = -r2, which reproduces exp(-2x); a basis written with exp(2x) fails the
substitution check and is not used."""


def verdict_for_class(cls: CharClass) -> str:
    if isinstance(cls, DistinctModuli):
        return DISTINCT_MODULI
    if isinstance(cls, DoubleRoot):
        return DOUBLE_ROOT
    if isinstance(cls, EqualModuliDistinct):
        return EQUAL_MODULI_FAILURE
    raise TypeError(f"unknown classification {cls!r}")


def verdict_for_metric(metric: Optional[Any], terminated: bool, tol: Any) -> str:
    """Verdict for a non-constant ladder from its last convergence metric."""
    if terminated:
        return TERMINATED
    if metric is not None and metric < tol:
        return CONVERGING
    return NOT_CONVERGED


def describe_class(cls: CharClass, digits: int = 20) -> str:
    if isinstance(cls, DoubleRoot):
        return f"{cls.variant}: r = {sc.format_scalar(cls.r, digits)}"
    text = f"{cls.variant}: r1 = {sc.format_scalar(cls.r1, digits)}, r2 = {sc.format_scalar(cls.r2, digits)}"
    if isinstance(cls, EqualModuliDistinct):
        text += f", |r| = {sc.format_scalar(cls.r, digits)}, theta = {sc.format_scalar(cls.theta, digits)}"
    return text
