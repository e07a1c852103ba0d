from typing import Dict, List, Optional

from typing_extensions import NotRequired, TypedDict


class ComplexRecord(TypedDict):
    """A scalar split into decimal strings."""

    re: str
    im: str


class FactorRecord(TypedDict):
    root: ComplexRecord
    exponent: ComplexRecord


class ChainLinkRecord(TypedDict):
    """One chain link as written to chain.json."""

    level: int
    deltaNumeratorCoeffs: List[str]
    deltaDenominatorCoeffs: List[str]
    expPolyCoeffs: List[str]
    factors: List[FactorRecord]
    expRationalNumeratorCoeffs: NotRequired[List[str]]
    expRationalDenominatorCoeffs: NotRequired[List[str]]
    residual: str
    terminated: bool


class EigenRecord(TypedDict):
    """One level as written to spectrum.json."""

    k: int
    E: str
    iterations: int
    stableDigits: int
    residual: str
    seconds: Optional[float]
    stabilized: bool
    metric: Optional[str]


class DiagnosticRow(TypedDict):
    n: int
    alpha_re: str
    alpha_im: str
    delta_re: str
    delta_im: str
    metric: str


Artifacts = Dict[str, str]


def artifact_reducer(left: Optional[Artifacts], right: Optional[Artifacts]) -> Artifacts:
    """Merge file name -> content maps; a later write to the same name wins."""
    if left is None:
        return dict(right or {})
    if right is None:
        return dict(left)
    merged = dict(left)
    merged.update(right)
    return merged
