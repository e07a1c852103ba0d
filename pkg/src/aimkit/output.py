"""Serialization of command results: CSV, JSON and SVG.

Every writer is deterministic for fixed input. Floats are rendered as
truncated (not rounded) decimal strings computed from the exact binary value,
JSON keys are sorted and line endings are LF.
"""

import io
import json
import logging
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import mpmath  # noqa: E402
import pandas as pd  # noqa: E402

from aimkit.chain import ChainLink  # noqa: E402
from aimkit.eigen.solver import EigenResult  # noqa: E402
from aimkit.engine.diagnostics import DiagnosticSeries  # noqa: E402
from aimkit.numcore import scalar as sc  # noqa: E402
from aimkit.state import (  # noqa: E402
    Artifacts,
    ChainLinkRecord,
    ComplexRecord,
    DiagnosticRow,
    EigenRecord,
    FactorRecord,
)

logger = logging.getLogger(__name__)

matplotlib.rcParams["svg.hashsalt"] = "aimkit"

DIAGNOSTIC_COLUMNS = ["n", "Re(alpha)", "Im(alpha)", "Re(Delta)", "Im(Delta)", "metric"]
ROUNDING = "truncate"


def _as_fraction(value: Any) -> Fraction:
    if sc.is_exact(value):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    sign, man, exp, _ = value._mpf_
    q = Fraction(int(man)) * Fraction(2) ** int(exp)
    return -q if sign else q


def truncated(value: Any, digits: int) -> str:
    """``digits`` significant decimal digits of a real scalar, truncated toward zero."""
    if digits < 1:
        raise ValueError(f"digits must be positive, got {digits}")
    if not sc.is_exact(value) and not isinstance(value, float):
        if mpmath.isinf(value) or mpmath.isnan(value):
            return str(value)
    q = _as_fraction(value)
    if q == 0:
        return "0"
    sign = "-" if q < 0 else ""
    a = abs(q)
    e = int(mpmath.floor(mpmath.log10(mpmath.mpf(a.numerator) / a.denominator)))
    while Fraction(10) ** e > a:
        e -= 1
    while Fraction(10) ** (e + 1) <= a:
        e += 1
    text = str(math.floor(a * Fraction(10) ** (digits - 1 - e)))
    if e >= digits - 1:
        body = text + "0" * (e - digits + 1)
    elif e >= 0:
        body = f"{text[: e + 1]}.{text[e + 1:]}"
    else:
        body = "0." + "0" * (-e - 1) + text
    if "." in body:
        body = body.rstrip("0").rstrip(".")
    return sign + body


def decimal_parts(value: Any, digits: int) -> ComplexRecord:
    if value is None:
        return {"re": "", "im": ""}
    if sc.is_complex(value):
        return {"re": truncated(value.real, digits), "im": truncated(value.imag, digits)}
    return {"re": truncated(value, digits), "im": "0"}


def scalar_string(value: Any, digits: int) -> str:
    """Exact values as p/q, floats truncated, complex values as re + (im)*i."""
    if sc.is_exact(value):
        return sc.format_scalar(value)
    if sc.is_complex(value):
        return f"{truncated(value.real, digits)} + ({truncated(value.imag, digits)})*i"
    return truncated(value, digits)


def _coeff_strings(values: Iterable[Any], digits: int) -> List[str]:
    return [scalar_string(v, digits) for v in values]


# -- diagnostics ---------------------------------------------------------------


def diagnostic_rows(series: DiagnosticSeries, digits: int) -> List[DiagnosticRow]:
    rows: List[DiagnosticRow] = []
    for e in series.entries:
        alpha = decimal_parts(e.alpha, digits)
        delta = decimal_parts(e.perturbation, digits)
        rows.append(
            {
                "n": e.n,
                "alpha_re": alpha["re"],
                "alpha_im": alpha["im"],
                "delta_re": delta["re"],
                "delta_im": delta["im"],
                "metric": "" if e.metric is None else truncated(e.metric, digits),
            }
        )
    return rows


def diagnostics_csv(series: DiagnosticSeries, digits: int) -> str:
    frame = pd.DataFrame(diagnostic_rows(series, digits), columns=list(DiagnosticRow.__annotations__))
    frame.columns = DIAGNOSTIC_COLUMNS
    return frame.to_csv(index=False, lineterminator="\n")


def _re_im(value: Any) -> tuple:
    if sc.is_exact(value):
        return float(value), 0.0
    return float(mpmath.re(value)), float(mpmath.im(value))


def _to_svg(fig) -> str:
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def diagnostics_svgs(series: DiagnosticSeries, title: str = "") -> Artifacts:
    """alpha.svg (real and imaginary parts against n) and metric.svg (log10 of the metric)."""
    sampled = [(e.n, _re_im(e.alpha)) for e in series.entries if e.alpha is not None]
    ns = [n for n, _ in sampled]
    re = [v[0] for _, v in sampled]
    im = [v[1] for _, v in sampled]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter(ns, re, s=8, label="Re(alpha_n)")
    if any(v != 0 for v in im):
        ax.scatter(ns, im, s=8, marker="x", label="Im(alpha_n)")
    ax.set_xlabel("n")
    ax.set_ylabel("alpha_n(x0)")
    ax.set_title(title)
    ax.legend()
    out = {"alpha.svg": _to_svg(fig)}

    points = [(e.n, e.metric) for e in series.entries if e.metric is not None and e.metric != 0]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.scatter([n for n, _ in points], [math.log10(_re_im(m)[0]) for _, m in points], s=8)
    ax.set_xlabel("n")
    ax.set_ylabel("log10 |Delta_{n+2} - Delta_{n+1}|")
    ax.set_title(title)
    out["metric.svg"] = _to_svg(fig)
    return out


# -- chains and spectra --------------------------------------------------------


def chain_record(link: ChainLink, residual: Any, digits: int) -> ChainLinkRecord:
    form = link.solution
    factors: List[FactorRecord] = [
        {"root": decimal_parts(root, digits), "exponent": decimal_parts(a, digits)} for root, a in form.factors
    ]
    record: ChainLinkRecord = {
        "level": link.level,
        "deltaNumeratorCoeffs": _coeff_strings(link.perturb.num.scalar_coeffs(), digits),
        "deltaDenominatorCoeffs": _coeff_strings(link.perturb.den.scalar_coeffs(), digits),
        "expPolyCoeffs": _coeff_strings(form.exp_poly.scalar_coeffs(), digits),
        "factors": factors,
        "residual": scalar_string(residual, digits),
        "terminated": link.perturb.is_zero(),
    }
    if form.exp_rational is not None:
        record["expRationalNumeratorCoeffs"] = _coeff_strings(form.exp_rational.num.scalar_coeffs(), digits)
        record["expRationalDenominatorCoeffs"] = _coeff_strings(form.exp_rational.den.scalar_coeffs(), digits)
    return record


def eigen_record(result: EigenResult, digits: int, timing: bool = False) -> EigenRecord:
    return {
        "k": result.level,
        "E": truncated(result.E, digits),
        "iterations": result.iterations,
        "stableDigits": result.stable_digits,
        "residual": truncated(result.residual, 6),
        "seconds": round(result.seconds, 3) if timing else None,
        "stabilized": result.stabilized,
        "metric": None if result.metric is None else truncated(result.metric, 6),
    }


def escalation_csv(results: Sequence[EigenResult], digits: int) -> str:
    rows = [{"k": r.level, "n": n, "E": truncated(E, digits)} for r in results for n, E in r.trace]
    return pd.DataFrame(rows, columns=["k", "n", "E"]).to_csv(index=False, lineterminator="\n")


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_artifacts(out_dir: Path, artifacts: Artifacts) -> List[Path]:
    """Write every artifact as UTF-8 with LF line endings."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in sorted(artifacts):
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(artifacts[name])
        logger.info("wrote %s", path)
        written.append(path)
    return written


def notes_text(lines: Sequence[Optional[str]]) -> str:
    return "\n\n".join(line for line in lines if line) + "\n"
