"""Sampling a ladder at a point: alpha_n(x0), Delta_n(x0) and the convergence metric."""

import logging
from dataclasses import dataclass
from typing import Any, List, Literal, Optional, Tuple

from aimkit.engine.ladder import AimProblem, ladder
from aimkit.engine.taylor import TaylorLadder
from aimkit.errors import MissingEntriesError, PoleCollisionError
from aimkit.instrument import benchmark
from aimkit.numcore import scalar as sc
from aimkit.settings import get_settings

logger = logging.getLogger(__name__)

Method = Literal["symbolic", "taylor"]


@dataclass(frozen=True)
class DiagnosticEntry:
    """Rung n sampled at x0; ``None`` marks a rung where lambda_{n-1}(x0) vanished."""

    n: int
    alpha: Optional[Any]
    perturbation: Optional[Any]
    metric: Optional[Any]


@dataclass(frozen=True)
class DiagnosticSeries:
    x0: Any
    entries: Tuple[DiagnosticEntry, ...]
    tail: Tuple[Optional[Any], ...] = ()
    terminated_at: Optional[int] = None
    shifts: int = 0
    method: Method = "symbolic"

    def entry(self, n: int) -> DiagnosticEntry:
        if not 1 <= n <= len(self.entries):
            raise MissingEntriesError(f"no diagnostic entry for n = {n} (series has {len(self.entries)})")
        return self.entries[n - 1]

    def perturbation_at(self, n: int) -> Optional[Any]:
        """Delta_n(x0), zero past termination, including the two rungs kept past the end."""
        if self.terminated_at is not None and n >= self.terminated_at:
            return sc.zero(None) if sc.is_exact(self.x0) else sc.zero(sc.prec_of(self.x0))
        if 1 <= n <= len(self.entries):
            return self.entries[n - 1].perturbation
        k = n - len(self.entries) - 1
        if 0 <= k < len(self.tail):
            return self.tail[k]
        raise MissingEntriesError(f"no perturbation sample for n = {n}")

    @property
    def alphas(self) -> List[Optional[Any]]:
        return [e.alpha for e in self.entries]

    @property
    def metrics(self) -> List[Optional[Any]]:
        return [e.metric for e in self.entries]


def convergence_metric(series: DiagnosticSeries, n: int) -> Any:
    """|Delta_{n+2}(x0) - Delta_{n+1}(x0)|.

    Raises:
        MissingEntriesError: If the series does not reach n + 2.
    """
    if n < 1:
        raise MissingEntriesError(f"the metric starts at n = 1, got {n}")
    a, b = series.perturbation_at(n + 2), series.perturbation_at(n + 1)
    if a is None or b is None:
        return None
    return sc.absval(a - b)


class _Collision(Exception):
    pass


def _vanishes(value: Any, prec: Optional[int]) -> bool:
    if sc.is_exact(value):
        return value == 0
    return sc.absval(value) < sc.tolerance(prec or sc.prec_of(value), 2)


def _entries(values: List[Tuple[Any, Any]], prec: Optional[int], singular_ok: bool):
    """alpha_n and Delta_n for n = 1..len(values)-1 from rung values at x0."""
    out = []
    for n in range(1, len(values)):
        lam_prev, s_prev = values[n - 1]
        lam, s = values[n]
        if _vanishes(lam_prev, prec):
            if not singular_ok:
                raise _Collision(n - 1)
            logger.debug("lambda_%d vanishes; rung %d has no alpha", n - 1, n)
            out.append((None, None))
            continue
        delta = lam * s_prev - lam_prev * s
        out.append((s_prev / lam_prev, delta / (lam_prev * lam_prev)))
    return out


@benchmark
def run_ladder(
    problem: AimProblem,
    n_max: int,
    x0: Any = None,
    method: Method = "symbolic",
    degree_bound: Optional[int] = None,
) -> DiagnosticSeries:
    """Climb ``n_max + 2`` rungs and sample alpha, Delta and the metric at x0.

    Args:
        problem: Coefficients of the equation (E must be absent).
        n_max: Number of diagnostic entries, at least 3.
        x0: Sampling point; defaults to the configured x0.
        method: ``"symbolic"`` evaluates the exact ladder, ``"taylor"`` uses
            truncated series about x0 at the problem's float precision.
        degree_bound: Abort once a rung's degree exceeds this.

    Returns:
        DiagnosticSeries with entries 1..n_max (fewer if delta vanished
        identically, which ends the ladder).

    Raises:
        PoleCollisionError: If x0 still hits a pole after the allowed shifts.
        DegreeBoundExceeded: If the symbolic ladder grows past the bound.
    """
    settings = get_settings()
    if n_max < 3:
        raise ValueError(f"n_max must be at least 3, got {n_max}")
    if problem.has_E():
        raise ValueError("substitute E before running a diagnostic ladder")
    if degree_bound is None:
        degree_bound = settings.degree_bound
    x0 = settings.x0 if x0 is None else x0
    prec = problem.prec
    if prec is not None or method == "taylor":
        prec = prec or settings.prec
        x0 = sc.convert(x0, prec)
    else:
        x0 = sc.convert(x0, None)
    x_free = problem.is_constant()

    states = []
    terminated_at = None
    if method == "symbolic":
        for state in ladder(problem, degree_bound):
            states.append(state)
            if state.n >= 1 and state.terminated:
                terminated_at = state.n
                logger.info("delta_%d vanishes identically; ladder terminates", state.n)
                break
            if state.n == n_max + 2:
                break

    for shift in range(settings.max_pole_shifts + 1):
        try:
            if method == "symbolic":
                values = [(st.lambda_n.evaluate(x0), st.s_n.evaluate(x0)) for st in states]
            else:
                values = TaylorLadder(problem.lambda0, problem.s0, x0, n_max + 2, prec).values()
            rows = _entries(values, prec, singular_ok=x_free)
            break
        except (_Collision, ZeroDivisionError) as exc:
            logger.warning("x0 = %s hits a pole (%s); shifting", sc.format_scalar(x0, 12), exc)
            x0 = x0 + sc.convert(settings.pole_shift, prec)
    else:
        raise PoleCollisionError(
            f"sampling point still on a pole after {settings.max_pole_shifts} shifts"
        )

    count = min(n_max, len(rows))
    perturbations = [r[1] for r in rows]
    series = DiagnosticSeries(
        x0=x0,
        entries=tuple(DiagnosticEntry(n, rows[n - 1][0], rows[n - 1][1], None) for n in range(1, count + 1)),
        tail=tuple(perturbations[count:]),
        terminated_at=terminated_at,
        shifts=shift,
        method=method,
    )
    entries = []
    for e in series.entries:
        try:
            metric = convergence_metric(series, e.n)
        except MissingEntriesError:
            metric = None
        entries.append(DiagnosticEntry(e.n, e.alpha, e.perturbation, metric))
    return DiagnosticSeries(x0, tuple(entries), series.tail, terminated_at, shift, method)
