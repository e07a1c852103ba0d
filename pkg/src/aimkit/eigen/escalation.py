"""Iteration escalation for one eigenlevel, run as a LangGraph state graph.

    scan -> refine -> check -> refine -> check -> ... -> END

``refine`` finds the root at the current depth (doubling the precision when
cancellation eats the bits), ``check`` compares it with the previous estimate
and either stops or deepens the ladder by the escalation step.
"""

import logging
import operator
import time
from typing import Annotated, Any, List, Literal, Optional, Tuple

from langgraph.graph import END, START, StateGraph
from typing_extensions import NotRequired, TypedDict

from aimkit.eigen.solver import (
    EigenProblem,
    EigenResult,
    delta_at,
    find_root,
    metric_at,
    scan_brackets,
    stable_digits,
)
from aimkit.errors import BracketNotFoundError, PrecisionExhausted, StabilizationError
from aimkit.instrument import benchmark
from aimkit.numcore import scalar as sc
from aimkit.settings import Settings, get_settings

logger = logging.getLogger(__name__)

Status = Literal["running", "converged", "failed"]


class EscalationState(TypedDict):
    """Graph state for one level; ``trace`` accumulates (n, E) pairs."""

    problem: EigenProblem
    level: int
    target_digits: int
    n: int
    bracket: NotRequired[Tuple[Any, Any]]
    scan_bracket: NotRequired[Tuple[Any, Any]]
    estimate: NotRequired[Any]
    previous: NotRequired[Optional[Any]]
    metric: NotRequired[Any]
    previous_metric: NotRequired[Optional[Any]]
    metric_floor: NotRequired[Any]
    agreements: int
    stable_digits: int
    status: Status
    message: NotRequired[str]
    trace: Annotated[List[Tuple[int, Any]], operator.add]


def _widened(problem: EigenProblem, n: int, center: Any, width: Any, fallback: Tuple[Any, Any]) -> Tuple[Any, Any]:
    """Smallest bracket (center - w, center + w), w = width * 4^j, with a sign change.

    Falls back to ``fallback`` once the window outgrows it.
    """
    lo_limit, hi_limit = fallback
    w = width
    while w < hi_limit - lo_limit:
        lo, hi = center - w, center + w
        f_lo, f_hi = delta_at(problem, lo, n), delta_at(problem, hi, n)
        if f_lo == 0 or f_hi == 0 or (f_lo > 0) != (f_hi > 0):
            return lo, hi
        w *= 4
    return fallback


def _metric_settled(state: EscalationState) -> bool:
    """The convergence metric at the estimate did not grow since the last round.

    A metric already below the requested accuracy (or the rounding noise) counts
    as settled.
    """
    previous = state.get("previous_metric")
    if previous is None:
        return True
    return state["metric"] <= previous or state["metric"] <= state["metric_floor"]


def _make_nodes(settings: Settings):
    def scan(state: EscalationState) -> dict:
        problem = state["problem"]
        if "scan_bracket" in state:
            bracket = state["scan_bracket"]
        else:
            brackets = scan_brackets(problem, settings.scan_iterations)
            k = state["level"]
            if len(brackets) <= k:
                raise BracketNotFoundError(
                    f"level {k} not isolated: only {len(brackets)} sign changes in the scan window"
                )
            bracket = brackets[k]
        window = bracket
        if bracket[0] == bracket[1]:
            pad = sc.convert(settings.scan_step, problem.prec)
            window = (bracket[0] - pad, bracket[1] + pad)
        return {"scan_bracket": window, "bracket": bracket, "n": settings.start_iterations}

    def refine(state: EscalationState) -> dict:
        problem = state["problem"]
        n = state["n"]
        while True:
            try:
                bracket = state["bracket"]
                if "estimate" in state and state.get("previous") is not None:
                    step = abs(state["estimate"] - state["previous"])
                    floor = sc.convert(10, problem.prec) ** (-state["target_digits"]) * max(abs(state["estimate"]), 1)
                    bracket = _widened(problem, n, state["estimate"], max(4 * step, floor), state["scan_bracket"])
                elif "estimate" in state:
                    half = (state["scan_bracket"][1] - state["scan_bracket"][0]) / 4
                    bracket = _widened(problem, n, state["estimate"], half, state["scan_bracket"])
                estimate = find_root(problem, n, bracket)
                metric, noise, size = metric_at(problem, estimate, n)
                break
            except PrecisionExhausted as exc:
                if problem.prec * 2 > settings.max_prec:
                    raise
                logger.warning("%s; doubling to %d bits", exc, problem.prec * 2)
                problem = problem.with_prec(problem.prec * 2)
        floor = max(noise, max(size, 1) * sc.convert(10, problem.prec) ** (-state["target_digits"]))
        logger.debug("level %d at n=%d: E = %s", state["level"], n, sc.format_scalar(estimate, 30))
        return {
            "problem": problem,
            "previous": state.get("estimate"),
            "estimate": estimate,
            "previous_metric": state.get("metric"),
            "metric": metric,
            "metric_floor": floor,
            "trace": [(n, estimate)],
        }

    def check(state: EscalationState) -> dict:
        previous = state.get("previous")
        if previous is None:
            return {"n": state["n"] + settings.escalation_step, "agreements": 0, "stable_digits": 0}
        digits = stable_digits(state["estimate"], previous, state["problem"].prec)
        agreements = state["agreements"] + 1 if digits >= state["target_digits"] else 0
        if agreements >= settings.required_agreements and _metric_settled(state):
            return {"agreements": agreements, "stable_digits": digits, "status": "converged"}
        if agreements >= settings.required_agreements:
            logger.debug("level %d: estimates agree but the metric grew at n=%d", state["level"], state["n"])
        if state["n"] + settings.escalation_step > settings.max_iterations:
            return {
                "agreements": agreements,
                "stable_digits": digits,
                "status": "failed",
                "message": (
                    f"level {state['level']} still moving after {state['n']} iterations "
                    f"({digits} stable digits, metric {sc.format_scalar(state['metric'], 6)})"
                ),
            }
        return {"n": state["n"] + settings.escalation_step, "agreements": agreements, "stable_digits": digits}

    return scan, refine, check


def _route(state: EscalationState) -> str:
    return "refine" if state["status"] == "running" else END


def build_escalation_graph(settings: Optional[Settings] = None):
    """Compiled scan/refine/check graph."""
    settings = settings or get_settings()
    scan, refine, check = _make_nodes(settings)
    graph = StateGraph(EscalationState)
    graph.add_node("scan", scan)
    graph.add_node("refine", refine)
    graph.add_node("check", check)
    graph.add_edge(START, "scan")
    graph.add_edge("scan", "refine")
    graph.add_edge("refine", "check")
    graph.add_conditional_edges("check", _route, {"refine": "refine", END: END})
    return graph.compile()


def _recursion_limit(settings: Settings) -> int:
    rounds = (settings.max_iterations - settings.start_iterations) // settings.escalation_step + 2
    return 2 * rounds + 10


@benchmark
def solve_level(
    problem: EigenProblem,
    k: int,
    target_digits: int,
    bracket: Optional[Tuple[Any, Any]] = None,
) -> EigenResult:
    """Escalate the ladder depth until two successive roots agree to ``target_digits``.

    Raises:
        BracketNotFoundError: If the level is not isolated in the scan window.
        StabilizationError: If the estimates keep moving up to the iteration cap.
        PrecisionExhausted: If cancellation persists at the maximum precision.
    """
    settings = get_settings()
    if k < 0:
        raise ValueError(f"level must be nonnegative, got {k}")
    if target_digits > problem.prec * 0.3:
        raise ValueError(f"{target_digits} digits need more than {problem.prec} bits")
    started = time.perf_counter()
    initial: EscalationState = {
        "problem": problem,
        "level": k,
        "target_digits": target_digits,
        "n": settings.start_iterations,
        "agreements": 0,
        "stable_digits": 0,
        "status": "running",
        "trace": [],
    }
    if bracket is not None:
        initial["scan_bracket"] = bracket
    final = build_escalation_graph(settings).invoke(initial, {"recursion_limit": _recursion_limit(settings)})
    seconds = time.perf_counter() - started
    trace = tuple(final["trace"])
    if final["status"] != "converged":
        raise StabilizationError(final.get("message", f"level {k} did not stabilize"), list(trace))
    solved = final["problem"]
    n = final["n"]
    residual = abs(delta_at(solved, final["estimate"], n))
    logger.info("level %d: E = %s after %d iterations", k, sc.format_scalar(final["estimate"], target_digits + 2), n)
    return EigenResult(
        level=k,
        E=final["estimate"],
        iterations=n,
        stable_digits=final["stable_digits"],
        residual=residual,
        seconds=seconds,
        prec=solved.prec,
        stabilized=True,
        trace=trace,
        metric=final["metric"],
    )


@benchmark
def solve_spectrum(problem: EigenProblem, k_max: int, target_digits: int) -> List[EigenResult]:
    """Levels 0..k_max from a single scan of the window.

    A level that does not stabilize is kept with ``stabilized=False`` and its
    last estimate.

    Raises:
        BracketNotFoundError: If the scan isolates fewer than k_max + 1 levels.
        StabilizationError: If the accepted energies are not strictly increasing.
    """
    settings = get_settings()
    brackets = scan_brackets(problem, settings.scan_iterations)
    if len(brackets) <= k_max:
        raise BracketNotFoundError(f"scan isolated {len(brackets)} levels, {k_max + 1} requested")
    results: List[EigenResult] = []
    for k in range(k_max + 1):
        try:
            results.append(solve_level(problem, k, target_digits, brackets[k]))
        except StabilizationError as exc:
            logger.error("%s", exc)
            n, E = exc.trace[-1] if exc.trace else (0, brackets[k][0])
            residual = abs(delta_at(problem, E, max(n, 1)))
            results.append(
                EigenResult(k, E, n, 0, residual, prec=problem.prec, stabilized=False, trace=tuple(exc.trace))
            )
    energies = [r.E for r in results]
    if any(b <= a for a, b in zip(energies, energies[1:])):
        scan_trace = [(settings.scan_iterations, lo) for lo, _ in brackets]
        raise StabilizationError("energies are not strictly increasing; a level was missed", scan_trace)
    return results
