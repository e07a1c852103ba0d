"""Eigenvalues of -psi'' + V psi = E psi through the ladder of the reduced equation.

With psi = exp(-x^2/2) f the equation becomes f'' = 2x f' + (1 - E + V - x^2) f.
E is substituted numerically before each ladder run; a root of Delta_n(x0, E)
in E approximates an eigenvalue, and it sharpens as n grows.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, List, Optional, Tuple

from aimkit.chain import ChainLink, chain_link
from aimkit.engine.ladder import AimProblem
from aimkit.engine.taylor import TaylorLadder
from aimkit.errors import BracketNotFoundError, PrecisionExhausted
from aimkit.numcore import scalar as sc
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.settings import get_settings

logger = logging.getLogger(__name__)

MIN_BITS = 8
BISECTION_STEPS = 10
MAX_SECANT_STEPS = 100


def _fmt(value: Any) -> str:
    return sc.format_scalar(value, 12)


@dataclass(frozen=True)
class EigenProblem:
    """The reduced equation f'' = lambda0 f' + s0 f with s0 linear in E."""

    A: Any
    x0: Any
    prec: int
    lambda0: ParamRatFun
    s0: ParamRatFun

    def __post_init__(self):
        if not self.x0 > 0:
            raise ValueError(f"x0 must be positive, got {self.x0}")
        if self.A is not None and self.A < 0:
            raise ValueError(f"A must be nonnegative, got {self.A}")

    def at(self, E: Any) -> AimProblem:
        """The ladder problem with E substituted at the working precision."""
        return AimProblem(self.lambda0, self.s0.substitute_E(sc.convert(E, self.prec)), self.prec)

    def with_prec(self, prec: int) -> "EigenProblem":
        return replace(self, prec=prec)


@dataclass(frozen=True)
class EigenResult:
    level: int
    E: Any
    iterations: int
    stable_digits: int
    residual: Any
    seconds: float = 0.0
    prec: int = 0
    stabilized: bool = True
    trace: Tuple[Tuple[int, Any], ...] = field(default=())
    metric: Optional[Any] = None


def reduce_potential(V: ParamRatFun, x0: Any = None, prec: Optional[int] = None, A: Any = None) -> EigenProblem:
    """lambda0 = 2x, s0 = 1 - E + V - x^2 for a polynomial potential V."""
    settings = get_settings()
    if V.has_E() or not V.is_polynomial():
        raise ValueError("the potential must be a polynomial in x")
    x = ParamRatFun.x()
    s0 = 1 - ParamRatFun.E() + V - x * x
    x0 = settings.x0 if x0 is None else x0
    return EigenProblem(
        A=A,
        x0=sc.convert(x0, None) if sc.is_exact(x0) else x0,
        prec=prec or settings.eigen_prec,
        lambda0=2 * x,
        s0=s0,
    )


def reduce_schrodinger(A: Any, x0: Any = None, prec: Optional[int] = None) -> EigenProblem:
    """The anharmonic oscillator V = x^2 + A x^4, giving s0 = 1 - E + A x^4."""
    if A < 0:
        raise ValueError(f"A must be nonnegative, got {A}")
    x = ParamRatFun.x()
    return reduce_potential(x * x + ParamRatFun.constant(A) * x ** 4, x0, prec, A)


def _ladder_at(problem: EigenProblem, E: Any, depth: int):
    aim = problem.at(E)
    taylor = TaylorLadder(aim.lambda0, aim.s0, problem.x0, depth, problem.prec)
    return taylor.values(), taylor.bounds()


def _rung_perturbation(values, bounds, n: int, prec: int) -> Tuple[Any, Any]:
    ctx = sc.context(prec)
    (lam_prev, s_prev), (lam, s) = values[n - 1], values[n]
    (blam_prev, bs_prev), (blam, bs) = bounds[n - 1], bounds[n]

    terms = max(abs(lam * s_prev), abs(lam_prev * s))
    bound = max(blam * bs_prev, blam_prev * bs)
    if terms == 0:
        if bound == 0:
            # every s_j(x0) vanishes: E is an exact root
            return sc.zero(prec), sc.zero(prec)
        raise PrecisionExhausted(sc.zero(prec), 0.0, prec)
    bits_left = prec - float(ctx.log(bound / terms, 2))
    if bits_left < MIN_BITS:
        raise PrecisionExhausted(lam * s_prev - lam_prev * s, bits_left, prec)

    scale = lam_prev * lam_prev if lam_prev != 0 else sc.one(prec)
    value = (lam * s_prev - lam_prev * s) / scale
    noise = ctx.ldexp(bound, -prec) * (n + 1) / scale
    return value, noise


def _perturbation(problem: EigenProblem, E: Any, n: int) -> Tuple[Any, Any]:
    """Delta_n(x0, E) and the rounding noise it carries."""
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    values, bounds = _ladder_at(problem, E, n)
    return _rung_perturbation(values, bounds, n, problem.prec)


def delta_at(problem: EigenProblem, E: Any, n: int) -> Any:
    """delta_n(x0, E) / lambda_{n-1}(x0, E)^2 at the problem's precision.

    Raises:
        PrecisionExhausted: If cancellation in the ladder leaves fewer than
            8 significant bits; retry at a higher precision.
    """
    return _perturbation(problem, E, n)[0]


def metric_at(problem: EigenProblem, E: Any, n: int) -> Tuple[Any, Any, Any]:
    """|Delta_{n+2} - Delta_{n+1}| at (x0, E), its rounding noise and the larger |Delta|.

    One ladder run of depth n + 2 supplies both rungs.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    values, bounds = _ladder_at(problem, E, n + 2)
    d1, noise1 = _rung_perturbation(values, bounds, n + 1, problem.prec)
    d2, noise2 = _rung_perturbation(values, bounds, n + 2, problem.prec)
    return abs(d2 - d1), noise1 + noise2, max(abs(d1), abs(d2))


def _sign(value: Any, noise: Any) -> int:
    if abs(value) <= noise:
        return 0
    return 1 if value > 0 else -1


def scan_brackets(
    problem: EigenProblem,
    n: Optional[int] = None,
    window: Optional[Tuple[Any, Any]] = None,
    step: Any = None,
) -> List[Tuple[Any, Any]]:
    """Sign changes of Delta_n(x0, .) on a uniform grid, in increasing E.

    A grid point where the value is lost in rounding noise is itself a root
    and comes back as the degenerate bracket (E, E).
    """
    settings = get_settings()
    n = n or settings.scan_iterations
    lo, hi = window or settings.scan_window
    step = step or settings.scan_step
    prec = problem.prec
    lo, hi, step = sc.convert(lo, prec), sc.convert(hi, prec), sc.convert(step, prec)
    count = int(math.floor(float((hi - lo) / step) + 0.5))

    brackets: List[Tuple[Any, Any]] = []
    last_sign, last_E = 0, None
    for i in range(count + 1):
        E = lo + i * step
        value, noise = _perturbation(problem, E, n)
        sign = _sign(value, noise)
        if sign == 0:
            brackets.append((E, E))
            last_sign, last_E = 0, E
            continue
        if last_sign != 0 and sign != last_sign:
            brackets.append((last_E, E))
        last_sign, last_E = sign, E
    logger.info("scan at n=%d found %d sign changes in [%s, %s]", n, len(brackets), _fmt(lo), _fmt(hi))
    return brackets


def find_root(problem: EigenProblem, n: int, bracket: Tuple[Any, Any]) -> Any:
    """Root of Delta_n(x0, .) inside ``bracket``.

    Ten bisection steps shrink the bracket, then secant steps on the latest two
    iterates take over; any secant step that leaves the bracket is replaced by
    a bisection. The iteration stops at the rounding-noise floor or once the
    step falls below the working precision.

    Raises:
        BracketNotFoundError: If the bracket ends have the same sign.
    """
    prec = problem.prec
    lo, hi = sc.convert(bracket[0], prec), sc.convert(bracket[1], prec)
    if lo == hi:
        return lo
    if lo > hi:
        lo, hi = hi, lo
    f_lo, noise = _perturbation(problem, lo, n)
    if _sign(f_lo, noise) == 0:
        return lo
    f_hi, noise = _perturbation(problem, hi, n)
    if _sign(f_hi, noise) == 0:
        return hi
    if (f_lo > 0) == (f_hi > 0):
        raise BracketNotFoundError(f"no sign change of Delta_{n} on [{_fmt(lo)}, {_fmt(hi)}]")

    ctx = sc.context(prec)
    tol = ctx.ldexp(ctx.mpf(1), -(prec - 16))

    for _ in range(BISECTION_STEPS):
        mid = (lo + hi) / 2
        f_mid, noise = _perturbation(problem, mid, n)
        if _sign(f_mid, noise) == 0:
            return mid
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid

    a, fa, b, fb = lo, f_lo, hi, f_hi
    for _ in range(MAX_SECANT_STEPS):
        if fb != fa:
            candidate = b - fb * (b - a) / (fb - fa)
        else:
            candidate = None
        if candidate is None or not lo < candidate < hi:
            logger.debug("secant step left the bracket; bisecting")
            candidate = (lo + hi) / 2
        f_c, noise = _perturbation(problem, candidate, n)
        if _sign(f_c, noise) == 0 or abs(candidate - b) <= tol * max(abs(candidate), 1):
            return candidate
        if (f_c > 0) == (f_lo > 0):
            lo, f_lo = candidate, f_c
        else:
            hi, f_hi = candidate, f_c
        a, fa, b, fb = b, fb, candidate, f_c
        if hi - lo <= tol * max(abs(lo), 1):
            return (lo + hi) / 2
    logger.warning("secant did not settle after %d steps at n=%d", MAX_SECANT_STEPS, n)
    return (lo + hi) / 2


def first_approximation(A: Any, E: Any, prec: Optional[int] = None) -> ChainLink:
    """Level-1 link of lambda0 = 2x, s0 = 1 - E + A x^4 at a numeric E.

    Its solution is x^((E-1)/2) exp(-A x^4 / 8).
    """
    prec = prec or get_settings().prec
    problem = reduce_schrodinger(A, prec=prec).at(E)
    return chain_link(problem, 1, prec)


def stable_digits(current: Any, previous: Any, prec: int) -> int:
    """Decimal digits on which two successive estimates agree."""
    cap = int(prec * math.log10(2))
    diff = abs(current - previous)
    if diff == 0:
        return cap
    scale = max(abs(current), 1)
    digits = int(math.floor(-float(sc.context(prec).log10(diff / scale))))
    return max(0, min(digits, cap))
