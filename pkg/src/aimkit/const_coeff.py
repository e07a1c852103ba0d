"""Constant coefficients: characteristic roots, classification and closed-form oracles.

For y'' = lambda0 y' + s0 y with constant lambda0, s0 both sequences satisfy
v_{n+1} = lambda0 v_n + s0 v_{n-1}, so lambda_n and s_n are combinations of
r1^n and r2^n where r^2 - lambda0 r - s0 = 0.
"""

import functools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

from aimkit.engine.ladder import AimProblem
from aimkit.errors import OscillationSingularity
from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import Poly
from aimkit.numcore.special import hermite
from aimkit.settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DistinctModuli:
    r1: Any
    r2: Any
    variant: str = "DistinctModuli"


@dataclass(frozen=True)
class DoubleRoot:
    r: Any
    variant: str = "DoubleRoot"


@dataclass(frozen=True)
class EqualModuliDistinct:
    """Roots of equal modulus ``r``; ``theta`` in (0, pi] with r1/r2 = exp(2 i theta)."""

    r: Any
    theta: Any
    r1: Any
    r2: Any
    variant: str = "EqualModuliDistinct"


CharClass = Union[DistinctModuli, DoubleRoot, EqualModuliDistinct]


@dataclass(frozen=True)
class ConstClosedForm:
    """lambda_n = A r1^n + (lambda0 - A) r2^n, s_n = B r1^n + (s0 - B) r2^n."""

    A: Any
    B: Any
    r1: Any
    r2: Any


def _prec(prec: Optional[int]) -> int:
    return prec or get_settings().prec


def _exact(*values: Any) -> bool:
    return all(sc.is_exact(v) for v in values)


def _float_prec(prec: Optional[int], *values: Any) -> int:
    found = [sc.prec_of(v) for v in values if not sc.is_exact(v)]
    return min(found) if found else _prec(prec)


def char_roots(lambda0: Any, s0: Any, prec: Optional[int] = None) -> Tuple[Any, Any]:
    """Roots of r^2 - lambda0 r - s0, ordered so |r2| <= |r1|.

    Exact inputs keep exact roots when the discriminant is a rational square.
    """
    if _exact(lambda0, s0):
        lambda0, s0 = Fraction(lambda0), Fraction(s0)
        disc = s0 + lambda0 * lambda0 / 4
        root = sc.exact_sqrt(disc)
        if root is not None:
            r1, r2 = lambda0 / 2 + root, lambda0 / 2 - root
            return (r2, r1) if abs(r2) > abs(r1) else (r1, r2)
    p = _float_prec(prec, lambda0, s0)
    ctx = sc.context(p)
    lam, s = sc.convert(lambda0, p), sc.convert(s0, p)
    root = ctx.sqrt(s + lam * lam / 4)
    r1, r2 = sc.demote(lam / 2 + root), sc.demote(lam / 2 - root)
    if abs(r2) > abs(r1):
        r1, r2 = r2, r1
    return r1, r2


def _half_angle(r1: Any, r2: Any, prec: int) -> Any:
    ctx = sc.context(prec)
    theta = ctx.arg(ctx.mpc(sc.convert(r1, prec)) / sc.convert(r2, prec)) / 2
    if theta <= 0:
        theta += ctx.pi
    return theta


def classify(lambda0: Any, s0: Any, prec: Optional[int] = None) -> CharClass:
    """Classify by characteristic roots.

    Exact inputs compare exactly; float inputs treat moduli as equal when they
    differ by at most 2^(-prec/4) max(|r1|, |r2|).
    """
    p = _float_prec(prec, lambda0, s0)
    if _exact(lambda0, s0):
        lam, s = Fraction(lambda0), Fraction(s0)
        disc = s + lam * lam / 4
        if disc == 0:
            return DoubleRoot(lam / 2)
        r1, r2 = char_roots(lam, s, p)
        if disc < 0 or lam == 0:
            ctx = sc.context(p)
            return EqualModuliDistinct(sc.demote(abs(ctx.mpc(r1))), _half_angle(r1, r2, p), r1, r2)
        return DistinctModuli(r1, r2)
    r1, r2 = char_roots(lambda0, s0, p)
    ctx = sc.context(p)
    big = max(abs(r1), abs(r2))
    tol = sc.tolerance(p, 4) * (big if big != 0 else 1)
    if abs(r1 - r2) <= tol:
        return DoubleRoot(sc.demote(sc.convert(lambda0, p) / 2))
    if abs(abs(r1) - abs(r2)) <= tol:
        return EqualModuliDistinct(ctx.mpf(abs(r1)), _half_angle(r1, r2, p), r1, r2)
    return DistinctModuli(r1, r2)


def closed_form_constants(lambda0: Any, s0: Any, r1: Any, r2: Any) -> ConstClosedForm:
    """A = r1^2 / (r1 - r2), B = s0 r1 / (r1 - r2)."""
    if r1 == r2:
        raise ValueError("closed-form constants need distinct roots")
    d = r1 - r2
    return ConstClosedForm(r1 * r1 / d, s0 * r1 / d, r1, r2)


def _power(base: Any, n: int) -> Any:
    return base ** n


def closed_form_sequences(lambda0: Any, s0: Any, n: int, prec: Optional[int] = None) -> Tuple[Any, Any]:
    """(lambda_n, s_n) from the closed forms, exact when the roots are rational."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    cls = classify(lambda0, s0, prec)
    if isinstance(cls, DoubleRoot):
        r = cls.r
        return _power(r, n) * (n + 2), -_power(r, n + 2) * (n + 1)
    r1, r2 = (cls.r1, cls.r2)
    if not (sc.is_exact(r1) and sc.is_exact(r2)):
        p = _float_prec(prec, r1, r2)
        lambda0, s0 = sc.convert(lambda0, p), sc.convert(s0, p)
    else:
        lambda0, s0 = Fraction(lambda0), Fraction(s0)
    k = closed_form_constants(lambda0, s0, r1, r2)
    lam = k.A * _power(r1, n) + (lambda0 - k.A) * _power(r2, n)
    s = k.B * _power(r1, n) + (s0 - k.B) * _power(r2, n)
    return sc.demote(lam), sc.demote(s)


def matrix_power_sequences(lambda0: Any, s0: Any, n: int) -> Tuple[Any, Any]:
    """(lambda_n, s_n) = M^n (lambda0, s0) with the companion matrix M = [[lambda0, 1], [s0, 0]]."""
    if _exact(lambda0, s0):
        lambda0, s0 = Fraction(lambda0), Fraction(s0)
    one, zero = lambda0 ** 0, lambda0 * 0
    result = ((one, zero), (zero, one))
    base = ((lambda0, one), (s0, zero))

    def mul(a, b):
        return (
            (a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]),
        )

    k = n
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return (
        result[0][0] * lambda0 + result[0][1] * s0,
        result[1][0] * lambda0 + result[1][1] * s0,
    )


def perturbation_decay(lambda0: Any, s0: Any, n_range: range, prec: Optional[int] = None) -> List[Optional[Any]]:
    """Delta_n = delta_n / lambda_{n-1}^2 for n in ``n_range``; ``None`` where lambda_{n-1} = 0.

    Uses the companion-matrix powers, so exact inputs give exact values.
    """
    if len(n_range) == 0:
        raise ValueError("n_range must not be empty")
    if not _exact(lambda0, s0):
        p = _float_prec(prec, lambda0, s0)
        lambda0, s0 = sc.convert(lambda0, p), sc.convert(s0, p)
    out = []
    for n in n_range:
        if n < 1:
            raise ValueError(f"Delta_n starts at n = 1, got {n}")
        lam_prev, s_prev = matrix_power_sequences(lambda0, s0, n - 1)
        lam, s = matrix_power_sequences(lambda0, s0, n)
        if lam_prev == 0:
            out.append(None)
            continue
        out.append(sc.demote((lam * s_prev - lam_prev * s) / (lam_prev * lam_prev)))
    return out


def equal_moduli_alpha(r: Any, theta: Any, s0: Any, lambda0: Any, n: int, prec: Optional[int] = None) -> Any:
    """alpha_{n+1} for characteristic roots r1, r2 of modulus r with r1/r2 = e^{2 i theta}.

    alpha_{n+1} = (2iB sin(n theta) + s0 e^{-i n theta}) / (2iA sin(n theta) + lambda0 e^{-i n theta}),
    with A and B taken from the actual roots of r^2 - lambda0 r - s0, so complex
    coefficients whose roots are not a conjugate pair are handled too. Where
    sin(n theta) vanishes the value is s0/lambda0 exactly.

    Raises:
        ValueError: If the roots do not have modulus r.
        OscillationSingularity: If the denominator vanishes.
    """
    p = _float_prec(prec, r, theta, s0, lambda0)
    ctx = sc.context(p)
    th = sc.convert(theta, p)
    sin_n = ctx.sin(n * th)
    if abs(sin_n) <= sc.tolerance(p, 2):
        if lambda0 == 0:
            raise OscillationSingularity(f"lambda_{n} vanishes: s0/lambda0 is undefined")
        return s0 / lambda0 if _exact(s0, lambda0) else sc.demote(sc.convert(s0, p) / sc.convert(lambda0, p))
    lam, s = sc.convert(lambda0, p), sc.convert(s0, p)
    r1, r2 = (ctx.mpc(sc.convert(root, p)) for root in char_roots(lam, s, p))
    rr = sc.convert(r, p)
    tol = sc.tolerance(p, 4) * max(abs(rr), 1)
    if abs(abs(r1) - abs(rr)) > tol or abs(abs(r2) - abs(rr)) > tol:
        raise ValueError(f"roots {ctx.nstr(r1, 10)}, {ctx.nstr(r2, 10)} do not have modulus {ctx.nstr(rr, 10)}")
    turn = ctx.expj(2 * th)
    if abs(r2 / r1 - turn) < abs(r1 / r2 - turn):
        r1, r2 = r2, r1
    k = closed_form_constants(lam, s, r1, r2)
    phase = ctx.expj(-n * th)
    two_i = ctx.mpc(0, 2)
    num = two_i * k.B * sin_n + s * phase
    den = two_i * k.A * sin_n + lam * phase
    scale = abs(2 * k.A * sin_n) + abs(lam)
    if abs(den) <= sc.tolerance(p, 2) * scale:
        raise OscillationSingularity(f"denominator of alpha_{n + 1} vanishes (n theta = {ctx.nstr(n * th, 10)})")
    return sc.demote(num / den)


def casoratian(lambda0: Any, s0: Any, n: int) -> Any:
    """delta_n = (-s0)^(n+1) for constant coefficients."""
    return (-s0) ** (n + 1)


def complex_family(a: Any, b: Any, prec: Optional[int] = None) -> AimProblem:
    """y'' - a i y' - b(b + a i) y = 0, solved by exp((b + a i) x) and exp(-b x)."""
    p = _prec(prec)
    ctx = sc.context(p)
    a, b = sc.convert(a, p), sc.convert(b, p)
    lambda0 = ctx.mpc(0, 1) * a
    s0 = b * (b + ctx.mpc(0, 1) * a)
    return AimProblem.constant(sc.demote(lambda0), sc.demote(s0), p)


def substitution_residual(lambda0: Any, s0: Any, rate: Any) -> Any:
    """|r^2 - lambda0 r - s0| for the trial solution exp(r x)."""
    return sc.absval(rate * rate - lambda0 * rate - s0)


# -- the Hermite operator identity ------------------------------------------

SignRule = Callable[[int, int], int]

SIGN_RULES: Dict[str, SignRule] = {
    "(-1)^(m-k)": lambda m, k: (-1) ** (m - k),
    "(-1)^k": lambda m, k: (-1) ** k,
    "(-1)^(k+1)": lambda m, k: (-1) ** (k + 1),
    "(-1)^m": lambda m, k: (-1) ** m,
    "+1": lambda m, k: 1,
}


def apply_operator(m: int, f: Poly) -> Poly:
    """(d/dx - 2x)^m f, by repeated application."""
    two_x = Poly.from_scalars([0, 2])
    out = f
    for _ in range(m):
        out = out.derivative() - two_x * out
    return out


def hermite_sum(m: int, f: Poly, rule: SignRule) -> Poly:
    total = Poly.zero()
    deriv = f
    for k in range(m + 1):
        total = total + hermite(m - k).scale(rule(m, k) * comb(m, k)) * deriv
        deriv = deriv.derivative()
    return total


@functools.lru_cache(maxsize=None)
def burchnall_sign() -> str:
    """Name of the sign rule that matches the operator at the lowest powers."""
    samples = [Poly.from_scalars([1]), Poly.from_scalars([0, 1]), Poly.from_scalars([0, 0, 1])]
    alive = list(SIGN_RULES)
    for m in (1, 2, 3):
        alive = [
            name for name in alive if all(apply_operator(m, f) == hermite_sum(m, f, SIGN_RULES[name]) for f in samples)
        ]
        logger.debug("sign rules consistent at m = %d: %s", m, alive)
        if len(alive) == 1:
            return alive[0]
    if not alive:
        raise ArithmeticError("no sign rule reproduces the operator identity")
    return alive[0]


def burchnall_check(m: int, f: Poly) -> bool:
    """Exact comparison of (d/dx - 2x)^m f with the Hermite expansion."""
    if not 0 <= m <= 12:
        raise ValueError(f"m must lie in [0, 12], got {m}")
    if f.prec is not None or f.has_E():
        raise ValueError("the identity is checked on exact polynomials in x only")
    return apply_operator(m, f) == hermite_sum(m, f, SIGN_RULES[burchnall_sign()])
