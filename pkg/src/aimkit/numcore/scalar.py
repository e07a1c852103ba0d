"""Scalar tower: exact rationals and multiprecision real/complex floats.

A working precision of ``None`` means exact-rational mode; an integer is a
float precision in bits. Every float value is created inside a private
:class:`mpmath.MPContext` for its precision, so nothing here touches the
global ``mpmath.mp`` state.
"""

import functools
import math
from fractions import Fraction
from typing import Any, Optional, Union

import mpmath

MIN_PREC = 64

Scalar = Union[Fraction, Any]
Prec = Optional[int]


@functools.lru_cache(maxsize=None)
def context(prec: int) -> mpmath.MPContext:
    """Private mpmath context at ``prec`` bits."""
    if prec < MIN_PREC:
        raise ValueError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def is_exact(value: Any) -> bool:
    return isinstance(value, (int, Fraction)) and not isinstance(value, bool)


def is_complex(value: Any) -> bool:
    return hasattr(value, "_mpc_") or isinstance(value, complex)


def join_prec(a: Prec, b: Prec) -> Prec:
    """Precision of a result: exact only if both are exact, else the smaller one."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def prec_of(value: Any) -> Prec:
    if is_exact(value):
        return None
    ctx = getattr(value, "context", None)
    if ctx is not None:
        return ctx.prec
    return 53


def convert(value: Any, prec: Prec) -> Scalar:
    """Bring ``value`` into the field at ``prec`` (``None`` = exact rationals)."""
    if prec is None:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        raise TypeError(f"cannot represent {value!r} exactly; use a float precision")
    ctx = context(prec)
    if isinstance(value, Fraction):
        return ctx.mpf(value.numerator) / value.denominator
    if isinstance(value, int):
        return ctx.mpf(value)
    if hasattr(value, "_mpc_") or isinstance(value, complex):
        return demote(ctx.mpc(value))
    return ctx.mpf(value)


def demote(value: Any) -> Scalar:
    """Drop a complex value's imaginary part when it is exactly zero."""
    if hasattr(value, "_mpc_") and value.imag == 0:
        return value.context.mpf(value.real)
    return value


def zero(prec: Prec) -> Scalar:
    return convert(0, prec)


def one(prec: Prec) -> Scalar:
    return convert(1, prec)


def absval(value: Any) -> Any:
    """Modulus; exact for rationals."""
    if is_exact(value):
        return abs(Fraction(value))
    return abs(value)


def as_mpf(value: Any, prec: int) -> Any:
    """Real or complex float view of any scalar at ``prec`` bits."""
    return convert(value, prec)


def tolerance(prec: Prec, divisor: int = 2) -> Any:
    """2^(-prec/divisor) at ``prec`` bits; exact mode has zero tolerance."""
    if prec is None:
        return Fraction(0)
    ctx = context(prec)
    return ctx.ldexp(ctx.mpf(1), -(prec // divisor))


def is_negligible(value: Any, scale: Any, prec: Prec, divisor: int = 2) -> bool:
    """True when ``|value| <= 2^(-prec/divisor) * scale`` (exact zero in exact mode)."""
    if is_exact(value):
        return value == 0
    if prec is None:
        prec = prec_of(value)
    if is_exact(scale):
        scale = convert(scale, prec)
    return absval(value) <= tolerance(prec, divisor) * scale


def exact_sqrt(value: Fraction) -> Optional[Fraction]:
    """Square root of a nonnegative rational when it is itself rational."""
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def format_scalar(value: Any, digits: Optional[int] = None) -> str:
    """Render a scalar in the input grammar (fixed notation, ``i`` for the unit)."""
    if is_exact(value):
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    ctx = value.context
    if digits is None:
        digits = int(ctx.prec * 0.30103) + 5
    if hasattr(value, "_mpc_"):
        re = _fixed(ctx.mpf(value.real), digits)
        im = _fixed(ctx.mpf(value.imag), digits)
        return f"{re} + ({im})*i"
    return _fixed(value, digits)


def _fixed(value: Any, digits: int) -> str:
    text = mpmath.nstr(value, digits, min_fixed=-(10 ** 9), max_fixed=10 ** 9)
    if text in ("0.0", "-0.0"):
        return "0"
    return text
