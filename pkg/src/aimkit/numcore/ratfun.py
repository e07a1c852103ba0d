"""Rational functions in x whose coefficients are polynomials in E.

Every constructor goes through :meth:`ParamRatFun.make`, which reduces the
fraction: exact-rational inputs are cancelled with sympy over QQ[x, E], float
inputs without E use an approximate Euclidean gcd, and the denominator is
normalised so the leading E-coefficient of its leading x-coefficient is 1.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Literal

import sympy

from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import EPoly, Poly, format_poly
from aimkit.numcore.scalar import Prec

logger = logging.getLogger(__name__)

CombineOp = Literal["add", "sub", "mul", "div"]

_X, _E = sympy.symbols("x E")


def _to_sympy(p: Poly) -> sympy.Poly:
    terms = {}
    for i, c in enumerate(p.coeffs):
        for j, v in enumerate(c.coeffs):
            if v != 0:
                terms[(i, j)] = sympy.Rational(v.numerator, v.denominator)
    return sympy.Poly.from_dict(terms, gens=(_X, _E), domain="QQ")


def _from_sympy(p: sympy.Poly) -> Poly:
    grid: Dict[int, Dict[int, Fraction]] = {}
    for (i, j), v in p.terms():
        grid.setdefault(i, {})[j] = Fraction(int(v.p), int(v.q))
    if not grid:
        return Poly.zero(None)
    coeffs = []
    for i in range(max(grid) + 1):
        row = grid.get(i, {})
        coeffs.append(EPoly.make([row.get(j, 0) for j in range(max(row, default=-1) + 1)], None))
    return Poly.make(coeffs, None)


def _chop(p: Poly, threshold: Any) -> Poly:
    coeffs = [c if sc.absval(c) > threshold else 0 for c in p.scalar_coeffs()]
    return Poly.from_scalars(coeffs, p.prec) if any(c != 0 for c in coeffs) else Poly.zero(p.prec)


def _monic(p: Poly) -> Poly:
    return p.divide_scalar(p.leading().constant_term())


def approx_gcd(a: Poly, b: Poly, prec: int) -> Poly:
    """Monic approximate gcd of two E-free float polynomials."""
    tol = sc.tolerance(prec, 2)
    a, b = _monic(a), _monic(b)
    if b.degree > a.degree:
        a, b = b, a
    while not b.is_zero():
        if b.degree == 0:
            return Poly.constant(1, prec)
        _, r = a.divmod(b)
        scale = max(a.max_abs(), sc.one(prec))
        r = _chop(r, tol * scale)
        a, b = b, (_monic(r) if not r.is_zero() else r)
    return a


@dataclass(frozen=True)
class ParamRatFun:
    """Reduced quotient ``num/den`` of polynomials in x over EPoly coefficients."""

    num: Poly
    den: Poly

    @classmethod
    def make(cls, num: Poly, den: Poly | None = None) -> "ParamRatFun":
        if den is None:
            den = Poly.constant(1, num.prec)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        prec = sc.join_prec(num.prec, den.prec)
        num, den = num.to_prec(prec), den.to_prec(prec)
        if num.is_zero():
            return cls(Poly.zero(prec), Poly.constant(1, prec))
        return cls(*_reduce(num, den, prec))

    @classmethod
    def constant(cls, value: Any, prec: Prec = None) -> "ParamRatFun":
        if prec is None and not sc.is_exact(value):
            prec = sc.prec_of(value)
        return cls.make(Poly.constant(sc.convert(value, prec), prec))

    @classmethod
    def polynomial(cls, coeffs: List[Any], prec: Prec = None) -> "ParamRatFun":
        """From scalar coefficients, lowest power of x first."""
        return cls.make(Poly.from_scalars(coeffs, prec))

    @classmethod
    def x(cls, prec: Prec = None) -> "ParamRatFun":
        return cls.make(Poly.x(prec))

    @classmethod
    def E(cls, prec: Prec = None) -> "ParamRatFun":
        return cls.make(Poly.constant(EPoly.variable(prec), prec))

    @property
    def prec(self) -> Prec:
        return sc.join_prec(self.num.prec, self.den.prec)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def has_E(self) -> bool:
        return self.num.has_E() or self.den.has_E()

    def is_polynomial(self) -> bool:
        return self.den.degree == 0 and not self.den.has_E()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Any:
        if not self.is_constant():
            raise ValueError(f"{self} is not a numeric constant")
        return self.num.constant_value() / self.den.constant_value()

    def to_prec(self, prec: Prec) -> "ParamRatFun":
        if prec == self.prec:
            return self
        return ParamRatFun.make(self.num.to_prec(prec), self.den.to_prec(prec))

    def substitute_E(self, value: Any) -> "ParamRatFun":
        if not self.has_E():
            return self
        return ParamRatFun.make(self.num.substitute_E(value), self.den.substitute_E(value))

    def evaluate(self, x: Any, E: Any = None) -> Any:
        if E is None and self.has_E():
            raise ValueError("E must be given to evaluate a function of E")
        d = self.den.evaluate(x, E)
        if d == 0:
            raise ZeroDivisionError(f"pole at x = {x}")
        return sc.demote(self.num.evaluate(x, E) / d) if not sc.is_exact(d) else self.num.evaluate(x, E) / d

    def differentiate(self) -> "ParamRatFun":
        return differentiate(self)

    # operator sugar over ratfun_combine
    def __add__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(self, _lift(other), "add")

    def __radd__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(_lift(other), self, "add")

    def __sub__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(self, _lift(other), "sub")

    def __rsub__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(_lift(other), self, "sub")

    def __mul__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(self, _lift(other), "mul")

    def __rmul__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(_lift(other), self, "mul")

    def __truediv__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(self, _lift(other), "div")

    def __rtruediv__(self, other: Any) -> "ParamRatFun":
        return ratfun_combine(_lift(other), self, "div")

    def __neg__(self) -> "ParamRatFun":
        return ParamRatFun(-self.num, self.den)

    def __pow__(self, exponent: int) -> "ParamRatFun":
        if exponent < 0:
            return ParamRatFun.make(self.den ** (-exponent), self.num ** (-exponent))
        return ParamRatFun.make(self.num ** exponent, self.den ** exponent)

    def __str__(self) -> str:
        if self.is_polynomial() and self.den.constant_value() == 1:
            return format_poly(self.num)
        return f"({format_poly(self.num)})/({format_poly(self.den)})"


def _lift(value: Any) -> ParamRatFun:
    if isinstance(value, ParamRatFun):
        return value
    if isinstance(value, Poly):
        return ParamRatFun.make(value)
    return ParamRatFun.constant(value)


def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
    lead = den.leading().leading()
    if lead == 1:
        return num, den
    return num.divide_scalar(lead), den.divide_scalar(lead)


def _reduce(num: Poly, den: Poly, prec: Prec) -> tuple[Poly, Poly]:
    if den.is_constant():
        value = den.constant_value()
        return num.divide_scalar(value), Poly.constant(1, prec)
    if prec is None:
        p, q = _to_sympy(num).cancel(_to_sympy(den), include=True)
        num, den = _from_sympy(p), _from_sympy(q)
        if den.is_constant():
            return num.divide_scalar(den.constant_value()), Poly.constant(1, None)
        return _normalize(num, den)
    if not num.has_E() and not den.has_E() and num.degree >= 1 and den.degree >= 1:
        g = approx_gcd(num, den, prec)
        if g.degree >= 1:
            qn, rn = num.divmod(g)
            qd, rd = den.divmod(g)
            tol = sc.tolerance(prec, 2)
            if rn.max_abs() <= tol * max(num.max_abs(), sc.one(prec)) and rd.max_abs() <= tol * max(
                den.max_abs(), sc.one(prec)
            ):
                num, den = qn, qd
                if den.is_constant():
                    return num.divide_scalar(den.constant_value()), Poly.constant(1, prec)
            else:
                logger.debug("approximate gcd of degree %d rejected by remainder check", g.degree)
    return _normalize(num, den)


def differentiate(r: ParamRatFun) -> ParamRatFun:
    """Quotient-rule derivative in x; E is a constant."""
    if r.is_polynomial():
        return ParamRatFun.make(r.num.derivative(), r.den)
    return ParamRatFun.make(
        r.num.derivative() * r.den - r.num * r.den.derivative(),
        r.den * r.den,
    )


def ratfun_combine(a: ParamRatFun, b: ParamRatFun, op: CombineOp) -> ParamRatFun:
    """Reduced ``a op b`` for op in add, sub, mul, div."""
    if op in ("add", "sub"):
        bn = b.num if op == "add" else -b.num
        if a.den == b.den:
            return ParamRatFun.make(a.num + bn, a.den)
        return ParamRatFun.make(a.num * b.den + bn * a.den, a.den * b.den)
    if op == "mul":
        if a.is_zero() or b.is_zero():
            return ParamRatFun.make(Poly.zero(sc.join_prec(a.prec, b.prec)))
        return ParamRatFun.make(a.num * b.num, a.den * b.den)
    if op == "div":
        if b.is_zero():
            raise ZeroDivisionError("division by an identically zero function")
        return ParamRatFun.make(a.num * b.den, a.den * b.num)
    raise ValueError(f"Unsupported operation: {op}. Use add, sub, mul or div.")
