"""Dense polynomials: EPoly in the spectral parameter E, Poly in x over EPoly."""

from dataclasses import dataclass
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

from aimkit.numcore import scalar as sc
from aimkit.numcore.scalar import Prec, Scalar


def _infer_prec(values: Iterable[Any]) -> Prec:
    prec: Prec = None
    for v in values:
        if not sc.is_exact(v):
            prec = sc.join_prec(prec, sc.prec_of(v)) if prec is not None else sc.prec_of(v)
    return prec


def _trim(values: List[Any]) -> Tuple[Any, ...]:
    end = len(values)
    while end and values[end - 1] == 0:
        end -= 1
    return tuple(values[:end])


@dataclass(frozen=True)
class EPoly:
    """Polynomial in E with scalar coefficients, lowest power first."""

    coeffs: Tuple[Scalar, ...] = ()
    prec: Prec = None

    @classmethod
    def make(cls, coeffs: Sequence[Any], prec: Prec = None, infer: bool = True) -> "EPoly":
        if infer and prec is None:
            prec = _infer_prec(coeffs)
        return cls(_trim([sc.convert(c, prec) for c in coeffs]), prec)

    @classmethod
    def constant(cls, value: Any, prec: Prec = None) -> "EPoly":
        return cls.make([value], prec)

    @classmethod
    def variable(cls, prec: Prec = None) -> "EPoly":
        return cls.make([0, 1], prec)

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant_term(self) -> Scalar:
        return self.coeffs[0] if self.coeffs else sc.zero(self.prec)

    def leading(self) -> Scalar:
        return self.coeffs[-1] if self.coeffs else sc.zero(self.prec)

    def to_prec(self, prec: Prec) -> "EPoly":
        if prec == self.prec:
            return self
        return EPoly.make(self.coeffs, prec, infer=False)

    def _lift(self, other: Any) -> Tuple["EPoly", "EPoly"]:
        if not isinstance(other, EPoly):
            other = EPoly.constant(other, None if sc.is_exact(other) else sc.prec_of(other))
        prec = sc.join_prec(self.prec, other.prec)
        return self.to_prec(prec), other.to_prec(prec)

    def __add__(self, other: Any) -> "EPoly":
        a, b = self._lift(other)
        n = max(len(a.coeffs), len(b.coeffs))
        zero = sc.zero(a.prec)
        out = [
            (a.coeffs[i] if i < len(a.coeffs) else zero) + (b.coeffs[i] if i < len(b.coeffs) else zero)
            for i in range(n)
        ]
        return EPoly(_trim(out), a.prec)

    __radd__ = __add__

    def __neg__(self) -> "EPoly":
        return EPoly(tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other: Any) -> "EPoly":
        a, b = self._lift(other)
        return a + (-b)

    def __rsub__(self, other: Any) -> "EPoly":
        return (-self) + other

    def __mul__(self, other: Any) -> "EPoly":
        a, b = self._lift(other)
        if a.is_zero() or b.is_zero():
            return EPoly((), a.prec)
        zero = sc.zero(a.prec)
        out = [zero] * (len(a.coeffs) + len(b.coeffs) - 1)
        for i, ca in enumerate(a.coeffs):
            if ca == 0:
                continue
            for j, cb in enumerate(b.coeffs):
                out[i + j] += ca * cb
        return EPoly(_trim(out), a.prec)

    __rmul__ = __mul__

    def scale(self, factor: Scalar) -> "EPoly":
        prec = sc.join_prec(self.prec, None if sc.is_exact(factor) else sc.prec_of(factor))
        factor = sc.convert(factor, prec)
        return EPoly(_trim([sc.convert(c, prec) * factor for c in self.coeffs]), prec)

    def divide_scalar(self, divisor: Scalar) -> "EPoly":
        prec = sc.join_prec(self.prec, None if sc.is_exact(divisor) else sc.prec_of(divisor))
        divisor = sc.convert(divisor, prec)
        return EPoly(_trim([sc.convert(c, prec) / divisor for c in self.coeffs]), prec)

    def evaluate(self, value: Any) -> Scalar:
        acc = sc.zero(self.prec) if sc.is_exact(value) else sc.zero(sc.prec_of(value))
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def max_abs(self) -> Any:
        if not self.coeffs:
            return sc.zero(self.prec)
        return max(sc.absval(c) for c in self.coeffs)


Coefficient = Union[EPoly, Scalar]


@dataclass(frozen=True)
class Poly:
    """Dense polynomial in x with EPoly coefficients, lowest power first."""

    coeffs: Tuple[EPoly, ...] = ()
    prec: Prec = None

    @classmethod
    def make(cls, coeffs: Sequence[Coefficient], prec: Prec = None) -> "Poly":
        lifted = [c if isinstance(c, EPoly) else EPoly.constant(c, None if sc.is_exact(c) else sc.prec_of(c)) for c in coeffs]
        if prec is None:
            prec = _infer_prec(v for c in lifted for v in c.coeffs)
            for c in lifted:
                if c.prec is not None:
                    prec = c.prec if prec is None else min(prec, c.prec)
        lifted = [c.to_prec(prec) for c in lifted]
        end = len(lifted)
        while end and lifted[end - 1].is_zero():
            end -= 1
        return cls(tuple(lifted[:end]), prec)

    @classmethod
    def zero(cls, prec: Prec = None) -> "Poly":
        return cls((), prec)

    @classmethod
    def constant(cls, value: Coefficient, prec: Prec = None) -> "Poly":
        if prec is not None and not isinstance(value, EPoly):
            value = EPoly.constant(value, prec)
        return cls.make([value], prec)

    @classmethod
    def x(cls, prec: Prec = None) -> "Poly":
        return cls.make([EPoly.constant(0, prec), EPoly.constant(1, prec)], prec)

    @classmethod
    def from_scalars(cls, values: Sequence[Any], prec: Prec = None) -> "Poly":
        return cls.make([EPoly.constant(v, prec) for v in values], prec)

    # -- shape ---------------------------------------------------------------

    @property
    def degree(self) -> int:
        return max(len(self.coeffs) - 1, 0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def has_E(self) -> bool:
        return any(not c.is_constant() for c in self.coeffs)

    @property
    def e_degree(self) -> int:
        return max((c.degree for c in self.coeffs), default=0)

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1 and not self.has_E()

    def constant_value(self) -> Scalar:
        if not self.is_constant():
            raise ValueError("polynomial is not a numeric constant")
        return self.coeffs[0].constant_term() if self.coeffs else sc.zero(self.prec)

    def leading(self) -> EPoly:
        return self.coeffs[-1] if self.coeffs else EPoly((), self.prec)

    def scalar_coeffs(self) -> List[Scalar]:
        """Coefficients as scalars, lowest power first; requires an E-free polynomial."""
        if self.has_E():
            raise ValueError("polynomial still depends on E; substitute it first")
        return [c.constant_term() for c in self.coeffs]

    def to_prec(self, prec: Prec) -> "Poly":
        if prec == self.prec:
            return self
        return Poly(tuple(c.to_prec(prec) for c in self.coeffs), prec)

    def max_abs(self) -> Any:
        if not self.coeffs:
            return sc.zero(self.prec)
        return max(c.max_abs() for c in self.coeffs)

    # -- arithmetic ----------------------------------------------------------

    def _lift(self, other: Any) -> Tuple["Poly", "Poly"]:
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        prec = sc.join_prec(self.prec, other.prec)
        return self.to_prec(prec), other.to_prec(prec)

    def __add__(self, other: Any) -> "Poly":
        a, b = self._lift(other)
        n = max(len(a.coeffs), len(b.coeffs))
        zero = EPoly((), a.prec)
        out = [
            (a.coeffs[i] if i < len(a.coeffs) else zero) + (b.coeffs[i] if i < len(b.coeffs) else zero)
            for i in range(n)
        ]
        return Poly.make(out, a.prec)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs), self.prec)

    def __sub__(self, other: Any) -> "Poly":
        a, b = self._lift(other)
        return a + (-b)

    def __rsub__(self, other: Any) -> "Poly":
        return (-self) + other

    def __mul__(self, other: Any) -> "Poly":
        a, b = self._lift(other)
        if a.is_zero() or b.is_zero():
            return Poly.zero(a.prec)
        zero = EPoly((), a.prec)
        out = [zero] * (len(a.coeffs) + len(b.coeffs) - 1)
        b_terms = [(j, cb) for j, cb in enumerate(b.coeffs) if not cb.is_zero()]
        for i, ca in enumerate(a.coeffs):
            if ca.is_zero():
                continue
            for j, cb in b_terms:
                out[i + j] = out[i + j] + ca * cb
        return Poly.make(out, a.prec)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Poly":
        if exponent < 0:
            raise ValueError("negative powers are not polynomials")
        result = Poly.constant(1, self.prec)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def scale(self, factor: Coefficient) -> "Poly":
        return self * Poly.constant(factor)

    def divide_scalar(self, divisor: Scalar) -> "Poly":
        coeffs = [c.divide_scalar(divisor) for c in self.coeffs]
        prec = sc.join_prec(self.prec, None if sc.is_exact(divisor) else sc.prec_of(divisor))
        return Poly.make(coeffs, prec)

    def derivative(self) -> "Poly":
        return Poly.make([c.scale(k) for k, c in enumerate(self.coeffs)][1:] or [EPoly((), self.prec)], self.prec)

    def antiderivative(self) -> "Poly":
        """Antiderivative with zero constant term."""
        out = [EPoly((), self.prec)]
        for k, c in enumerate(self.coeffs):
            divisor = k + 1 if self.prec is not None else sc.convert(k + 1, None)
            out.append(c.divide_scalar(divisor))
        return Poly.make(out, self.prec)

    def divmod(self, divisor: "Poly") -> Tuple["Poly", "Poly"]:
        """Long division by a polynomial whose leading coefficient is E-free."""
        a, b = self._lift(divisor)
        if b.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        lead = b.leading()
        if not lead.is_constant():
            raise ValueError("divisor's leading coefficient depends on E")
        lead_value = lead.constant_term()
        rem = list(a.coeffs)
        db = len(b.coeffs) - 1
        if len(rem) - 1 < db:
            return Poly.zero(a.prec), a
        quot = [EPoly((), a.prec)] * (len(rem) - db)
        for k in range(len(rem) - 1, db - 1, -1):
            q = rem[k].divide_scalar(lead_value)
            quot[k - db] = q
            if q.is_zero():
                continue
            for j, cb in enumerate(b.coeffs):
                rem[k - db + j] = rem[k - db + j] - q * cb
            rem[k] = EPoly((), a.prec)
        return Poly.make(quot, a.prec), Poly.make(rem[:db] or [EPoly((), a.prec)], a.prec)

    # -- evaluation ----------------------------------------------------------

    def evaluate(self, x: Any, E: Optional[Any] = None) -> Any:
        """Value at ``x``; returns an EPoly unless ``E`` is given or absent."""
        if E is None and self.has_E():
            acc = EPoly((), self.prec)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        prec = self.prec if sc.is_exact(x) else sc.join_prec(self.prec, sc.prec_of(x))
        if E is not None and not sc.is_exact(E):
            prec = sc.join_prec(prec, sc.prec_of(E))
        x = sc.convert(x, prec)
        E = sc.convert(E, prec) if E is not None else None
        acc = sc.zero(prec)
        for c in reversed(self.coeffs):
            value = c.evaluate(E) if E is not None else c.constant_term()
            acc = acc * x + sc.convert(value, prec)
        return acc

    def substitute_E(self, value: Any) -> "Poly":
        prec = self.prec if sc.is_exact(value) else sc.join_prec(self.prec, sc.prec_of(value))
        value = sc.convert(value, prec)
        return Poly.make([EPoly.constant(c.to_prec(prec).evaluate(value), prec) for c in self.coeffs], prec)

    def shift(self, x0: Any) -> "Poly":
        """Re-expand about ``x0``: coefficients of p(x0 + t) in powers of t."""
        prec = self.prec if sc.is_exact(x0) else sc.join_prec(self.prec, sc.prec_of(x0))
        x0 = sc.convert(x0, prec)
        work = [c.to_prec(prec) for c in self.coeffs]
        n = len(work)
        for i in range(n):
            for k in range(n - 2, i - 1, -1):
                work[k] = work[k] + work[k + 1].scale(x0)
        return Poly.make(work, prec)


def _power_suffix(var: str, k: int) -> str:
    if k == 0:
        return ""
    if k == 1:
        return f"*{var}"
    return f"*{var}^{k}"


def format_epoly(p: EPoly) -> str:
    """Render an EPoly in the input grammar; every coefficient is parenthesized."""
    parts = [f"({sc.format_scalar(c)}){_power_suffix('E', j)}" for j, c in enumerate(p.coeffs) if c != 0]
    return " + ".join(parts) if parts else "0"


def format_poly(p: Poly) -> str:
    parts = [f"({format_epoly(c)}){_power_suffix('x', k)}" for k, c in enumerate(p.coeffs) if not c.is_zero()]
    return " + ".join(parts) if parts else "0"


def series_quotient(num: Sequence[Any], den: Sequence[Any], order: int) -> List[Any]:
    """First ``order`` Taylor coefficients of num/den from ascending coefficient lists."""
    if not den or den[0] == 0:
        raise ZeroDivisionError("series denominator vanishes at the expansion point")
    out: List[Any] = []
    for k in range(order):
        acc = num[k] if k < len(num) else 0 * den[0]
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return out
