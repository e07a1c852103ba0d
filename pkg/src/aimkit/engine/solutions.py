"""Closed-form first solutions y_n = exp(-integral alpha_n) and the quadrature second solution."""

import functools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Tuple

from aimkit.engine.ladder import AimProblem, AimState
from aimkit.errors import PoleOnPathError, QuadratureError
from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import Poly
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.numcore.scalar import Prec
from aimkit.numcore.roots import partial_fractions
from aimkit.settings import get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClosedForm:
    """y(x) = exp(exp_poly(x) + exp_rational(x)) * prod (x - root)^exponent.

    ``prec=None`` marks a closed form with exact data, whose logarithmic
    derivatives are exact at exact points. Powers use the principal branch,
    so values are meant for the sampled domain (x > 0 for the usual chains).
    """

    exp_poly: Poly
    factors: Tuple[Tuple[Any, Any], ...] = ()
    exp_rational: Optional[ParamRatFun] = None
    prec: Prec = 256

    @property
    def float_prec(self) -> int:
        return self.prec or get_settings().prec

    def _x(self, x: Any) -> Any:
        if sc.is_exact(x) and self.prec is not None:
            return sc.convert(x, self.prec)
        return x

    @staticmethod
    def _like(value: Any, x: Any) -> Any:
        if sc.is_exact(value) and not sc.is_exact(x):
            return sc.convert(value, sc.prec_of(x))
        return value

    @functools.cached_property
    def _poly_d1(self) -> Poly:
        return self.exp_poly.derivative()

    @functools.cached_property
    def _poly_d2(self) -> Poly:
        return self._poly_d1.derivative()

    @functools.cached_property
    def _rational_d1(self) -> ParamRatFun:
        return self.exp_rational.differentiate()

    @functools.cached_property
    def _rational_d2(self) -> ParamRatFun:
        return self._rational_d1.differentiate()

    def log_derivative(self, x: Any) -> Any:
        """y'/y."""
        x = self._x(x)
        value = self._poly_d1.evaluate(x)
        if self.exp_rational is not None:
            value += self._rational_d1.evaluate(x)
        for root, a in self.factors:
            value += self._like(a, x) / (x - self._like(root, x))
        return value

    def log_derivative_prime(self, x: Any) -> Any:
        """(y'/y)'."""
        x = self._x(x)
        value = self._poly_d2.evaluate(x)
        if self.exp_rational is not None:
            value += self._rational_d2.evaluate(x)
        for root, a in self.factors:
            value -= self._like(a, x) / (x - self._like(root, x)) ** 2
        return value

    def second_log_derivative(self, x: Any) -> Any:
        """y''/y."""
        g = self.log_derivative(x)
        return self.log_derivative_prime(x) + g * g

    def value(self, x: Any) -> Any:
        prec = self.float_prec
        ctx = sc.context(prec)
        x = sc.convert(x, prec) if sc.is_exact(x) else x
        exponent = sc.convert(self.exp_poly.evaluate(x), prec)
        if self.exp_rational is not None:
            exponent += self.exp_rational.evaluate(x)
        y = ctx.exp(exponent)
        for root, a in self.factors:
            y *= ctx.power(x - sc.convert(root, prec), sc.convert(a, prec))
        return sc.demote(y)

    def derivative(self, x: Any) -> Any:
        y = self.value(x)
        return y * self._like(self.log_derivative(x), y)

    def singularities(self) -> List[Any]:
        """Points where y or 1/y is singular."""
        points = [root for root, a in self.factors if a != 0]
        if self.exp_rational is not None and self.exp_rational.den.degree > 0:
            points.extend(p.location for p in partial_fractions(self.exp_rational, self.float_prec).poles)
        return points


def closed_form_from_alpha(alpha: ParamRatFun, prec: int) -> ClosedForm:
    """Integrate -alpha term by term from its partial fractions.

    A simple pole with residue c at a gives the factor (x - a)^(-c); a pole of
    order k >= 2 contributes c / ((k-1)(x-a)^(k-1)) to the exponent; the
    polynomial part q contributes -integral q.
    """
    if alpha.has_E():
        raise ValueError("substitute E before building a closed form")
    decomposition = partial_fractions(alpha, prec)
    exp_poly = -(decomposition.polynomial_part.to_prec(prec).antiderivative())
    factors = []
    rational = None
    x = ParamRatFun.x(prec)
    for pole in decomposition.poles:
        if pole.residues[0] != 0:
            factors.append((pole.location, sc.demote(-pole.residues[0])))
        for k, c in enumerate(pole.residues[1:], start=2):
            if c == 0:
                continue
            term = ParamRatFun.constant(c / (k - 1), prec) / (x - ParamRatFun.constant(pole.location, prec)) ** (k - 1)
            rational = term if rational is None else rational + term
    return ClosedForm(exp_poly, tuple(factors), rational, prec)


def _on_segment(p: Any, a: Any, b: Any, tol: Any) -> bool:
    return abs(p - a) + abs(p - b) - abs(b - a) <= tol * max(abs(b - a), 1)


@dataclass(frozen=True)
class SolutionPair:
    """y_n in closed form, z_n = y_n * integral_{x0}^{x} W(t)/y_n(t)^2 dt by quadrature.

    W = exp(integral lambda0) is the Wronskian of any solution basis, up to a constant.
    """

    y: ClosedForm
    wronskian: ClosedForm
    x0: Any
    prec: int
    wronskian_sample: Any = field(default=None)

    def _integral(self, x: Any) -> Any:
        ctx = sc.context(self.prec)
        x = sc.convert(x, self.prec) if sc.is_exact(x) else x
        if x == self.x0:
            return ctx.mpf(0)
        tol = sc.tolerance(self.prec, 4)
        for p in self.y.singularities() + self.wronskian.singularities():
            if _on_segment(p, self.x0, x, tol):
                raise PoleOnPathError(f"singular point {sc.format_scalar(p, 15)} lies between x0 and {sc.format_scalar(x, 15)}")

        def integrand(t):
            return self.wronskian.value(t) / self.y.value(t) ** 2

        value, err = ctx.quad(integrand, [self.x0, x], error=True)
        if abs(err) > sc.tolerance(self.prec, 4) * max(abs(value), 1):
            raise QuadratureError(f"quadrature error {ctx.nstr(err, 5)} too large on [x0, {ctx.nstr(x, 10)}]")
        return value

    def z(self, x: Any) -> Any:
        return sc.demote(self.y.value(x) * self._integral(x))

    def z_derivative(self, x: Any) -> Any:
        y = self.y.value(x)
        return sc.demote(self.y.derivative(x) * self._integral(x) + self.wronskian.value(x) / y)

    def wronskian_at(self, x: Any) -> Any:
        """y z' - y' z, evaluated numerically."""
        return sc.demote(self.y.value(x) * self.z_derivative(x) - self.y.derivative(x) * self.z(x))

    def general(self, c1: Any, c2: Any) -> Callable[[Any], Any]:
        """x -> c1 y_n(x) + c2 z_n(x)."""
        return lambda x: c1 * self.y.value(x) + c2 * self.z(x)


def build_solutions(problem: AimProblem, state: AimState, x0: Any, prec: Optional[int] = None) -> SolutionPair:
    """The pair (y_n, z_n) at rung ``state.n`` with the Wronskian sampled at x0.

    Raises:
        DegenerateLadderError: If lambda_{n-1} vanishes identically.
        PoleOnPathError: If x0 is itself singular for y_n or W.
    """
    prec = prec or problem.prec or get_settings().prec
    y = closed_form_from_alpha(state.alpha, prec)
    w = closed_form_from_alpha(-problem.lambda0, prec)
    x0 = sc.convert(x0, prec) if sc.is_exact(x0) else x0
    for p in y.singularities() + w.singularities():
        if sc.is_negligible(p - x0, 1, prec, 4):
            raise PoleOnPathError(f"x0 = {sc.format_scalar(x0, 15)} is a singular point of y_{state.n}")
    pair = SolutionPair(y, w, x0, prec)
    sample = pair.wronskian_at(x0)
    logger.debug("Wronskian of (y_%d, z_%d) at x0: %s", state.n, state.n, sc.format_scalar(sample, 15))
    return SolutionPair(y, w, x0, prec, sample)
