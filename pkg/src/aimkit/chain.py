"""Exactly solvable equations generated from ladder rungs.

At rung n, y_n = exp(-integral alpha_n) solves the perturbed equation

    y'' - lambda0 y' - s0 y = Delta_n y

so each rung of a ladder yields one more solvable equation (a chain link).
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from aimkit.engine.ladder import AimProblem, climb
from aimkit.engine.solutions import ClosedForm, closed_form_from_alpha
from aimkit.errors import DegenerateLadderError, PoleCollisionError
from aimkit.instrument import benchmark
from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import Poly
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.numcore.scalar import Prec
from aimkit.settings import Settings, get_settings

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainLink:
    base: AimProblem
    level: int
    perturb: ParamRatFun
    solution: ClosedForm
    alpha: ParamRatFun

    def absorbed(self) -> AimProblem:
        """y'' = lambda0 y' + (s0 + Delta_n) y, solved exactly by the link's solution."""
        return AimProblem(self.base.lambda0, self.base.s0 + self.perturb, self.base.prec)

    def residual(self, points: Sequence[Any]) -> Any:
        return residual(self.base.lambda0, self.base.s0, self.perturb, self.solution, points)


def sample_points(settings: Optional[Settings] = None, count: Optional[int] = None) -> List[Fraction]:
    """Reproducible exact sample points in the configured interval."""
    settings = settings or get_settings()
    rng = np.random.default_rng(settings.seed)
    lo, hi = settings.sample_interval
    raw = rng.uniform(float(lo), float(hi), size=count or settings.sample_points)
    return [Fraction(float(v)).limit_denominator(10 ** 6) for v in raw]


@benchmark
def chain_link(problem: AimProblem, n: int, prec: Optional[int] = None) -> ChainLink:
    """The perturbed equation at rung ``n`` together with its closed-form solution.

    Raises:
        DegenerateLadderError: If lambda_{n-1} vanishes identically.
        RootFindingError: If the poles of alpha_n cannot be resolved.
    """
    if problem.has_E():
        raise ValueError("chain links need numeric coefficients; substitute E first")
    if n < 1:
        raise ValueError(f"chain levels start at 1, got {n}")
    state = climb(problem, n, get_settings().degree_bound)
    if state.lambda_prev.is_zero():
        raise DegenerateLadderError(f"lambda_{n - 1} vanishes identically")
    prec = prec or problem.prec or get_settings().prec
    return ChainLink(problem, n, state.perturbation, closed_form_from_alpha(state.alpha, prec), state.alpha)


def residual(
    coeff_lambda: ParamRatFun,
    coeff_s: ParamRatFun,
    rhs: ParamRatFun,
    candidate: ClosedForm,
    points: Sequence[Any],
) -> Any:
    """max over points of |y'' - lambda y' - s y - rhs y| / max(1, |y|).

    Derivatives come from the logarithmic derivative of the closed form. With
    exact data at exact points the result is an exact rational.

    Raises:
        PoleCollisionError: If a point sits on a pole or a zero of the candidate.
    """
    prec = sc.join_prec(sc.join_prec(candidate.prec, coeff_lambda.prec), sc.join_prec(coeff_s.prec, rhs.prec))
    worst: Any = Fraction(0)
    for x in points:
        if prec is not None and sc.is_exact(x):
            x = sc.convert(x, prec)
        try:
            g = candidate.log_derivative(x)
            ratio = (
                candidate.log_derivative_prime(x)
                + g * g
                - coeff_lambda.evaluate(x) * g
                - coeff_s.evaluate(x)
                - rhs.evaluate(x)
            )
        except ZeroDivisionError as exc:
            raise PoleCollisionError(f"sample point {sc.format_scalar(x, 15)} is singular") from exc
        if sc.is_exact(ratio) and ratio == 0:
            continue
        y = sc.absval(candidate.value(x))
        value = sc.absval(sc.convert(ratio, candidate.float_prec) if sc.is_exact(ratio) else ratio) * y / max(y, 1)
        if sc.is_exact(worst) or value > worst:
            worst = value
    return worst


# -- the Hermite family -------------------------------------------------------


def terminates_at(problem: AimProblem, level: int) -> bool:
    """True when delta_level vanishes identically."""
    return climb(problem, level, get_settings().degree_bound).terminated


def hermite_problem(mu: Any, m: Any) -> AimProblem:
    """lambda0 = mu x, s0 = -m mu."""
    mu = Fraction(mu) if sc.is_exact(mu) else mu
    prec = None if sc.is_exact(mu) and sc.is_exact(m) else get_settings().prec
    x = ParamRatFun.x(prec)
    return AimProblem(ParamRatFun.constant(mu, prec) * x, ParamRatFun.constant(-m * mu, prec), prec)


def hermite_polynomial(mu: Any, m: int) -> Poly:
    """Monic degree-m solution of y'' = mu x y' - m mu y."""
    prec = None if sc.is_exact(mu) else sc.prec_of(mu)
    mu = sc.convert(mu, prec)
    coeffs: List[Any] = [sc.zero(prec)] * (m + 1)
    coeffs[m] = sc.one(prec)
    for k in range(m - 2, -1, -1):
        coeffs[k] = -(k + 2) * (k + 1) * coeffs[k + 2] / (mu * (m - k))
    return Poly.from_scalars(coeffs, prec)


def hermite_normalization(mu: Any, m: int, prec: Optional[int] = None) -> Any:
    """c with H_m(sqrt(mu/2) x) = c * P(x) for the monic chain polynomial P.

    Exact when mu/2 raised to m/2 is rational.
    """
    if sc.is_exact(mu):
        half = Fraction(mu) / 2
        if m % 2 == 0:
            return 2 ** m * half ** (m // 2)
        root = sc.exact_sqrt(half)
        if root is not None:
            return 2 ** m * root ** m
    p = prec or (None if sc.is_exact(mu) else sc.prec_of(mu)) or get_settings().prec
    ctx = sc.context(p)
    return 2 ** m * ctx.sqrt(sc.convert(mu, p) / 2) ** m


@benchmark
def hermite_chain(mu: Any, m: int) -> Tuple[Poly, bool]:
    """Polynomial solution of the level-m Hermite equation and the termination verdict.

    The verdict holds when delta_m vanishes identically and the monic polynomial
    P satisfies lambda_{m-1} P' + s_{m-1} P = 0.
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    if not mu > 0:
        raise ValueError(f"mu must be positive, got {mu}")
    problem = hermite_problem(mu, m)
    state = climb(problem, m, get_settings().degree_bound)
    poly = hermite_polynomial(mu, m)
    p = ParamRatFun.make(poly)
    satisfied = (state.lambda_prev * p.differentiate() + state.s_prev * p).is_zero()
    verdict = state.terminated and satisfied
    if not verdict:
        logger.error("Hermite ladder mu=%s m=%d did not terminate at level m", mu, m)
    return poly, verdict


# -- closed-form families ------------------------------------------------------


def _scalar(value: Any, prec: Prec) -> Any:
    return Fraction(value) if prec is None else sc.convert(value, prec)


def power_family(mu: Any, m: int) -> Tuple[ParamRatFun, ParamRatFun, ClosedForm]:
    """x^2 u'' - mu x^3 u' + m(mu x^2 - m + 1) u = 0, solved by u = x^m."""
    prec = None if sc.is_exact(mu) else sc.prec_of(mu)
    mu = _scalar(mu, prec)
    x = ParamRatFun.x(prec)
    lam = ParamRatFun.constant(mu, prec) * x
    s = ParamRatFun.constant(-m * mu, prec) + ParamRatFun.constant(m * (m - 1), prec) / (x * x)
    return lam, s, ClosedForm(Poly.zero(prec), ((_scalar(0, prec), _scalar(m, prec)),), None, prec)


def inverted_power_family(mu: Any, m: int) -> Tuple[ParamRatFun, ParamRatFun, ClosedForm]:
    """x^4 v'' + x(2x^2 + mu) v' + m(mu - (m-1) x^2) v = 0, solved by v = x^(-m)."""
    prec = None if sc.is_exact(mu) else sc.prec_of(mu)
    mu = _scalar(mu, prec)
    x = ParamRatFun.x(prec)
    mu_r = ParamRatFun.constant(mu, prec)
    lam = -(2 * x * x + mu_r) / (x ** 3)
    s = -(m * (mu_r - (m - 1) * x * x)) / (x ** 4)
    return lam, s, ClosedForm(Poly.zero(prec), ((_scalar(0, prec), _scalar(-m, prec)),), None, prec)


def quadratic_family(mu: Any, m: int, prec: Optional[int] = None) -> Tuple[ParamRatFun, ParamRatFun, ClosedForm]:
    """y'' - mu x y' + 2 m mu (1 - 2(m-1)(2m-1)/(1 - 2m + mu x^2)^2) y = 0, solved by y = (1 - 2m + mu x^2)^m."""
    exact = sc.is_exact(mu)
    rprec = None if exact else sc.prec_of(mu)
    mu = _scalar(mu, rprec)
    x = ParamRatFun.x(rprec)
    mu_r = ParamRatFun.constant(mu, rprec)
    q = ParamRatFun.constant(1 - 2 * m, rprec) + mu_r * x * x
    lam = mu_r * x
    s = ParamRatFun.constant(-2 * m, rprec) * mu_r + (4 * m * (m - 1) * (2 * m - 1)) * mu_r / (q * q)
    if m == 0:
        return lam, s, ClosedForm(Poly.zero(rprec), (), None, rprec)
    square = Fraction(2 * m - 1) / mu if exact else None
    root = sc.exact_sqrt(square) if exact else None
    if root is not None:
        factors = ((root, Fraction(m)), (-root, Fraction(m)))
        return lam, s, ClosedForm(Poly.zero(None), factors, None, None)
    p = rprec or prec or get_settings().prec
    ctx = sc.context(p)
    r = ctx.sqrt(sc.convert(2 * m - 1, p) / sc.convert(mu, p))
    factors = ((sc.demote(r), ctx.mpf(m)), (sc.demote(-r), ctx.mpf(m)))
    return lam, s, ClosedForm(Poly.zero(p), factors, None, p)
