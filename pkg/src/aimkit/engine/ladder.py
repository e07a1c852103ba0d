"""The iteration ladder for y'' = lambda0 y' + s0 y.

Rung n carries (lambda_n, s_n) together with the previous rung's pair. Rung 0
uses lambda_{-1} = 1 and s_{-1} = 0, which makes the recursion reproduce
(lambda0, s0) and gives delta_0 = -s0.
"""

import functools
import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from aimkit.errors import DegenerateLadderError, DegreeBoundExceeded
from aimkit.numcore import scalar as sc
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.numcore.scalar import Prec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AimProblem:
    """Coefficients of y'' = lambda0 y' + s0 y and the arithmetic mode.

    ``prec=None`` is exact-rational mode. A float coefficient forces float
    mode at its own precision unless ``prec`` says otherwise.
    """

    lambda0: ParamRatFun
    s0: ParamRatFun
    prec: Prec = None

    def __post_init__(self):
        prec = self.prec
        if prec is None:
            prec = sc.join_prec(self.lambda0.prec, self.s0.prec)
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "lambda0", self.lambda0.to_prec(prec))
        object.__setattr__(self, "s0", self.s0.to_prec(prec))
        if self.lambda0.is_zero():
            raise DegenerateLadderError("lambda0 is identically zero")

    @classmethod
    def constant(cls, lambda0, s0, prec: Prec = None) -> "AimProblem":
        return cls(ParamRatFun.constant(lambda0, prec), ParamRatFun.constant(s0, prec), prec)

    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_constant(self) -> bool:
        return self.lambda0.is_constant() and self.s0.is_constant()

    def has_E(self) -> bool:
        return self.lambda0.has_E() or self.s0.has_E()

    def substitute_E(self, value) -> "AimProblem":
        return AimProblem(self.lambda0.substitute_E(value), self.s0.substitute_E(value), self.prec)


@dataclass(frozen=True)
class AimState:
    n: int
    lambda_n: ParamRatFun
    s_n: ParamRatFun
    lambda_prev: ParamRatFun
    s_prev: ParamRatFun

    @functools.cached_property
    def delta(self) -> ParamRatFun:
        """delta_n = lambda_n s_{n-1} - lambda_{n-1} s_n."""
        return self.lambda_n * self.s_prev - self.lambda_prev * self.s_n

    @functools.cached_property
    def alpha(self) -> ParamRatFun:
        """alpha_n = s_{n-1} / lambda_{n-1}."""
        if self.lambda_prev.is_zero():
            raise DegenerateLadderError(f"lambda_{self.n - 1} vanishes identically")
        return self.s_prev / self.lambda_prev

    @functools.cached_property
    def alpha_next(self) -> ParamRatFun:
        """alpha_{n+1} = s_n / lambda_n."""
        if self.lambda_n.is_zero():
            raise DegenerateLadderError(f"lambda_{self.n} vanishes identically")
        return self.s_n / self.lambda_n

    @functools.cached_property
    def perturbation(self) -> ParamRatFun:
        """Delta_n = delta_n / lambda_{n-1}^2."""
        if self.lambda_prev.is_zero():
            raise DegenerateLadderError(f"lambda_{self.n - 1} vanishes identically")
        return self.delta / (self.lambda_prev * self.lambda_prev)

    @property
    def terminated(self) -> bool:
        return self.delta.is_zero()

    @property
    def degree(self) -> int:
        return max(self.lambda_n.num.degree, self.lambda_n.den.degree, self.s_n.num.degree, self.s_n.den.degree)


def initial_state(problem: AimProblem) -> AimState:
    prec = problem.prec
    return AimState(
        0,
        problem.lambda0,
        problem.s0,
        ParamRatFun.constant(1, prec),
        ParamRatFun.constant(0, prec),
    )


def aim_step(problem: AimProblem, state: AimState) -> AimState:
    """One rung up: lambda_{n+1} = lambda_n' + s_n + lambda0 lambda_n, s_{n+1} = s_n' + s0 lambda_n."""
    if state.n < 0:
        raise ValueError(f"ladder index must be nonnegative, got {state.n}")
    lam = state.lambda_n.differentiate() + state.s_n + problem.lambda0 * state.lambda_n
    s = state.s_n.differentiate() + problem.s0 * state.lambda_n
    return AimState(state.n + 1, lam, s, state.lambda_n, state.s_n)


def matrix_step(problem: AimProblem, pair: Tuple[ParamRatFun, ParamRatFun]) -> Tuple[ParamRatFun, ParamRatFun]:
    """Apply d/dx + [[lambda0, 1], [s0, 0]] to the column (lambda, s)."""
    lam, s = pair
    return (
        lam.differentiate() + (problem.lambda0 * lam + s),
        s.differentiate() + problem.s0 * lam,
    )


def delta(state_n: AimState, state_prev: AimState) -> ParamRatFun:
    """delta_n from two neighbouring rungs."""
    if state_n.n - state_prev.n != 1:
        raise ValueError(f"rungs {state_n.n} and {state_prev.n} are not neighbours")
    return state_n.lambda_n * state_prev.s_n - state_prev.lambda_n * state_n.s_n


def alpha(state: AimState) -> ParamRatFun:
    return state.alpha


def perturbation(state: AimState) -> ParamRatFun:
    return state.perturbation


def ladder(problem: AimProblem, degree_bound: Optional[int] = None) -> Iterator[AimState]:
    """Endless ladder from rung 0, guarded by a polynomial degree bound."""
    state = initial_state(problem)
    while True:
        if degree_bound is not None and state.degree > degree_bound:
            raise DegreeBoundExceeded(state.n, state.degree, degree_bound)
        yield state
        state = aim_step(problem, state)


def climb(problem: AimProblem, n: int, degree_bound: Optional[int] = None) -> AimState:
    """The state at rung ``n``."""
    for state in ladder(problem, degree_bound):
        if state.n == n:
            return state
    raise AssertionError("unreachable")


def climb_history(problem: AimProblem, n: int, degree_bound: Optional[int] = None) -> List[AimState]:
    """Rungs 0..n, all retained."""
    out = []
    for state in ladder(problem, degree_bound):
        out.append(state)
        if state.n == n:
            return out
    raise AssertionError("unreachable")
