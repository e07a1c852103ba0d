"""Ladder values at a point from truncated Taylor series.

Rung j keeps the series of lambda_j and s_j about x0 to order ``depth - j``.
Each rung only loses one order (through the derivative), so the values at x0
are exact through rung ``depth`` while the work stays quadratic in depth.
"""

import logging
from typing import Any, List, Tuple

from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import series_quotient
from aimkit.numcore.ratfun import ParamRatFun

logger = logging.getLogger(__name__)


def taylor_coefficients(r: ParamRatFun, x0: Any, order: int, prec: int) -> List[Any]:
    """Coefficients of r(x0 + t) in t, powers 0..order.

    Raises:
        ZeroDivisionError: If x0 is a pole of ``r``.
    """
    if r.has_E():
        raise ValueError("substitute E before expanding in x")
    r = r.to_prec(prec) if r.prec is None or r.prec < prec else r
    num = r.num.shift(x0).scalar_coeffs() or [sc.zero(prec)]
    den = r.den.shift(x0).scalar_coeffs()
    if r.is_polynomial():
        d = den[0]
        out = [c / d for c in num[: order + 1]]
        return out + [sc.zero(prec)] * (order + 1 - len(out))
    return series_quotient(num, den, order + 1)


def _sparse(series: List[Any]) -> List[Tuple[int, Any]]:
    return [(i, c) for i, c in enumerate(series) if c != 0]


class TaylorLadder:
    """Values (lambda_j(x0), s_j(x0)) for j = 0..depth.

    ``bounds()`` runs the same recursion on absolute values, which bounds the
    magnitude of every term summed into a rung. Comparing a value with its
    bound shows how many bits cancellation has cost.
    """

    def __init__(self, lambda0: ParamRatFun, s0: ParamRatFun, x0: Any, depth: int, prec: int):
        self.prec = prec
        self.depth = depth
        self.x0 = sc.convert(x0, prec)
        self._lambda0 = taylor_coefficients(lambda0, self.x0, depth, prec)
        self._s0 = taylor_coefficients(s0, self.x0, depth, prec)

    def _run(self, lam: List[Any], s: List[Any]) -> List[Tuple[Any, Any]]:
        lam0 = _sparse(lam)
        s0 = _sparse(s)
        lam, s = list(lam), list(s)
        out = [(lam[0], s[0])]
        for j in range(1, self.depth + 1):
            size = self.depth - j + 1
            new_lam = []
            new_s = []
            for k in range(size):
                a = (k + 1) * lam[k + 1] + s[k]
                b = (k + 1) * s[k + 1]
                for i, c in lam0:
                    if i > k:
                        break
                    a += c * lam[k - i]
                for i, c in s0:
                    if i > k:
                        break
                    b += c * lam[k - i]
                new_lam.append(a)
                new_s.append(b)
            lam, s = new_lam, new_s
            out.append((lam[0], s[0]))
        return out

    def values(self) -> List[Tuple[Any, Any]]:
        """Pairs (lambda_j(x0), s_j(x0)); index j is the rung."""
        return self._run(self._lambda0, self._s0)

    def bounds(self) -> List[Tuple[Any, Any]]:
        """Running magnitude bounds for the pairs returned by ``values``."""
        return self._run([abs(c) for c in self._lambda0], [abs(c) for c in self._s0])

    def deltas(self) -> List[Any]:
        """delta_j(x0) for j = 0..depth, with lambda_{-1} = 1 and s_{-1} = 0."""
        vals = self.values()
        prev = (sc.one(self.prec), sc.zero(self.prec))
        out = []
        for lam, s in vals:
            out.append(lam * prev[1] - prev[0] * s)
            prev = (lam, s)
        return out
