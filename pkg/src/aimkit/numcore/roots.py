"""Polynomial roots and partial fractions at working precision.

Roots come from an Aberth simultaneous iteration seeded by a double-precision
``numpy.roots`` pass. Nearby roots are clustered into one root with a
multiplicity and re-polished on the matching derivative.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any, List, Sequence, Tuple

import numpy as np

from aimkit.errors import RootFindingError
from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import Poly, series_quotient
from aimkit.numcore.ratfun import ParamRatFun

logger = logging.getLogger(__name__)

MAX_SWEEPS = 300
POLISH_STEPS = 200


def _horner(coeffs: Sequence[Any], z: Any) -> Tuple[Any, Any]:
    """Value and first derivative; ``coeffs`` highest power first."""
    p = coeffs[0]
    dp = 0 * z
    for c in coeffs[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _derivative_desc(coeffs: Sequence[Any], order: int) -> List[Any]:
    out = list(coeffs)
    for _ in range(order):
        n = len(out) - 1
        out = [c * (n - k) for k, c in enumerate(out[:-1])]
    return out


def _seeds(coeffs: Sequence[Any], prec: int) -> List[Any]:
    ctx = sc.context(prec)
    n = len(coeffs) - 1
    try:
        approx = np.roots(np.array([complex(c) for c in coeffs], dtype=np.complex128))
        if len(approx) == n and np.all(np.isfinite(approx)):
            return [ctx.mpc(complex(z)) for z in approx]
    except (OverflowError, ValueError, np.linalg.LinAlgError):
        pass
    logger.debug("double-precision seeding failed; using a Cauchy-bound circle")
    lead = abs(coeffs[0])
    radius = 1 + max(abs(c) for c in coeffs[1:]) / lead
    return [ctx.mpc(radius * cmath.exp(2j * math.pi * (k + 0.25) / n)) for k in range(n)]


def _aberth(coeffs: Sequence[Any], prec: int) -> List[Any]:
    ctx = sc.context(prec)
    n = len(coeffs) - 1
    z = _seeds(coeffs, prec)
    done = [False] * n
    step_tol = ctx.ldexp(ctx.mpf(1), -(prec - 10))
    cluster_tol = ctx.ldexp(ctx.mpf(1), -(prec // 4))
    for sweep in range(MAX_SWEEPS):
        for i in range(n):
            if done[i]:
                continue
            p, dp = _horner(coeffs, z[i])
            if p == 0:
                done[i] = True
                continue
            if dp == 0:
                z[i] += cluster_tol * (1 + abs(z[i]))
                continue
            ratio = p / dp
            s = sum((1 / (z[i] - z[j]) for j in range(n) if j != i and z[i] != z[j]), ctx.mpc(0))
            w = ratio / (1 - ratio * s)
            z[i] -= w
            if abs(w) <= step_tol * max(abs(z[i]), ctx.mpf(1)):
                done[i] = True
        if all(done):
            break
        pending = [i for i in range(n) if not done[i]]
        scale = max(max(abs(v) for v in z), ctx.mpf(1))
        if all(any(j != i and abs(z[i] - z[j]) <= cluster_tol * scale for j in range(n)) for i in pending):
            logger.debug("aberth stopped after %d sweeps with %d clustered roots", sweep + 1, len(pending))
            break
    else:
        raise RootFindingError(f"aberth iteration did not converge in {MAX_SWEEPS} sweeps at {prec} bits")
    return z


def _cluster(z: List[Any], prec: int) -> List[List[Any]]:
    ctx = sc.context(prec)
    scale = max((abs(v) for v in z), default=ctx.mpf(0))
    if scale == 0:
        scale = ctx.mpf(1)
    tol = ctx.ldexp(ctx.mpf(1), -(prec // 4)) * scale
    groups: List[List[Any]] = []
    for v in z:
        for g in groups:
            if any(abs(v - u) <= tol for u in g):
                g.append(v)
                break
        else:
            groups.append([v])
    return groups


def _polish(coeffs: Sequence[Any], z: Any, multiplicity: int, prec: int) -> Any:
    """Newton on the (m-1)-th derivative, where an m-fold root is simple."""
    ctx = sc.context(prec)
    work = _derivative_desc(coeffs, multiplicity - 1)
    tol = ctx.ldexp(ctx.mpf(1), -(prec - 10))
    for _ in range(POLISH_STEPS):
        p, dp = _horner(work, z)
        if p == 0 or dp == 0:
            break
        step = p / dp
        z -= step
        if abs(step) <= tol * max(abs(z), ctx.mpf(1)):
            break
    return z


def poly_roots(p: Poly, prec: int) -> List[Tuple[Any, int]]:
    """All complex roots of an E-free polynomial with their multiplicities.

    Args:
        p: Polynomial with numeric coefficients.
        prec: Working precision in bits.

    Returns:
        ``(root, multiplicity)`` pairs sorted by real then imaginary part.

    Raises:
        ValueError: If ``p`` is zero, constant, or still depends on E.
        RootFindingError: If the simultaneous iteration does not converge.
    """
    if p.is_zero():
        raise ValueError("the zero polynomial has no isolated roots")
    if p.degree < 1:
        raise ValueError("polynomial degree must be at least 1")
    ascending = [sc.convert(c, prec) for c in p.scalar_coeffs()]
    real_input = not any(sc.is_complex(c) for c in ascending)
    zeros = 0
    while ascending[0] == 0:
        ascending.pop(0)
        zeros += 1
    coeffs = list(reversed(ascending))
    ctx = sc.context(prec)
    found: List[Tuple[Any, int]] = []
    if zeros:
        found.append((ctx.mpf(0), zeros))
    if len(coeffs) == 2:
        found.append((sc.demote(ctx.mpc(-coeffs[1] / coeffs[0])), 1))
    elif len(coeffs) > 2:
        approx = _aberth(coeffs, prec)
        for group in _cluster(approx, prec):
            m = len(group)
            z = sum(group, ctx.mpc(0)) / m
            if m > 1:
                z = _polish(coeffs, z, m, prec)
            found.append((z, m))
    cleaned = []
    snap = sc.tolerance(prec, 2)
    for z, m in found:
        if real_input and hasattr(z, "_mpc_") and abs(z.imag) <= snap * max(abs(z), ctx.mpf(1)):
            z = ctx.mpf(z.real)
        cleaned.append((sc.demote(z), m))
    cleaned.sort(key=lambda t: (float(ctx.re(t[0])), float(ctx.im(t[0]))))
    return cleaned


@dataclass(frozen=True)
class Pole:
    """A pole at ``location``; ``residues[k]`` multiplies ``1/(x - location)^(k+1)``."""

    location: Any
    multiplicity: int
    residues: Tuple[Any, ...]


@dataclass(frozen=True)
class PoleDecomposition:
    polynomial_part: Poly
    poles: Tuple[Pole, ...] = field(default_factory=tuple)

    def evaluate(self, x: Any) -> Any:
        if sc.is_exact(x):
            x = sc.convert(x, self.polynomial_part.prec)
        value = self.polynomial_part.evaluate(x)
        for pole in self.poles:
            t = x - pole.location
            for k, c in enumerate(pole.residues, start=1):
                value += c / t ** k
        return value


def partial_fractions(r: ParamRatFun, prec: int) -> PoleDecomposition:
    """Polynomial part plus principal parts at every pole of ``r``.

    Raises:
        ValueError: If ``r`` depends on E.
        RootFindingError: If the denominator's roots cannot be resolved.
    """
    if r.has_E():
        raise ValueError("substitute E before taking partial fractions")
    r = r.to_prec(prec) if r.prec is None or r.prec < prec else r
    quotient, remainder = r.num.divmod(r.den)
    if r.den.degree == 0 or remainder.is_zero():
        return PoleDecomposition(quotient, ())
    roots = poly_roots(r.den, prec)
    lead = r.den.leading().constant_term()
    poles = []
    for i, (a, m) in enumerate(roots):
        others = Poly.constant(lead, prec)
        for j, (b, mb) in enumerate(roots):
            if j != i:
                others = others * Poly.from_scalars([-b, 1], prec) ** mb
        h_num = remainder.shift(a).scalar_coeffs()
        h_den = others.shift(a).scalar_coeffs()
        h = series_quotient(h_num, h_den, m)
        residues = tuple(sc.demote(h[m - k]) for k in range(1, m + 1))
        poles.append(Pole(a, m, residues))
    return PoleDecomposition(quotient, tuple(poles))
