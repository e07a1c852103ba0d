"""Unit tests for the eigen solver module."""

from fractions import Fraction

import pytest
from aimkit.eigen import (
    EigenProblem,
    delta_at,
    find_root,
    first_approximation,
    reduce_potential,
    reduce_schrodinger,
    scan_brackets,
)
from aimkit.eigen.solver import _perturbation, metric_at, stable_digits
from aimkit.errors import BracketNotFoundError
from aimkit.chain import sample_points
from aimkit.numcore import parse_expr
from aimkit.numcore import scalar as sc

PREC = 256


@pytest.mark.unit
def test_reduce_schrodinger():
    """Test lambda0 = 2x and s0 = 1 - E + A x^4."""
    problem = reduce_schrodinger(Fraction(1, 10), prec=PREC)
    assert (problem.lambda0 - parse_expr("2*x")).is_zero()
    assert (problem.s0 - parse_expr("1 - E + (1/10)*x^4", mode="eigen")).is_zero()
    assert problem.x0 == Fraction(1, 10000)
    assert problem.prec == PREC


@pytest.mark.unit
def test_reduce_potential_harmonic():
    """Test that V = x^2 reduces to s0 = 1 - E."""
    problem = reduce_potential(parse_expr("x^2"), prec=PREC)
    assert (problem.s0 - parse_expr("1 - E", mode="eigen")).is_zero()
    assert problem.A is None


@pytest.mark.unit
def test_reduce_rejects_bad_input():
    """Test negative couplings and non-polynomial potentials."""
    with pytest.raises(ValueError):
        reduce_schrodinger(-1)
    with pytest.raises(ValueError):
        reduce_potential(parse_expr("1/x"))
    with pytest.raises(ValueError):
        EigenProblem(None, Fraction(0), PREC, parse_expr("2*x"), parse_expr("1 - E", mode="eigen"))


@pytest.mark.unit
def test_default_precision():
    """Test that the eigen precision is the default."""
    assert reduce_schrodinger(0).prec == 512
    assert reduce_schrodinger(0).with_prec(1024).prec == 1024


@pytest.mark.unit
def test_first_perturbation_value():
    """Test Delta_1(x0, E) against its closed form at E = 2."""
    A, x0, E = Fraction(1, 10), Fraction(1, 10000), Fraction(2)
    expected = ((E - 3) * (E - 1) - 2 * A * (E + 2) * x0 ** 4 + A * A * x0 ** 8) / (4 * x0 * x0)
    value = delta_at(reduce_schrodinger(A, prec=PREC), E, 1)
    want = sc.convert(expected, PREC)
    assert abs(value - want) <= sc.tolerance(PREC, 4) * abs(want)


@pytest.mark.unit
def test_delta_at_requires_positive_rung():
    """Test the rung check."""
    with pytest.raises(ValueError):
        delta_at(reduce_schrodinger(0, prec=PREC), 1, 0)


@pytest.mark.unit
def test_scan_isolates_first_two_levels():
    """Test sign changes of Delta_1 near E = 1 and E = 3."""
    problem = reduce_schrodinger(Fraction(1, 10), prec=PREC)
    brackets = scan_brackets(problem, n=1, window=(Fraction(1, 2), Fraction(7, 2)), step=Fraction(1, 4))
    assert len(brackets) == 2
    for (lo, hi), level in zip(brackets, (1, 3)):
        assert lo - 1e-10 <= level <= hi + 1e-10


@pytest.mark.unit
def test_find_root_harmonic_ground_state():
    """Test E = 1 for the harmonic oscillator."""
    problem = reduce_schrodinger(0, prec=PREC)
    E = find_root(problem, 20, (Fraction(1, 2), Fraction(3, 2)))
    assert abs(E - 1) < 1e-30


@pytest.mark.unit
@pytest.mark.parametrize("E", [1, 3, 5])
def test_harmonic_levels_are_exact_roots(E):
    """Test that Delta_n vanishes at the harmonic levels and find_root lands there."""
    problem = reduce_schrodinger(0, prec=PREC)
    for n in (3, 10):
        assert abs(delta_at(problem, E, n)) < 1e-30
    root = find_root(problem, 20, (Fraction(2 * E - 1, 2), Fraction(2 * E + 1, 2)))
    assert abs(root - E) < 1e-30


@pytest.mark.unit
def test_harmonic_ground_state_is_exact_zero():
    """Test that s0 = 0 at E = 1 gives Delta_n = 0 exactly."""
    problem = reduce_schrodinger(0, prec=PREC)
    assert delta_at(problem, 1, 1) == 0
    assert delta_at(problem, 1, 10) == 0
    assert find_root(problem, 10, (Fraction(1, 2), Fraction(3, 2))) == 1


@pytest.mark.unit
def test_metric_at_harmonic_level():
    """Test that the convergence metric is zero at E = 1 and large off a level."""
    problem = reduce_schrodinger(0, prec=PREC)
    metric, noise, _ = metric_at(problem, 1, 10)
    assert metric == 0
    assert noise == 0
    off, noise, _ = metric_at(problem, 2, 10)
    assert off > noise
    with pytest.raises(ValueError):
        metric_at(problem, 1, 0)


@pytest.mark.unit
@pytest.mark.parametrize("E", [Fraction(3, 2), Fraction(7, 2)])
def test_doubling_precision_reproduces_delta(E):
    """Test that Delta_n at twice the precision agrees to the former precision."""
    problem = reduce_schrodinger(Fraction(1, 10), prec=PREC)
    value, noise = _perturbation(problem, E, 10)
    finer = delta_at(problem.with_prec(2 * PREC), E, 10)
    assert abs(finer - value) <= max(4 * noise, abs(value) * sc.tolerance(PREC, 2))


@pytest.mark.unit
def test_find_root_without_sign_change():
    """Test that a bracket without a root is refused."""
    problem = reduce_schrodinger(0, prec=PREC)
    with pytest.raises(BracketNotFoundError):
        find_root(problem, 1, (Fraction(3, 2), Fraction(5, 2)))


@pytest.mark.unit
def test_degenerate_bracket():
    """Test that (E, E) is returned as is."""
    problem = reduce_schrodinger(0, prec=PREC)
    assert find_root(problem, 5, (Fraction(1), Fraction(1))) == 1


@pytest.mark.unit
def test_first_approximation():
    """Test y = x^((E-1)/2) exp(-A x^4/8) at E = 3/2, A = 1/10."""
    link = first_approximation(Fraction(1, 10), Fraction(3, 2), PREC)
    assert link.level == 1
    (root, exponent), = link.solution.factors
    assert root == 0
    assert abs(exponent - 0.25) < 1e-60
    assert abs(link.solution.exp_poly.scalar_coeffs()[4] + sc.convert(Fraction(1, 80), PREC)) < 1e-60
    assert link.residual(sample_points()) < 1e-40


@pytest.mark.unit
def test_stable_digits():
    """Test the digit count of agreement between estimates."""
    ctx = sc.context(PREC)
    assert stable_digits(ctx.mpf("1.0000001"), ctx.mpf(1), PREC) == 7
    assert stable_digits(ctx.mpf(3), ctx.mpf(3), PREC) == int(PREC * 0.30102999566398)
    assert stable_digits(ctx.mpf(3), ctx.mpf(5), PREC) == 0
