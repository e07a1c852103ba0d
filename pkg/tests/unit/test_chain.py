"""Unit tests for the chain module."""

from fractions import Fraction

import pytest
from aimkit.chain import (
    chain_link,
    hermite_chain,
    hermite_normalization,
    hermite_polynomial,
    hermite_problem,
    inverted_power_family,
    power_family,
    quadratic_family,
    residual,
    sample_points,
    terminates_at,
)
from aimkit.engine.ladder import AimProblem
from aimkit.errors import DegenerateLadderError
from aimkit.numcore import parse_expr
from aimkit.numcore.poly import Poly
from aimkit.numcore.ratfun import ParamRatFun
from aimkit.numcore.special import hermite
from aimkit.settings import get_settings

ZERO = ParamRatFun.constant(0)


@pytest.mark.unit
def test_sample_points_are_reproducible():
    """Test that sample points are exact, seeded and inside the interval."""
    points = sample_points()
    assert points == sample_points()
    assert len(points) == get_settings().sample_points
    assert all(isinstance(p, Fraction) for p in points)
    lo, hi = get_settings().sample_interval
    assert all(lo <= p <= hi for p in points)
    assert len(sample_points(count=3)) == 3


@pytest.mark.unit
def test_first_link_of_hermite_ladder():
    """Test Delta_1 = eta(eta - mu)/(mu^2 x^2) for mu = 2, eta = 5."""
    link = chain_link(AimProblem(parse_expr("2*x"), parse_expr("-5")), 1)
    assert (link.perturb - parse_expr("15/(4*x^2)")).is_zero()


@pytest.mark.unit
def test_second_link_of_hermite_ladder():
    """Test Delta_2 = eta(mu - eta)(2mu - eta)/(mu^2 x^2 + mu - eta)^2 for mu = 2, eta = 5."""
    link = chain_link(AimProblem(parse_expr("2*x"), parse_expr("-5")), 2)
    assert (link.perturb - parse_expr("15/(4*x^2 - 3)^2")).is_zero()


@pytest.mark.unit
def test_chain_residuals_are_small():
    """Test that every link's closed form solves its perturbed equation."""
    problem = AimProblem(parse_expr("2*x"), parse_expr("-5"))
    points = sample_points()
    for n in range(1, 6):
        link = chain_link(problem, n, 256)
        assert link.level == n
        assert link.residual(points) < 1e-40


@pytest.mark.unit
def test_absorbed_problem_is_solved():
    """Test that y_n solves y'' = lambda0 y' + (s0 + Delta_n) y."""
    link = chain_link(AimProblem(parse_expr("2*x"), parse_expr("1 - x^2")), 2, 256)
    absorbed = link.absorbed()
    assert residual(absorbed.lambda0, absorbed.s0, ZERO, link.solution, sample_points()) < 1e-40


@pytest.mark.unit
def test_chain_link_validation():
    """Test the argument checks."""
    problem = AimProblem(parse_expr("2*x"), parse_expr("-5"))
    with pytest.raises(ValueError):
        chain_link(problem, 0)
    with pytest.raises(ValueError):
        chain_link(AimProblem(parse_expr("2*x"), parse_expr("1 - E", mode="eigen")), 1)
    with pytest.raises(DegenerateLadderError):
        chain_link(AimProblem.constant(2, -2), 3)


@pytest.mark.unit
def test_terminates_at():
    """Test delta_m = 0 exactly for s0 = -m mu."""
    problem = hermite_problem(2, 3)
    assert not terminates_at(problem, 2)
    assert terminates_at(problem, 3)
    assert terminates_at(problem, 5)


@pytest.mark.unit
@pytest.mark.parametrize("m", range(11))
def test_hermite_chain_terminates(m):
    """Test the Hermite chain for m <= 10 against H_m."""
    poly, verdict = hermite_chain(2, m)
    assert verdict
    assert poly.scale(hermite_normalization(2, m)) == hermite(m)


@pytest.mark.unit
def test_hermite_chain_scaled_argument():
    """Test H_m(2x) = c P(x) for mu = 8."""
    for m in range(7):
        poly, verdict = hermite_chain(8, m)
        assert verdict
        h = hermite(m).scalar_coeffs()
        stretched = Poly.from_scalars([c * 2 ** k for k, c in enumerate(h)])
        assert poly.scale(hermite_normalization(8, m)) == stretched


@pytest.mark.unit
def test_hermite_normalization_irrational():
    """Test the float normalization when sqrt(mu/2) is irrational."""
    value = hermite_normalization(3, 3, 128)
    assert abs(value - 8 * (1.5 ** 1.5)) < 1e-12
    assert hermite_normalization(3, 2) == Fraction(6)


@pytest.mark.unit
def test_hermite_polynomial_is_monic():
    """Test the recurrence for the chain polynomial."""
    p = hermite_polynomial(Fraction(2), 4)
    assert p.scalar_coeffs()[-1] == 1
    assert p.degree == 4


@pytest.mark.unit
def test_hermite_chain_validation():
    """Test that m and mu are checked."""
    with pytest.raises(ValueError):
        hermite_chain(2, -1)
    with pytest.raises(ValueError):
        hermite_chain(0, 2)


@pytest.mark.unit
@pytest.mark.parametrize("m", [1, 2, 3, 5])
def test_power_family_exact(m):
    """Test that u = x^m solves its equation exactly."""
    lam, s, form = power_family(2, m)
    assert residual(lam, s, ZERO, form, sample_points()) == 0


@pytest.mark.unit
@pytest.mark.parametrize("m", [1, 2, 4])
def test_inverted_power_family_exact(m):
    """Test that v = x^(-m) solves its equation exactly."""
    lam, s, form = inverted_power_family(3, m)
    assert residual(lam, s, ZERO, form, sample_points()) == 0


@pytest.mark.unit
def test_quadratic_family_exact_roots():
    """Test y = (x^2 - 9)^5 for mu = 1, m = 5."""
    lam, s, form = quadratic_family(1, 5)
    assert form.prec is None
    assert sorted(root for root, _ in form.factors) == [-3, 3]
    assert residual(lam, s, ZERO, form, sample_points()) == 0


@pytest.mark.unit
def test_quadratic_family_float_roots():
    """Test y = (2x^2 - 3)^2 for mu = 2, m = 2."""
    lam, s, form = quadratic_family(2, 2, 256)
    assert form.prec == 256
    assert residual(lam, s, ZERO, form, sample_points()) < 1e-40


@pytest.mark.unit
def test_quadratic_family_m_zero():
    """Test that m = 0 gives the constant solution."""
    lam, s, form = quadratic_family(2, 0)
    assert form.factors == ()
    assert residual(lam, s, ZERO, form, sample_points()) == 0


@pytest.mark.unit
@pytest.mark.parametrize("mu, eta", [(2, 5), (Fraction(3, 2), Fraction(7, 3))])
def test_third_link_of_hermite_ladder(mu, eta):
    """Test Delta_3 = eta(eta - mu)(eta - 2mu)(eta - 3mu)/(mu^2 x^2 (3mu - 2eta + mu^2 x^2)^2)."""
    x = ParamRatFun.x()
    link = chain_link(AimProblem(mu * x, ParamRatFun.constant(-eta)), 3)
    want = (
        ParamRatFun.constant(eta * (eta - mu) * (eta - 2 * mu) * (eta - 3 * mu))
        / (mu * mu * x * x * (3 * mu - 2 * eta + mu * mu * x * x) ** 2)
    )
    assert (link.perturb - want).is_zero()


@pytest.mark.unit
def test_third_link_for_mu_2_eta_5():
    """Test Delta_3 = -15/(4 x^2 (4 x^2 - 4)^2) for mu = 2, eta = 5."""
    link = chain_link(AimProblem(parse_expr("2*x"), parse_expr("-5")), 3)
    assert (link.perturb - parse_expr("-15/(4*x^2*(4*x^2 - 4)^2)")).is_zero()


@pytest.mark.unit
def test_no_termination_for_half_integer_eta():
    """Test that s0 = -5/2 with mu = 1 never terminates."""
    problem = hermite_problem(1, Fraction(5, 2))
    for level in range(1, 7):
        assert not terminates_at(problem, level)
