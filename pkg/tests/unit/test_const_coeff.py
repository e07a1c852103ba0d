"""Unit tests for the const_coeff module."""

from fractions import Fraction

import numpy as np
import pytest
from aimkit.const_coeff import (
    DistinctModuli,
    DoubleRoot,
    EqualModuliDistinct,
    burchnall_check,
    burchnall_sign,
    casoratian,
    char_roots,
    classify,
    closed_form_sequences,
    complex_family,
    equal_moduli_alpha,
    matrix_power_sequences,
    perturbation_decay,
    substitution_residual,
)
from aimkit.engine.ladder import AimProblem, climb, climb_history
from aimkit.errors import OscillationSingularity
from aimkit.numcore import scalar as sc
from aimkit.numcore.poly import Poly

PREC = 256


@pytest.mark.unit
def test_char_roots_exact():
    """Test rational roots ordered by modulus."""
    assert char_roots(3, -2) == (2, 1)
    assert char_roots(5, -6) == (3, 2)
    assert char_roots(-1, 2) == (-2, 1)


@pytest.mark.unit
def test_classify_variants():
    """Test the three classes on exact input."""
    assert classify(3, -2) == DistinctModuli(Fraction(2), Fraction(1))
    assert classify(2, -1) == DoubleRoot(Fraction(1))
    cls = classify(2, -2)
    assert isinstance(cls, EqualModuliDistinct)
    ctx = sc.context(PREC)
    assert abs(cls.theta - ctx.pi / 4) < sc.tolerance(PREC, 2)
    assert abs(cls.r - ctx.sqrt(2)) < sc.tolerance(PREC, 2)


@pytest.mark.unit
def test_classify_float_equal_moduli():
    """Test lambda0 = 2 cos(pi/8), s0 = -1 with roots exp(+-i pi/8)."""
    ctx = sc.context(PREC)
    cls = classify(2 * ctx.cos(ctx.pi / 8), -1)
    assert cls.variant == "EqualModuliDistinct"
    assert abs(cls.theta - ctx.pi / 8) < sc.tolerance(PREC, 4)
    assert abs(cls.r - 1) < sc.tolerance(PREC, 4)


@pytest.mark.unit
def test_closed_forms_match_ladder():
    """Test closed-form and companion-matrix sequences against the ladder for n <= 50."""
    for lambda0, s0 in ((3, -2), (5, -6), (2, -1)):
        for state in climb_history(AimProblem.constant(lambda0, s0), 50):
            lam, s = state.lambda_n.constant_value(), state.s_n.constant_value()
            assert closed_form_sequences(lambda0, s0, state.n) == (lam, s)
            assert matrix_power_sequences(lambda0, s0, state.n) == (lam, s)


@pytest.mark.unit
def test_closed_form_sequences_negative_index():
    """Test that negative rungs are refused."""
    with pytest.raises(ValueError):
        closed_form_sequences(3, -2, -1)


@pytest.mark.unit
def test_casoratian():
    """Test delta_n = (-s0)^(n+1) on the ladder."""
    for state in climb_history(AimProblem.constant(3, -2), 12):
        assert state.delta.constant_value() == casoratian(3, -2, state.n)


@pytest.mark.unit
def test_double_root_perturbation_bound():
    """Test that n^2 Delta_n stays bounded for the double root r = 1."""
    decay = perturbation_decay(2, -1, range(1, 201))
    assert decay[0] == Fraction(1, 4)
    assert all(d == Fraction(1, (n + 1) ** 2) for n, d in enumerate(decay, start=1))
    assert max(n * n * d for n, d in enumerate(decay, start=1)) <= 1


@pytest.mark.unit
def test_perturbation_decay_validation():
    """Test the range checks."""
    with pytest.raises(ValueError):
        perturbation_decay(3, -2, range(0))
    with pytest.raises(ValueError):
        perturbation_decay(3, -2, range(0, 3))


@pytest.mark.unit
def test_equal_moduli_constant_subsequence():
    """Test alpha_{4k+1} = -1 exactly for lambda0 = 2, s0 = -2."""
    problem = AimProblem.constant(2, -2)
    cls = classify(2, -2)
    for k in range(8):
        assert climb(problem, 4 * k).alpha_next.constant_value() == -1
        assert equal_moduli_alpha(cls.r, cls.theta, Fraction(-2), Fraction(2), 4 * k) == -1
    assert climb(problem, 5).alpha_next.constant_value() == -2


@pytest.mark.unit
def test_equal_moduli_alpha_matches_ladder():
    """Test the oscillating closed form against the float ladder."""
    ctx = sc.context(PREC)
    lambda0 = 2 * ctx.cos(ctx.pi / 8)
    cls = classify(lambda0, -1)
    problem = AimProblem.constant(lambda0, -1, PREC)
    for n in (1, 2, 3, 5, 9, 13):
        want = climb(problem, n).alpha_next.constant_value()
        got = equal_moduli_alpha(cls.r, cls.theta, -1, lambda0, n)
        assert abs(got - want) < sc.tolerance(PREC, 4) * max(abs(want), 1)


@pytest.mark.unit
def test_equal_moduli_alpha_for_rotated_roots():
    """Test equal-modulus roots 2 and 2i, which are not a conjugate pair."""
    ctx = sc.context(PREC)
    lambda0, s0 = ctx.mpc(2, 2), ctx.mpc(0, -4)
    cls = classify(lambda0, s0)
    assert cls.variant == "EqualModuliDistinct"
    assert abs(cls.r - 2) < sc.tolerance(PREC, 4)
    problem = AimProblem.constant(lambda0, s0, PREC)
    # lambda_n = (1 + i) 2^n (i^n + 1) vanishes at n = 2 mod 4
    for n in (1, 3, 4, 5, 7, 9, 11):
        want = climb(problem, n).alpha_next.constant_value()
        got = equal_moduli_alpha(cls.r, cls.theta, s0, lambda0, n)
        assert abs(got - want) < sc.tolerance(PREC, 4) * max(abs(want), 1)
    with pytest.raises(OscillationSingularity):
        equal_moduli_alpha(cls.r, cls.theta, s0, lambda0, 2)


@pytest.mark.unit
def test_equal_moduli_alpha_rejects_wrong_modulus():
    """Test that a modulus the roots do not have is refused."""
    ctx = sc.context(PREC)
    with pytest.raises(ValueError, match="modulus"):
        equal_moduli_alpha(3, ctx.pi / 4, ctx.mpc(0, -4), ctx.mpc(2, 2), 3)


@pytest.mark.unit
def test_complex_family_converges_to_exp_minus_2x():
    """Test that alpha_n tends to 2 for a = b = 2, reproducing exp(-2x)."""
    problem = complex_family(2, 2, PREC)
    alpha = climb(problem, 60).alpha.constant_value()
    assert abs(alpha - 2) < 1e-8
    lambda0 = problem.lambda0.constant_value()
    s0 = problem.s0.constant_value()
    assert substitution_residual(lambda0, s0, -alpha) < 1e-7
    assert substitution_residual(lambda0, s0, lambda0 + alpha) < 1e-7
    assert substitution_residual(lambda0, s0, 2) > 1


@pytest.mark.unit
def test_complex_family_roots():
    """Test the characteristic roots 2 + 2i and -2."""
    problem = complex_family(2, 2, PREC)
    cls = classify(problem.lambda0.constant_value(), problem.s0.constant_value())
    assert isinstance(cls, DistinctModuli)
    assert abs(cls.r1 - sc.context(PREC).mpc(2, 2)) < sc.tolerance(PREC, 4)
    assert abs(cls.r2 + 2) < sc.tolerance(PREC, 4)


@pytest.mark.unit
def test_burchnall_sign_rule():
    """Test that the resolved sign rule is (-1)^(m-k)."""
    assert burchnall_sign() == "(-1)^(m-k)"


@pytest.mark.unit
@pytest.mark.parametrize("m", range(7))
def test_burchnall_identity_on_random_polynomials(m):
    """Test the operator identity on 20 integer polynomials of degree <= 5."""
    rng = np.random.default_rng(7 + m)
    for _ in range(20):
        coeffs = [int(c) for c in rng.integers(-9, 10, size=int(rng.integers(1, 7)))]
        assert burchnall_check(m, Poly.from_scalars(coeffs))


@pytest.mark.unit
@pytest.mark.parametrize("m", [9, 12])
def test_burchnall_identity_at_high_powers(m):
    """Test the identity up to the largest supported power."""
    assert burchnall_check(m, Poly.from_scalars([3, -1, 0, 2]))


@pytest.mark.unit
def test_burchnall_check_validation():
    """Test the range and exactness checks."""
    with pytest.raises(ValueError):
        burchnall_check(13, Poly.from_scalars([1]))
    with pytest.raises(ValueError):
        burchnall_check(2, Poly.from_scalars([1, 2], PREC))
