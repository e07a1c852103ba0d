"""Unit tests for the scalar module."""

from fractions import Fraction

import pytest
from aimkit.numcore import scalar as sc


@pytest.mark.unit
def test_context_is_private():
    """Test that contexts carry their own precision."""
    assert sc.context(128).prec == 128
    assert sc.context(512).prec == 512
    assert sc.context(128) is sc.context(128)


@pytest.mark.unit
def test_context_rejects_tiny_precision():
    """Test that precisions below the minimum are refused."""
    with pytest.raises(ValueError):
        sc.context(16)


@pytest.mark.unit
def test_exactness_flags():
    """Test is_exact and is_complex."""
    assert sc.is_exact(Fraction(1, 3))
    assert sc.is_exact(7)
    assert not sc.is_exact(True)
    assert not sc.is_exact(sc.convert(1, 128))
    assert sc.is_complex(sc.context(128).mpc(1, 2))
    assert not sc.is_complex(Fraction(2))


@pytest.mark.unit
def test_join_prec():
    """Test that exact mode only survives when both sides are exact."""
    assert sc.join_prec(None, None) is None
    assert sc.join_prec(None, 256) == 256
    assert sc.join_prec(512, 256) == 256


@pytest.mark.unit
def test_convert_exact_and_float():
    """Test conversion between exact and float fields."""
    assert sc.convert(3, None) == Fraction(3)
    assert sc.convert("1/10", None) == Fraction(1, 10)
    value = sc.convert(Fraction(1, 3), 256)
    assert sc.prec_of(value) == 256
    assert abs(value * 3 - 1) < sc.tolerance(256, 1) * 4


@pytest.mark.unit
def test_convert_float_to_exact_fails():
    """Test that a float cannot silently become exact."""
    with pytest.raises(TypeError):
        sc.convert(sc.convert(1, 128), None)


@pytest.mark.unit
def test_demote_drops_zero_imaginary_part():
    """Test demote on complex values."""
    ctx = sc.context(128)
    assert not sc.is_complex(sc.demote(ctx.mpc(2, 0)))
    assert sc.is_complex(sc.demote(ctx.mpc(2, 1)))


@pytest.mark.unit
def test_tolerance_and_negligible():
    """Test the precision-relative tolerance."""
    assert sc.tolerance(None) == 0
    assert sc.tolerance(128, 2) == sc.context(128).ldexp(1, -64)
    assert sc.is_negligible(sc.context(128).ldexp(1, -100), 1, 128)
    assert not sc.is_negligible(sc.context(128).ldexp(1, -10), 1, 128)
    assert sc.is_negligible(Fraction(0), 1, None)
    assert not sc.is_negligible(Fraction(1, 10 ** 30), 1, None)


@pytest.mark.unit
def test_exact_sqrt():
    """Test rational square roots."""
    assert sc.exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert sc.exact_sqrt(Fraction(2)) is None
    assert sc.exact_sqrt(Fraction(-4)) is None


@pytest.mark.unit
def test_format_scalar():
    """Test rendering in the input grammar."""
    assert sc.format_scalar(Fraction(15, 4)) == "15/4"
    assert sc.format_scalar(Fraction(-3)) == "-3"
    assert sc.format_scalar(sc.convert(0, 128), 10) == "0"
    text = sc.format_scalar(sc.context(128).mpc(1, -2), 5)
    assert text.endswith("*i")
    assert "e" not in sc.format_scalar(sc.convert(Fraction(1, 10 ** 12), 128), 5)
