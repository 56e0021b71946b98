from fractions import Fraction

import pytest
from hypothesis import given, settings

from g2scale.errors import InputError, ScalarDivisionError
from g2scale.scalars import (
    SQRT2, ExactScalar, backend_of, is_zero, lift, rational_root, rational_sqrt,
    scalar_sqrt, sign_of, sqrt2,
)
from strategies import exact_scalars


def test_sqrt2_squares_to_two():
    assert SQRT2 * SQRT2 == 2
    assert (SQRT2 * SQRT2).is_rational()


def test_text_form():
    x = ExactScalar(Fraction(1, 2), Fraction(-3, 4))
    assert str(x) == "1/2-3/4*sqrt2"
    assert ExactScalar.parse("1/2 - 3/4*sqrt2") == x
    assert ExactScalar.parse("sqrt2") == SQRT2
    assert ExactScalar.parse("-sqrt2 + 2") == ExactScalar(2, -1)


@pytest.mark.parametrize("text", ["", "1//2", "abc", "1/0"])
def test_parse_rejects_garbage(text):
    with pytest.raises(InputError):
        ExactScalar.parse(text)


def test_division_by_zero():
    with pytest.raises(ScalarDivisionError):
        ExactScalar(0).inv()
    with pytest.raises(ZeroDivisionError):
        ExactScalar(1) / ExactScalar(0)


def test_sign_of_mixed_terms():
    assert (1 - SQRT2).sign() == -1
    assert (ExactScalar(3, -2)).sign() == 1
    assert (ExactScalar(-3, 2)).sign() == -1
    assert ExactScalar(0).sign() == 0
    assert 1 < SQRT2 < Fraction(3, 2)


def test_square_roots():
    assert ExactScalar(2).sqrt() == SQRT2
    assert ExactScalar(Fraction(9, 4)).sqrt() == Fraction(3, 2)
    assert ExactScalar(3).sqrt() is None
    assert ExactScalar(-1).sqrt() is None
    # (1 + sqrt2)^2 = 3 + 2 sqrt2
    assert ExactScalar(3, 2).sqrt() == ExactScalar(1, 1)
    assert ExactScalar(3, -2).sqrt() == ExactScalar(-1, 1)


def test_rational_roots():
    assert rational_sqrt(Fraction(16, 9)) == Fraction(4, 3)
    assert rational_sqrt(2) is None
    assert rational_root(Fraction(1, 6 ** 9), 9) == Fraction(1, 6)
    assert rational_root(-8, 3) is None


def test_backends():
    assert lift(Fraction(1, 3), "exact") == ExactScalar(Fraction(1, 3))
    assert lift(Fraction(1, 4), "float") == 0.25
    with pytest.raises(InputError):
        lift(0.5, "exact")
    assert sqrt2("float") == pytest.approx(2 ** 0.5)
    assert backend_of(1, Fraction(1, 2), 0.5) == "float"
    assert backend_of(1, SQRT2) == "exact"
    assert is_zero(1e-12, 1e-10) and not is_zero(ExactScalar(0, Fraction(1, 10 ** 12)))
    assert sign_of(-1e-12, 1e-10) == 0
    assert scalar_sqrt(4.0) == 2.0 and scalar_sqrt(-1.0) is None


@settings(max_examples=200, deadline=None)
@given(exact_scalars(), exact_scalars(), exact_scalars())
def test_field_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x - x == 0


@settings(max_examples=200, deadline=None)
@given(exact_scalars(), exact_scalars())
def test_inverse_and_norm(x, y):
    if x:
        assert x * x.inv() == 1
        assert (y / x) * x == y
    assert (x * y).norm == x.norm * y.norm
    assert x * x.conj() == x.norm


@settings(max_examples=200, deadline=None)
@given(exact_scalars())
def test_sqrt_of_square_and_text_round_trip(x):
    assert (x * x).sqrt() == abs(x)
    assert ExactScalar.parse(str(x)) == x
    assert float(x) == pytest.approx(float(x.rat_part) + float(x.sqrt2_part) * 2 ** 0.5)
