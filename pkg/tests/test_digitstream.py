"""Tests for digit streams, rational expansion, and canonicalization."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import cantorkit as ck
from cantorkit.digitstream import (
    CANONICAL,
    TERMINATING,
    canonicalize,
    detect_max_tail,
    enclose_prefix,
    expand_rational,
    from_digits,
    from_rule,
    shift_T,
    stream_value,
)
from cantorkit.seqcore import Constant, Explicit, Periodic, SpecError


@st.composite
def unit_fraction(draw):
    den = draw(st.integers(2, 500))
    num = draw(st.integers(0, den - 1))
    return Fraction(num, den)


@given(x=unit_fraction(), b=st.integers(2, 7))
@settings(max_examples=100)
def test_expand_rational_digits_valid_and_enclose(x, b):
    base = Constant(b)
    s = expand_rational(x, base)
    ds = s.digits(30)
    assert all(0 <= d < b for d in ds)
    enc = enclose_prefix(s, 30)
    assert enc.lo <= x <= enc.hi
    assert enc.width == Fraction(1, b ** 30)


@given(num=st.integers(0, 255))
def test_expand_rational_dyadic_terminates(num):
    s = expand_rational(Fraction(num, 256), Constant(2))
    # value reconstructs exactly from the first 8 digits, then all zeros
    v = sum(Fraction(d, 2 ** (n + 1)) for n, d in enumerate(s.digits(8)))
    assert v == Fraction(num, 256)
    assert s.remainder(8) == 0
    assert s.digits(12)[8:] == [0, 0, 0, 0]


def test_expand_rational_mixed_base():
    # 7/8 over constant base 3: digits repeat (2,1)
    s = expand_rational(Fraction(7, 8), Constant(3))
    assert s.digits(8) == [2, 1, 2, 1, 2, 1, 2, 1]


def test_expand_rational_integer_part():
    s = expand_rational(Fraction(3, 2), Constant(2))
    assert s.e0 == 1
    assert s.digits(3) == [1, 0, 0]


def test_from_digits_is_terminating():
    s = from_digits(Constant(3), [2, 0, 1])
    assert s.canonicity == TERMINATING
    assert s.digits(5) == [2, 0, 1, 0, 0]


def test_from_digits_validates_against_base():
    with pytest.raises(SpecError):
        from_digits(Constant(3), [3])


def test_stream_value_exact_for_terminating():
    s = from_digits(Constant(5), [4, 3])
    enc = stream_value(s)
    assert enc.lo == enc.hi == Fraction(4, 5) + Fraction(3, 25)


def test_shift_T_rational_exact():
    x = Fraction(7, 8)
    s = expand_rational(x, Constant(2))
    enc = shift_T(s, 1)
    # T x = {2x} = 3/4
    assert enc.lo == enc.hi == Fraction(3, 4)


def test_detect_max_tail_on_all_max_stream():
    base = Periodic([3, 2])
    s = from_rule(base, lambda n: base.q(n) - 1)
    assert detect_max_tail(s) == 1


def test_canonicalize_max_tail_to_terminating():
    base = Constant(3)
    # 0.1222... base 3 == 0.2
    s = from_rule(base, lambda n: 1 if n == 1 else 2)
    c = canonicalize(s)
    assert c.canonicity == TERMINATING
    assert c.digits(4) == [2, 0, 0, 0]
    assert stream_value(c).lo == Fraction(2, 3)


def test_canonicalize_all_max_gives_next_integer():
    base = Constant(2)
    s = from_rule(base, lambda n: 1)
    c = canonicalize(s)
    assert c.e0 == 1
    assert all(d == 0 for d in c.digits(20))


def test_canonicalize_leaves_canonical_alone():
    s = expand_rational(Fraction(1, 3), Constant(2))
    c = canonicalize(s)
    assert c.digits(20) == s.digits(20)


def test_remainder_tracks_expansion():
    s = expand_rational(Fraction(5, 7), Constant(3))
    # remainder after n digits is the unexpanded part scaled into [0,1)
    r = s.remainder(4)
    v = sum(Fraction(d, 3 ** (n + 1)) for n, d in enumerate(s.digits(4)))
    assert v + r / 3 ** 4 == Fraction(5, 7)
