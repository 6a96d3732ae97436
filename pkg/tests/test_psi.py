"""Tests for the digit-clamping map, its approximants, and variation."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import cantorkit as ck
from cantorkit.digitstream import expand_rational, from_digits, stream_value
from cantorkit.psi import (
    approximant_bound,
    approximant_eval,
    approximant_integral,
    approximant_integral_oracle,
    approximant_left_limit_at_one,
    bv_check,
    classify_continuity,
    compose_chain,
    ed_transform,
    monotonicity_witness,
    psi_map,
    psi_terminating_value,
    psi_value,
    variation_formula,
    variation_oracle,
)
from cantorkit.seqcore import Constant, Explicit, Formula, Periodic


short_base = st.lists(st.integers(2, 6), min_size=2, max_size=6).map(
    lambda es: Explicit(es, Constant(es[-1]))
)


@given(p=short_base, q=short_base, data=st.data())
@settings(max_examples=80)
def test_psi_map_clamps_digits(p, q, data):
    digits = [data.draw(st.integers(0, p.q(n) - 1)) for n in range(1, 9)]
    x = from_digits(p, digits)
    y = psi_map(x, q)
    for n in range(1, 9):
        assert y.digit(n) == min(digits[n - 1], q.q(n) - 1)


def test_psi_map_identity_when_q_dominates():
    p, q = Constant(3), Constant(5)
    x = expand_rational(Fraction(5, 9), p)
    y = psi_map(x, q)
    assert y.digits(20) == x.digits(20)


@given(p=short_base, q=short_base, data=st.data())
@settings(max_examples=60)
def test_psi_value_matches_terminating_sum(p, q, data):
    digits = [data.draw(st.integers(0, p.q(n) - 1)) for n in range(1, 7)]
    x = sum(Fraction(d, 1) / _prod(p, n) for n, d in enumerate(digits, start=1))
    got = psi_value(p, q, x)
    want = psi_terminating_value(p, q, digits)
    assert got.lo == got.hi == want


def _prod(seq, n):
    out = 1
    for j in range(1, n + 1):
        out *= seq.q(j)
    return out


def test_psi_value_periodic_closed_form():
    # 1/3 over constant base 2 has digits (0,1) repeating; the image digits
    # over constant base 3 are unchanged, so psi(x) = sum 1/3^(2k) = 1/8
    got = psi_value(Constant(2), Constant(3), Fraction(1, 3))
    assert got.lo == got.hi == Fraction(1, 8)


@given(p=short_base, q=short_base, t=st.integers(1, 4), i=st.integers(0, 63))
@settings(max_examples=80)
def test_approximant_uniform_bound(p, q, t, i):
    x = Fraction(i, 64)
    a = approximant_eval(p, q, t, x)
    b = approximant_eval(p, q, t + 10, x)
    assert abs(a - b) <= approximant_bound(q, t)
    assert approximant_bound(q, t) <= Fraction(2, 2 ** t)


def test_approximant_at_stage_gridpoints():
    # at cell endpoints the stage-t approximant agrees with psi of the
    # terminating point
    p, q = Constant(5), Constant(3)
    t = 3
    for k in range(5 ** t):
        x = Fraction(k, 5 ** t)
        digs = []
        r = k
        for j in range(t):
            digs.append(r // 5 ** (t - 1 - j))
            r %= 5 ** (t - 1 - j)
        assert approximant_eval(p, q, t, x) == psi_terminating_value(
            Explicit([5] * t, Constant(5)), q, digs
        )


def test_approximant_wraps_mod_one():
    p, q = Constant(3), Constant(2)
    assert approximant_eval(p, q, 2, Fraction(5, 4)) == approximant_eval(
        p, q, 2, Fraction(1, 4)
    )


@given(p=short_base, q=short_base, t=st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_integral_formula_matches_oracle(p, q, t):
    assert approximant_integral(p, q, t) == approximant_integral_oracle(p, q, t)


def test_integral_identity_base():
    # p == q makes the approximant the sawtooth x - floor(x); integral 1/2
    assert approximant_integral(Constant(4), Constant(4), 3) == Fraction(1, 2)


def test_continuity_worked_example_jump_negative():
    rep = classify_continuity(Constant(5), Constant(3), Fraction(3, 5))
    assert rep.status == "jump"
    assert rep.jump == Fraction(-1, 3)
    assert rep.set_tag == "A"
    assert rep.right_status == "continuous"


def test_continuity_worked_example_jump_positive():
    rep = classify_continuity(Constant(2), Constant(10), Fraction(1, 2))
    assert rep.status == "jump"
    assert rep.jump == Fraction(4, 45)
    assert rep.set_tag == "B"


def test_continuity_when_p_dominates_everywhere():
    # p_j >= q_j for all j makes the tail sum telescope to 1 and every
    # terminating point with E_t < q_t continuous
    rep = classify_continuity(Constant(5), Constant(3), Fraction(1, 5))
    assert rep.status == "continuous"
    assert rep.jump == 0


@given(data=st.data(), t=st.integers(2, 3))
@settings(max_examples=60, deadline=None)
def test_variation_formula_matches_oracle(data, t):
    ps = [data.draw(st.integers(2, 5)) for _ in range(t)]
    qs = [data.draw(st.integers(2, 5)) for _ in range(t)]
    p = Explicit(ps, Constant(2))
    q = Explicit(qs, Constant(2))
    rep = variation_formula(p, q, t)
    assert rep.value == variation_oracle(p, q, t)
    if rep.upper_bound is not None:
        assert rep.value <= rep.upper_bound


def test_variation_of_sawtooth():
    # p == q: the approximant is x - floor(x) on [0,1) with a unit drop at 1
    assert variation_oracle(Constant(3), Constant(3), 2) == 2


def test_bv_verdict_when_q_dominates():
    rep = bv_check(Constant(2), Constant(3), horizon=2000)
    assert rep.verdict == "bounded_variation"


def test_monotonicity_witness_orders():
    w = monotonicity_witness(Constant(5), Constant(3))
    assert w.x < w.y
    assert w.psi_x > w.psi_y


def test_monotonicity_witness_worked_points():
    w = monotonicity_witness(Constant(5), Constant(3))
    assert (w.x, w.y) == (Fraction(11, 25), Fraction(3, 5))
    assert (w.psi_x, w.psi_y) == (Fraction(7, 9), Fraction(2, 3))


def test_compose_chain_is_iterated_clamp():
    p = Constant(6)
    x = from_digits(p, [5, 4, 3, 2, 1])
    y = compose_chain(x, [Constant(4), Constant(3)])
    assert y.digits(5) == [min(d, 3, 2) for d in [5, 4, 3, 2, 1]]


def test_ed_transform_identity_and_gap_sum():
    q = Formula(lambda n: n + 4, label="n+4")
    x = expand_rational(Fraction(1, 3), Formula(lambda n: n + 3, label="n+3"))
    p_seq, image, rep = ed_transform(q, lambda n: 1, x, horizon=500,
                                     identity_window=100)
    assert rep.identity_ok
    assert rep.min_p >= 3
    assert p_seq.q(1) == 4
    assert rep.gap_sum_partial == sum(Fraction(1, n + 4) for n in range(1, 501))
