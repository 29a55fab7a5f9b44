"""Polynomial ring: arithmetic, canonical form, parsing, calculus."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from formcert.ring import (
    KIND_PARAMETER,
    Poly,
    PolyParseError,
    Ring,
    RingContextError,
    Variable,
    format_poly,
)


@pytest.fixture
def R2():
    return Ring.space(["x1", "x2"])


def test_zero_and_one(R2):
    assert R2.zero.is_zero()
    assert R2.one.is_constant()
    assert R2.one.constant_value() == 1
    assert R2.zero + R2.one == R2.one


def test_basic_arithmetic(R2):
    x1, x2 = R2.var("x1"), R2.var("x2")
    p = (x1 + x2) * (x1 - x2)
    assert p == x1 * x1 - x2 * x2
    assert (x1 + x2) ** 2 == x1**2 + R2.const(2) * x1 * x2 + x2**2


def test_exact_rationals(R2):
    third = R2.const(Fraction(1, 3))
    assert third + third + third == R2.one
    assert (third * R2.const(3)).constant_value() == 1


def test_parse_round_trip(R2):
    for text in ["0", "1", "-5/7", "x1", "2*x1^3*x2 - x2 + 1/2",
                 "x1^2 - x2"]:
        p = R2.parse(text)
        assert R2.parse(str(p)) == p


def test_parse_error_position(R2):
    with pytest.raises(PolyParseError) as exc:
        R2.parse("x1 + @")
    assert exc.value.pos == 5


def test_parse_unknown_variable(R2):
    with pytest.raises(PolyParseError):
        R2.parse("x1 + y")


def test_cross_ring_arithmetic_rejected(R2):
    other = Ring.space(["x1", "x2", "x3"])
    with pytest.raises(RingContextError):
        R2.var("x1") + other.var("x1")


def test_diff_and_integrate(R2):
    p = R2.parse("x1^3*x2 + 2*x2")
    assert p.diff("x1") == R2.parse("3*x1^2*x2")
    assert p.diff("x1").integrate("x1") == R2.parse("x1^3*x2")
    assert p.diff("x2").diff("x1") == p.diff("x1").diff("x2")


def test_eval_exact(R2):
    p = R2.parse("x1^2 - x2")
    assert p.eval({"x1": Fraction(1, 2), "x2": Fraction(1, 4)}) == 0
    assert p.eval({"x1": 3, "x2": 1}) == 8


def test_subs_partial(R2):
    p = R2.parse("x1^2 - x2")
    q = p.subs({"x1": Fraction(2)})
    assert q == R2.parse("4 - x2")


def test_map_to_extension(R2):
    tr = R2.extend([Variable("s1", KIND_PARAMETER)])
    p = R2.parse("x1*x2 + 1")
    lifted = p.map_to(tr)
    assert str(lifted) == str(p)
    assert lifted.ring == tr


def test_grevlex_vs_lex_leading_monomial():
    rg = Ring.space(["x1", "x2"], "grevlex")
    rl = Ring.space(["x1", "x2"], "lex")
    # x1*x2^2 has higher total degree than x1^2 -> grevlex leader
    pg = rg.parse("x1^2 + x1*x2^2")
    pl = rl.parse("x1^2 + x1*x2^2")
    assert pg.leading_monomial() == (1, 2)
    assert pl.leading_monomial() == (2, 0)


def _polys(ring, max_terms=4):
    coeff = st.fractions(
        min_value=-3, max_value=3, max_denominator=4
    )
    exps = st.tuples(
        st.integers(min_value=0, max_value=3),
        st.integers(min_value=0, max_value=3),
    )
    term = st.tuples(exps, coeff)
    return st.lists(term, max_size=max_terms).map(
        lambda ts: sum(
            (ring.monomial(e, c) for e, c in ts), ring.zero
        )
    )


R = Ring.space(["x1", "x2"])


@settings(max_examples=60, deadline=None)
@given(_polys(R), _polys(R), _polys(R))
def test_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert p + R.zero == p
    assert p * R.one == p
    assert p - p == R.zero


@settings(max_examples=60, deadline=None)
@given(_polys(R), _polys(R))
def test_leibniz_rule(p, q):
    for name in ("x1", "x2"):
        assert (p * q).diff(name) == p.diff(name) * q + p * q.diff(name)


@settings(max_examples=60, deadline=None)
@given(_polys(R))
def test_format_parse_identity(p):
    assert R.parse(format_poly(p)) == p


@settings(max_examples=40, deadline=None)
@given(_polys(R))
def test_canonical_terms_sorted_no_zero_coeffs(p):
    keys = [R.monomial_key(e) for e, _ in p.terms]
    assert keys == sorted(keys, reverse=True)
    assert all(c != 0 for _, c in p.terms)
