from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qll.exact import (AlgebraicReal, SymbolicValue, field_arith, format_rational, parse_rational,
                       sqrt_of, squarefree_split, substitute)

RADICANDS = (1, 2, 3, 5, 6, 10, 15)

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)
reals = st.dictionaries(st.sampled_from(RADICANDS), fractions, max_size=4).map(AlgebraicReal)
nonzero_reals = reals.filter(bool)


def test_sqrt_of_examples():
    assert sqrt_of(1) == 1
    assert sqrt_of(1).is_rational()
    assert sqrt_of(8) == AlgebraicReal({2: 2})
    assert sqrt_of(12) == AlgebraicReal({3: 2})
    assert sqrt_of(Fraction(1, 2)) == AlgebraicReal({2: Fraction(1, 2)})


def test_sqrt_of_rejects_zero():
    with pytest.raises(ValueError):
        sqrt_of(0)


@given(st.integers(min_value=1, max_value=10 ** 6))
def test_sqrt_of_squares_back(n):
    s = sqrt_of(n)
    assert s * s == n
    assert s.radicands() == (squarefree_split(n)[1],)


def test_field_arith_examples():
    r2, r6 = sqrt_of(2), sqrt_of(6)
    assert field_arith("mul", r2, r2) == 2
    assert field_arith("mul", r2, r6) == AlgebraicReal({3: 2})
    assert field_arith("inv", 1 + r2) == AlgebraicReal({1: -1, 2: 1})
    assert field_arith("neg", r2) == AlgebraicReal({2: -1})
    with pytest.raises(ZeroDivisionError):
        field_arith("inv", AlgebraicReal())


def test_representation_is_canonical():
    a = AlgebraicReal({2: 1, 1: 0})
    assert a.terms == {2: Fraction(1)}
    assert AlgebraicReal({2: Fraction(2, 4)}) == AlgebraicReal({2: Fraction(1, 2)})
    assert AlgebraicReal({12: 1}) == AlgebraicReal({3: 2})
    with pytest.raises(ValueError):
        AlgebraicReal({0: 1})


@settings(max_examples=60, deadline=None)
@given(reals, reals, reals)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a and a * b == b * a
    assert a - a == 0


@settings(max_examples=40, deadline=None)
@given(nonzero_reals)
def test_inverse(a):
    assert a * a.inv() == 1


@settings(max_examples=80, deadline=None)
@given(reals, reals)
def test_exact_equality_matches_float_embedding(a, b):
    # oracle: double-precision evaluation of each term
    fa = sum(float(q) * math.sqrt(r) for r, q in a.terms.items())
    fb = sum(float(q) * math.sqrt(r) for r, q in b.terms.items())
    scale = 1 + sum(abs(float(q)) for q in a.terms.values()) + sum(abs(float(q)) for q in b.terms.values())
    if a == b:
        assert abs(fa - fb) < 1e-12 * scale
    else:
        assert abs(fa - fb) > 1e-6 / scale ** 4
    assert abs(float(a) - fa) < 1e-12 * scale


def test_json_round_trip():
    a = AlgebraicReal({1: Fraction(3, 2), 2: -1})
    data = a.to_json()
    assert data == {"terms": [[1, "3/2"], [2, "-1/1"]]}
    assert AlgebraicReal.from_json(data) == a
    assert format_rational(Fraction(-3, 2)) == "-3/2"
    assert parse_rational("3/2") == Fraction(3, 2)


def test_substitute_examples():
    lam3 = SymbolicValue.lam(3)
    mu = lam3.scale(AlgebraicReal.coerce(12))
    assert substitute(mu, {"lam3": 1}) == 12
    mu3 = (lam3 * lam3).scale(AlgebraicReal.coerce(9)) + 30
    assert substitute(mu3, {"lam3": 2}) == 66


def test_eps_squared_reduces():
    e = SymbolicValue.eps()
    assert e * e == SymbolicValue.const(1)
    assert "eps" not in (e * e).variables()


def test_substitute_errors_name_variable():
    expr = SymbolicValue.lam(5) + SymbolicValue.eps()
    with pytest.raises(KeyError, match="lam5"):
        substitute(expr, {"eps": 1})
    with pytest.raises(ValueError):
        substitute(SymbolicValue.eps(), {"eps": 2})


@settings(max_examples=40, deadline=None)
@given(reals, reals, st.sampled_from([1, -1]))
def test_eps_reduction_under_substitution(a, b, e):
    expr = SymbolicValue.const(a) + SymbolicValue.lam(3).scale(b)
    twice = (expr * SymbolicValue.eps()) * SymbolicValue.eps()
    binding = {"eps": e, "lam3": Fraction(7, 3)}
    assert substitute(twice, binding) == substitute(expr, {"lam3": Fraction(7, 3)})


def test_symbolic_json_round_trip():
    expr = SymbolicValue.lam(3).scale(sqrt_of(2)) * SymbolicValue.eps() + SymbolicValue.seed(4)
    assert SymbolicValue.from_json(expr.to_json()) == expr


def test_unknown_variable_rejected():
    with pytest.raises(ValueError):
        SymbolicValue.var("x")
