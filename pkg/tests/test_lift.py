from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import qll.lift as lift_mod
from qll.errors import ConfigError, SourceError, UsageError
from qll.exact import AlgebraicReal, SymbolicValue, sqrt_of
from qll.hecke_local import enumerate_cp
from qll.lattice import keys_from_doubled, primitive_decompose, s_points
from qll.lift import (FileSource, HeckeOperatorId, HeckeSource, coefficient_at, eigenvalue,
                      hecke_apply, lift_coeff, lift_value, source_value, verify_equivariance)
from qll.quaternion import I, ONE, PI2, HurwitzQuaternion, hamilton_np, parse_quaternion, units

c = SymbolicValue.seed
eps = SymbolicValue.eps()


def beta_from_row(row) -> HurwitzQuaternion:
    return HurwitzQuaternion(tuple(int(2 * v) for v in row))


def test_source_value_newform_relation():
    src = HeckeSource(newform=True)
    half = AlgebraicReal.coerce(Fraction(-1, 2))
    assert source_value(src, -2) == (eps * c(1)).scale(half)
    assert source_value(src, -12) == (eps * c(3)).scale(half) * eps.scale(half) * SymbolicValue.const(1)


def test_source_value_hecke_recursion():
    src = HeckeSource(primes=(3,))
    lam = SymbolicValue.lam(3)
    lhs = source_value(src, -9)
    rhs = (lam * source_value(src, -3)).scale(sqrt_of(Fraction(1, 3))) - source_value(src, -1).scale(
        AlgebraicReal.coerce(Fraction(1, 3)))
    assert lhs == rhs
    # c(p n) when p does not divide n uses c(n/p) = 0
    assert source_value(src, -6) == (lam * c(2)).scale(sqrt_of(Fraction(1, 3)))


def test_source_value_errors():
    src = HeckeSource(primes=(3,), symbolic_default=False, seeds={1: 1})
    assert source_value(src, -27) != 0
    with pytest.raises(SourceError, match="5"):
        source_value(src, -5)
    with pytest.raises(ValueError):
        source_value(src, 3)
    with pytest.raises(ConfigError):
        HeckeSource(primes=(2,))
    with pytest.raises(ConfigError):
        HeckeSource(eps=3)


def test_seeded_source_is_deterministic():
    a = HeckeSource(primes=(3,), random_seed=5)
    b = HeckeSource(primes=(3,), random_seed=5)
    assert [source_value(a, -m) for m in range(1, 20)] == [source_value(b, -m) for m in range(1, 20)]
    assert source_value(a, -7) != source_value(HeckeSource(primes=(3,), random_seed=6), -7)


def test_lift_coeff_examples():
    src = HeckeSource()
    assert lift_coeff(src, PI2).value == c(1).scale(sqrt_of(2))
    assert lift_coeff(src, I * 2).value == (c(2) - eps * c(1)).scale(AlgebraicReal.coerce(2))
    assert lift_coeff(src, PI2 * 3).value == (c(9) + c(1)).scale(sqrt_of(18))
    with pytest.raises(ValueError):
        lift_coeff(src, ONE)


def test_lift_coeff_newform_example():
    src = HeckeSource(newform=True)
    assert lift_coeff(src, I * 2).value == (eps * c(1)).scale(AlgebraicReal.coerce(-3))


def _formula_oracle(src, beta):
    """Direct transcription of the coefficient formula from the decomposition."""
    dec = primitive_decompose(beta)
    N = beta.norm()
    total = SymbolicValue()
    for t in range(dec.u + 1):
        for n in range(1, dec.d + 1):
            if dec.d % n:
                continue
            q = Fraction(N, 2 ** (t + 1) * n * n)
            assert q.denominator == 1
            total = total + (-src.eps_value()) ** t * src.value(-int(q))
    return total.scale(sqrt_of(N))


def test_lift_matches_formula_oracle():
    src = HeckeSource(primes=(3, 5))
    for row in s_points(150)[::41]:
        beta = beta_from_row(row)
        assert lift_coeff(src, beta).value == _formula_oracle(src, beta)


@pytest.mark.parametrize("n0", [1, 2, 3, 5])
def test_nonvanishing_witness(n0):
    src = HeckeSource(seeds={m: 0 for m in range(1, n0)})
    beta0 = next(x for x in (HurwitzQuaternion(t) for t in np.ndindex(5, 5, 5, 5))
                 if x.in_order() and x.norm() == n0)
    beta = PI2 * beta0
    value = lift_coeff(src, beta).value
    assert value == c(n0).scale(sqrt_of(2 * n0))
    assert value


def test_zero_source_and_linearity():
    zero = HeckeSource(primes=(3,), symbolic_default=False, seeds={m: 0 for m in range(1, 200)})
    for row in s_points(80)[::13]:
        assert not lift_coeff(zero, beta_from_row(row)).value
    s1 = HeckeSource(primes=(3,), lam={3: 1}, symbolic_default=False, seeds={m: m for m in range(1, 200)})
    s2 = HeckeSource(primes=(3,), lam={3: 1}, symbolic_default=False, seeds={m: 1 for m in range(1, 200)})
    s12 = HeckeSource(primes=(3,), lam={3: 1}, symbolic_default=False, seeds={m: m + 1 for m in range(1, 200)})
    for row in s_points(80)[::13]:
        b = beta_from_row(row)
        assert lift_coeff(s12, b).value == lift_coeff(s1, b).value + lift_coeff(s2, b).value


def test_unit_bi_invariance_of_lift_keys():
    # A depends only on (norm, odd content); both are invariant under unit multiplication
    pts = 2 * s_points(100)
    base = keys_from_doubled(pts, 1)
    us = np.array([u.t for u in units()], dtype=np.int64)
    for u1 in us:
        left = hamilton_np(u1[None, :], pts) // 2
        for u2 in us:
            both = hamilton_np(left, u2[None, :]) // 2
            assert np.array_equal(keys_from_doubled(both, 1), base)


def test_unit_bi_invariance_scalar_sample():
    src = HeckeSource(primes=(3,))
    rng = random.Random(3)
    us = units()
    for row in s_points(100)[::97]:
        b = beta_from_row(row)
        u1, u2 = rng.choice(us), rng.choice(us)
        assert lift_coeff(src, u1 * b * u2).value == lift_coeff(src, b).value


@settings(max_examples=100, deadline=None)
@given(st.integers(0, len(s_points(200)) - 1))
def test_conjugation_symmetry(ix):
    src = HeckeSource(primes=(3, 5), newform=True)
    b = beta_from_row(s_points(200)[ix])
    assert lift_coeff(src, b.conj()).value == lift_coeff(src, b).value


def test_hecke_apply_examples():
    src = HeckeSource(newform=True)
    two = HeckeOperatorId.make(2)
    val = hecke_apply(two, src, PI2)
    assert coefficient_at(src, ONE) == 0
    assert val == coefficient_at(src, I * 2).scale(AlgebraicReal.coerce(2))
    assert val == eigenvalue(two, src) * lift_coeff(src, PI2).value
    assert eigenvalue(two, src) == eps.scale(sqrt_of(2) * -3)

    src3 = HeckeSource(primes=(3,))
    op = HeckeOperatorId(3, "b")
    reps = enumerate_cp(3).representatives
    assert all(coefficient_at(src3, a.inverse() * PI2) == 0 for a in reps)
    lam = SymbolicValue.lam(3)
    assert hecke_apply(op, src3, PI2) == lam.scale(AlgebraicReal.coerce(12)) * lift_coeff(src3, PI2).value


def test_operator_ids():
    assert HeckeOperatorId.make(2).shape == "two"
    with pytest.raises(UsageError):
        HeckeOperatorId(3, "d")
    with pytest.raises(UsageError):
        HeckeOperatorId(2, "a")
    with pytest.raises(UsageError):
        HeckeOperatorId(9, "a")


def test_shape_a_equals_shape_b_on_symmetric_sources():
    src = HeckeSource(primes=(3,))
    for row in s_points(120)[::53]:
        b = beta_from_row(row)
        assert hecke_apply(HeckeOperatorId(3, "a"), src, b) == hecke_apply(HeckeOperatorId(3, "b"), src, b)


@pytest.mark.parametrize("shape", ["a", "b", "c"])
def test_representative_independence(shape, monkeypatch):
    src = HeckeSource(primes=(3,))
    op = HeckeOperatorId(3, shape)
    betas = [beta_from_row(r) for r in s_points(60)[::31]]
    before = [hecke_apply(op, src, b) for b in betas]
    rng = random.Random(1)
    twisted = [a * rng.choice(units()) for a in enumerate_cp(3).representatives]
    monkeypatch.setattr(lift_mod, "_reps", lambda p: twisted)
    assert [hecke_apply(op, src, b) for b in betas] == before


def test_fast_equivariance_agrees_with_scalar_hecke_apply():
    src = HeckeSource(primes=(3,))
    for shape in ("a", "b", "c"):
        op = HeckeOperatorId(3, shape)
        mu = eigenvalue(op, src)
        for row in s_points(60)[::17]:
            b = beta_from_row(row)
            assert hecke_apply(op, src, b) == mu * lift_coeff(src, b).value


@pytest.mark.parametrize("p,shape", [(3, "b"), (3, "c"), (5, "a")])
def test_verify_equivariance_passes(p, shape):
    rep = verify_equivariance(HeckeOperatorId(p, shape), HeckeSource(primes=(p,)), 240)
    assert rep.status == "pass" and rep.checked == len(s_points(240))
    if (p, shape) == (3, "c"):
        assert str(rep.eigenvalue) == "(30) + (9)*lam3^2"


def test_verify_equivariance_two_with_eps_values():
    for e in (None, 1, -1):
        rep = verify_equivariance(HeckeOperatorId.make(2), HeckeSource(newform=True, eps=e), 240)
        assert rep.status == "pass"


def test_perturbed_source_fails_with_witness():
    src = HeckeSource(newform=True, overrides={2: c(1)})
    rep = verify_equivariance(HeckeOperatorId.make(2), src, 100)
    assert rep.status == "fail"
    assert rep.witnesses[0]["beta"] == [-2, -2, 0, 0]
    assert rep.to_json()["witnesses"]


def test_verify_equivariance_config_errors():
    with pytest.raises(ConfigError):
        verify_equivariance(HeckeOperatorId.make(2), HeckeSource(), 20)
    with pytest.raises(ConfigError):
        verify_equivariance(HeckeOperatorId(5, "b"), HeckeSource(primes=(3,)), 20)
    with pytest.raises(ConfigError):
        verify_equivariance(HeckeOperatorId(3, "b"), FileSource({-1: 1.0}, 1.0, 1), 20)


def test_file_source_values():
    src = FileSource({-1: 0.5, -3: Fraction(1, 3)}, 1.0, -1)
    assert source_value(src, -1) == 0.5
    assert source_value(src, -2) == 0
    assert lift_value(src, 2, 1) == pytest.approx(2 ** 0.5 * 0.5)
    # A(2i) = 2 (c(-2) - eps c(-1)) with eps = -1
    assert lift_value(src, 4, 1) == pytest.approx(2 * (0 + 0.5))


@pytest.mark.parametrize("shape", ["a", "b", "c"])
def test_odd_equivariance_with_newform_relation(shape):
    src = HeckeSource(primes=(3,), newform=True)
    assert verify_equivariance(HeckeOperatorId.make(3, shape), src, 120).status == "pass"
