from __future__ import annotations

import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from qll.analytic import bessel_k_imag, eval_lift
from qll.coeffile import synthetic_file
from qll.errors import ConfigError, UsageError
from qll.lift import FileSource
from qll.quaternion import HURWITZ_BASIS, hamilton, units
from qll.suites import BESSEL_GRID_R, BESSEL_GRID_Y, bessel_oracle


def mp_k(r: float, y: float) -> float:
    return float(mpmath.besselk(1j * r, y).real)


def test_k0_at_one():
    assert bessel_k_imag(0.0, 1.0) == pytest.approx(0.42102443824070834, abs=1e-14)


def test_grid_against_quadrature_oracle():
    for r in BESSEL_GRID_R:
        for y in BESSEL_GRID_Y:
            assert abs(bessel_k_imag(r, y) - bessel_oracle(r, y)) <= 1e-10


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 20), st.floats(0.1, 40))
def test_against_mpmath_besselk(r, y):
    assert abs(bessel_k_imag(r, y) - mp_k(r, y)) <= 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 10), st.floats(0.1, 20))
def test_even_in_r(r, y):
    assert bessel_k_imag(-r, y) == bessel_k_imag(r, y)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 10), st.floats(1, 15))
def test_decay(r, y):
    # monotone outside the oscillatory region y < r
    y = max(y, r)
    assert 0 < bessel_k_imag(r, 2 * y) < bessel_k_imag(r, y)


@pytest.mark.parametrize("r,y", [(0.0, 1.0), (1.0, 0.7), (2.5, 2.0), (5.0, 3.0), (0.5, 6.0)])
def test_bessel_ode_residual(r, y):
    h = 1e-3
    k0, kp, km = bessel_k_imag(r, y), bessel_k_imag(r, y + h), bessel_k_imag(r, y - h)
    d1 = (kp - km) / (2 * h)
    d2 = (kp - 2 * k0 + km) / (h * h)
    assert abs(y * y * d2 + y * d1 - (y * y - r * r) * k0) <= 1e-6


def test_bessel_rejects_nonpositive_y():
    with pytest.raises(UsageError):
        bessel_k_imag(1.0, 0.0)


@pytest.fixture(scope="module")
def src():
    return synthetic_file(seed=3, count=10, r=1.0, eps=1).to_source()


def _f(src, x, y, bound=120):
    e = eval_lift(src, x, y, bound)
    return complex(e.value, e.imag)


@pytest.mark.parametrize("x,y", [((0.0, 0.0, 0.0, 0.0), 1.0), ((0.21, -0.13, 0.4, 0.05), 0.8)])
def test_translation_invariance(src, x, y):
    base = _f(src, x, y)
    assert base != 0
    for v in HURWITZ_BASIS:
        shifted = tuple(a + float(b) for a, b in zip(x, v.coords))
        assert abs(_f(src, shifted, y) - base) <= 1e-6


@pytest.mark.parametrize("x,y", [((0.0, 0.0, 0.0, 0.0), 1.0), ((0.21, -0.13, 0.4, 0.05), 0.8)])
def test_unit_twist_invariance(src, x, y):
    base = _f(src, x, y)
    for u in units():
        ux = hamilton(tuple(float(c) for c in u.coords), x)
        assert abs(_f(src, ux, y) - base) <= 1e-6


def test_non_translation_changes_value(src):
    x = (0.21, -0.13, 0.4, 0.05)
    moved = (0.71, -0.13, 0.4, 0.05)
    assert abs(_f(src, moved, 0.8) - _f(src, x, 0.8)) > 1e-8


def test_value_is_real_and_tail_small(src):
    e = eval_lift(src, (0.3, 0.1, -0.2, 0.05), 1.0, 120)
    assert abs(e.imag) < 1e-12
    assert e.tail_estimate < 1e-12 and e.terms > 0


def test_zero_source_gives_zero():
    zero = FileSource({}, 1.0, 1)
    assert eval_lift(zero, (0.1, 0.2, 0.3, 0.4), 1.0, 60).value == 0


def test_eval_errors():
    with pytest.raises(ConfigError):
        eval_lift(FileSource({-1: 1.0}, None, 1), (0, 0, 0, 0), 1.0, 20)
    with pytest.raises(UsageError):
        eval_lift(FileSource({-1: 1.0}, 1.0, 1), (0, 0, 0, 0), -1.0, 20)


def test_single_shell_closed_form():
    # only c(-1) nonzero: the norm-2 shell gives 24 terms with A = sqrt(2) c(-1) at x = 0
    one = FileSource({-1: 1.0}, 1.0, 1)
    y = 1.0
    got = eval_lift(one, (0, 0, 0, 0), y, 2).value
    want = 24 * math.sqrt(2) * y * y * mp_k(1.0, 2 * math.pi * math.sqrt(2) * y)
    assert got == pytest.approx(want, rel=1e-10)
