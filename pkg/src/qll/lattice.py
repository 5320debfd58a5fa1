"""The lattice S dual to O under Re, its enumeration, and primitive
decompositions ``beta = pi2^u * d * beta0``.

Inside O, S is the set of integral quaternions with even coordinate sum
(equivalently, Hurwitz integers of even norm); that description is used for
fast enumeration, while membership and the S = pi2*O statement are checked
from the basis by linear algebra.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt
from typing import Sequence

import numpy as np
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from .quaternion import (HURWITZ_BASIS, PI2, PI2_INV, HurwitzQuaternion, Q,
                         parse_quaternion)


def _default_s_basis() -> tuple[HurwitzQuaternion, ...]:
    return tuple(parse_quaternion(s) for s in ("1-ij", "-i-ij", "-j-ij", "2ij"))


@dataclass(frozen=True)
class LatticeBasis:
    generators: tuple = field(default_factory=_default_s_basis)

    def __post_init__(self):
        if len(self.generators) != 4:
            raise ValueError("a lattice basis needs four generators")
        if self.gram_determinant() == 0:
            raise ValueError("lattice generators are linearly dependent")

    def matrix(self) -> list[list[Fraction]]:
        """Rows are the generators' ordinary coordinates."""
        return [list(g.coords) for g in self.generators]

    def gram_determinant(self) -> Fraction:
        m = Matrix(self.matrix())
        return (m * m.T).det()

    def determinant(self) -> Fraction:
        return abs(Fraction(str(Matrix(self.matrix()).det())))


S_BASIS = LatticeBasis()


def _solve(rows: list[list[Fraction]], target: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``x @ rows = target`` over Q by Gauss-Jordan elimination."""
    n = len(rows)
    # augmented system in column form: A^T x = target
    aug = [[Fraction(rows[j][i]) for j in range(n)] + [Fraction(target[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [v / pv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def lattice_coordinates(beta: HurwitzQuaternion, basis: LatticeBasis = S_BASIS) -> list[Fraction]:
    return _solve(basis.matrix(), beta.coords)


def s_membership(beta: HurwitzQuaternion, basis: LatticeBasis = S_BASIS) -> bool:
    return all(x.denominator == 1 for x in lattice_coordinates(beta, basis))


def in_s_fast(beta: HurwitzQuaternion) -> bool:
    """Parity description of S: integral coordinates with even sum."""
    t = beta.t
    if not all(isinstance(v, int) and v % 2 == 0 for v in t):
        return False
    return sum(v // 2 for v in t) % 2 == 0


def hnf(generators: Sequence[HurwitzQuaternion]) -> Matrix:
    """Hermite normal form of the lattice spanned by the generators (doubled
    coordinates, which are integral for every sublattice of O)."""
    rows = Matrix([[int(v) for v in g.t] for g in generators])
    return hermite_normal_form(rows.T)


def lattices_equal(a: Sequence[HurwitzQuaternion], b: Sequence[HurwitzQuaternion]) -> bool:
    return hnf(a) == hnf(b)


def lattice_index(sub: Sequence[HurwitzQuaternion], sup: Sequence[HurwitzQuaternion]) -> int:
    """Index [sup : sub] from HNF determinants."""
    ds, dp = abs(hnf(sub).det()), abs(hnf(sup).det())
    if ds % dp:
        raise ValueError("not a sublattice")
    return int(ds // dp)


def left_pi2_o() -> tuple[HurwitzQuaternion, ...]:
    return tuple(PI2 * x for x in HURWITZ_BASIS)


def right_o_pi2() -> tuple[HurwitzQuaternion, ...]:
    return tuple(x * PI2 for x in HURWITZ_BASIS)


def verify_s_equals_w2O(basis: LatticeBasis = S_BASIS) -> bool:
    return lattices_equal(basis.generators, left_pi2_o())


def dual_pairing_check(sample_bound: int = 2) -> bool:
    """Basis pairings are integral, and every sampled point of (1/2)Z^4 not
    in S pairs non-integrally with some element of the O basis."""
    for b in S_BASIS.generators:
        for x in HURWITZ_BASIS:
            if (b * x).real_part().denominator != 1:
                return False
    rng = range(-sample_bound, sample_bound + 1)
    for t in product(rng, repeat=4):
        beta = Q(t)
        if s_membership(beta):
            continue
        if all((beta * x).real_part().denominator == 1 for x in HURWITZ_BASIS):
            return False
    return True


# ---------------------------------------------------------------------------
# enumeration


@lru_cache(maxsize=512)
def _norm_shell(n: int) -> tuple[tuple[int, int, int, int], ...]:
    """Integer 4-tuples x with sum x_i^2 == n, lexicographic order."""
    r = isqrt(n)
    out = []
    for a in range(-r, r + 1):
        ra = n - a * a
        rb = isqrt(ra)
        for b in range(-rb, rb + 1):
            rc_ = ra - b * b
            rc = isqrt(rc_)
            for c in range(-rc, rc + 1):
                d2 = rc_ - c * c
                d = isqrt(d2)
                if d * d == d2:
                    out.extend({(a, b, c, d), (a, b, c, -d)})
    return tuple(sorted(out))


def enumerate_by_norm(n: int) -> list[HurwitzQuaternion]:
    """All beta in S with nu(beta) == n, in lexicographic doubled order."""
    if n < 1 or n % 2:
        return []
    return [Q(tuple(2 * v for v in x)) for x in _norm_shell(n)]


@lru_cache(maxsize=512)
def hurwitz_by_norm(m: int) -> tuple[HurwitzQuaternion, ...]:
    """All elements of O with nu == m (brute force on doubled coordinates)."""
    if m < 0:
        return ()
    target = 4 * m
    r = isqrt(target)
    out = []
    for t in product(range(-r, r + 1), repeat=3):
        rest = target - sum(v * v for v in t)
        if rest < 0:
            continue
        t3 = isqrt(rest)
        if t3 * t3 != rest:
            continue
        for s in {t3, -t3}:
            cand = (*t, s)
            if len({v % 2 for v in cand}) == 1:
                out.append(Q(cand))
    return tuple(sorted(out, key=lambda q: q.t))


def enumerate_via_pi2_o(n: int) -> list[HurwitzQuaternion]:
    """Independent enumeration: pi2 * x for x in O with nu(x) == n/2."""
    if n < 1 or n % 2:
        return []
    return sorted((PI2 * x for x in hurwitz_by_norm(n // 2)), key=lambda q: q.t)


@lru_cache(maxsize=16)
def s_points(bound: int) -> np.ndarray:
    """Ordinary integer coordinates of all nonzero beta in S with
    nu(beta) <= bound, as a read-only (n, 4) int64 array."""
    r = isqrt(bound)
    ax = np.arange(-r, r + 1, dtype=np.int64)
    b, c, d = np.meshgrid(ax, ax, ax, indexing="ij")
    bcd = np.stack([b.ravel(), c.ravel(), d.ravel()], axis=1)
    sq = (bcd * bcd).sum(axis=1)
    chunks = []
    for a in ax:
        n = sq + a * a
        sel = (n <= bound) & (n > 0) & (n % 2 == 0)
        part = bcd[sel]
        chunks.append(np.column_stack([np.full(len(part), a, dtype=np.int64), part]))
    out = np.concatenate(chunks)
    out.flags.writeable = False
    return out


@lru_cache(maxsize=16)
def o_points(bound: int) -> np.ndarray:
    """Doubled coordinates of all nonzero x in O with nu(x) <= bound."""
    r = isqrt(4 * bound)
    ax = np.arange(-r, r + 1, dtype=np.int64)
    b, c, d = np.meshgrid(ax, ax, ax, indexing="ij")
    bcd = np.stack([b.ravel(), c.ravel(), d.ravel()], axis=1)
    sq = (bcd * bcd).sum(axis=1)
    par = bcd % 2
    same = (par[:, 0] == par[:, 1]) & (par[:, 1] == par[:, 2])
    chunks = []
    for a in ax:
        n = sq + a * a
        sel = (n <= 4 * bound) & (n > 0) & same & (par[:, 0] == a % 2)
        part = bcd[sel]
        chunks.append(np.column_stack([np.full(len(part), a, dtype=np.int64), part]))
    out = np.concatenate(chunks)
    out.flags.writeable = False
    return out


# ---------------------------------------------------------------------------
# primitive decomposition


@dataclass(frozen=True)
class PrimitiveDecomposition:
    u: int
    d: int
    beta0: HurwitzQuaternion

    def reconstruct(self) -> HurwitzQuaternion:
        x = self.beta0 * self.d
        for _ in range(self.u):
            x = PI2 * x
        return x

    def to_json(self) -> dict:
        return {"u": self.u, "d": self.d, "beta0": self.beta0.to_json()}


def odd_part(n: int) -> int:
    n = abs(n)
    while n and n % 2 == 0:
        n //= 2
    return n


def odd_content(beta: HurwitzQuaternion) -> int:
    """Largest odd d with beta/d in S (beta in S assumed)."""
    g = 0
    for v in beta.t:
        g = gcd(g, v // 2)
    return odd_part(g)


def pi2_valuation(x: HurwitzQuaternion) -> int:
    """Largest m with x in pi2^m O, by exact left division by pi2."""
    if x.is_zero():
        raise ValueError("valuation of zero")
    m = 0
    while True:
        y = PI2_INV * x
        if not y.in_order():
            return m
        x, m = y, m + 1


def primitive_decompose(beta: HurwitzQuaternion) -> PrimitiveDecomposition:
    if beta.is_zero():
        raise ValueError("primitive_decompose: beta must be nonzero")
    if not in_s_fast(beta):
        raise ValueError(f"primitive_decompose: {beta} is not in S")
    d = odd_content(beta)
    x = beta * Fraction(1, d)
    u = pi2_valuation(x) - 1
    for _ in range(u):
        x = PI2_INV * x
    return PrimitiveDecomposition(u, d, x)


def is_primitive(beta: HurwitzQuaternion) -> bool:
    if beta.is_zero() or not in_s_fast(beta):
        return False
    dec = primitive_decompose(beta)
    return dec.u == 0 and dec.d == 1


def v2(n: int) -> int:
    return (n & -n).bit_length() - 1


# ---------------------------------------------------------------------------
# vectorized lift keys

KEY_SHIFT = 20


def keys_from_doubled(t: np.ndarray, divisor: int = 1) -> np.ndarray:
    """Lift keys ``N << 20 | d`` for doubled-coordinate rows ``t / divisor``.

    A row outside S (including non-integral quotients) gets key 0.
    """
    t = np.asarray(t, dtype=np.int64)
    ok = np.all(t % (2 * divisor) == 0, axis=-1)
    x = np.where(ok[..., None], t // (2 * divisor), 0)
    ok &= (x.sum(axis=-1) % 2 == 0)
    n = (x * x).sum(axis=-1)
    ok &= n > 0
    g = np.gcd.reduce(np.abs(x), axis=-1)
    g = np.where(ok, g, 1)
    while True:
        even = (g % 2 == 0) & (g > 0)
        if not even.any():
            break
        g = np.where(even, g // 2, g)
    if (n >= (1 << (62 - KEY_SHIFT))).any() or (g >= (1 << KEY_SHIFT)).any():
        raise OverflowError("lift key out of range")
    return np.where(ok, (n << KEY_SHIFT) | g, 0)


def split_key(key: int) -> tuple[int, int]:
    return key >> KEY_SHIFT, key & ((1 << KEY_SHIFT) - 1)
