"""Quaternions in B = Q + Qi + Qj + Qk and the Hurwitz order O.

A :class:`HurwitzQuaternion` stores doubled coordinates ``t`` so that the
element is ``(t0 + t1 i + t2 j + t3 k) / 2``.  For elements of O the ``t``
are integers of equal parity; general elements of B may carry
:class:`~fractions.Fraction` entries.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence, Union

import numpy as np

Coord = Union[int, Fraction]


def _norm_coord(x) -> Coord:
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    raise TypeError(f"quaternion coordinates must be exact, got {type(x).__name__}")


def _half(x: Coord) -> Coord:
    if isinstance(x, int) and x % 2 == 0:
        return x // 2
    return _norm_coord(Fraction(x) / 2)


def hamilton(x: Sequence, y: Sequence) -> tuple:
    """Raw Hamilton product of coordinate 4-tuples (no doubling)."""
    a1, b1, c1, d1 = x
    a2, b2, c2, d2 = y
    return (a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2)


def hamilton_np(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Broadcasting Hamilton product over the last axis (raw coordinates)."""
    a1, b1, c1, d1 = (x[..., i] for i in range(4))
    a2, b2, c2, d2 = (y[..., i] for i in range(4))
    return np.stack([a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
                     a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
                     a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
                     a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2], axis=-1)


def conj_np(x: np.ndarray) -> np.ndarray:
    return x * np.array([1, -1, -1, -1], dtype=x.dtype)


@dataclass(frozen=True, order=True)
class HurwitzQuaternion:
    t: tuple

    def __post_init__(self):
        t = tuple(_norm_coord(v) for v in self.t)
        if len(t) != 4:
            raise ValueError("a quaternion needs exactly four coordinates")
        object.__setattr__(self, "t", t)

    @classmethod
    def from_coords(cls, a, b=0, c=0, d=0) -> "HurwitzQuaternion":
        """Build from ordinary coordinates ``a + bi + cj + dk``."""
        return cls(tuple(_norm_coord(Fraction(v) * 2) for v in (a, b, c, d)))

    @classmethod
    def zero(cls) -> "HurwitzQuaternion":
        return cls((0, 0, 0, 0))

    @classmethod
    def one(cls) -> "HurwitzQuaternion":
        return cls((2, 0, 0, 0))

    @property
    def coords(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(v) / 2 for v in self.t)

    def in_order(self) -> bool:
        if not all(isinstance(v, int) for v in self.t):
            return False
        return len({v % 2 for v in self.t}) == 1

    def is_zero(self) -> bool:
        return not any(self.t)

    def __add__(self, other: "HurwitzQuaternion") -> "HurwitzQuaternion":
        return HurwitzQuaternion(tuple(a + b for a, b in zip(self.t, other.t)))

    def __sub__(self, other: "HurwitzQuaternion") -> "HurwitzQuaternion":
        return HurwitzQuaternion(tuple(a - b for a, b in zip(self.t, other.t)))

    def __neg__(self) -> "HurwitzQuaternion":
        return HurwitzQuaternion(tuple(-a for a in self.t))

    def __mul__(self, other):
        if isinstance(other, HurwitzQuaternion):
            return HurwitzQuaternion(tuple(_half(v) for v in hamilton(self.t, other.t)))
        if isinstance(other, (int, Fraction)):
            return HurwitzQuaternion(tuple(v * other for v in self.t))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def conj(self) -> "HurwitzQuaternion":
        t0, t1, t2, t3 = self.t
        return HurwitzQuaternion((t0, -t1, -t2, -t3))

    def norm(self) -> Coord:
        return _norm_coord(Fraction(sum(v * v for v in self.t), 4))

    def trace(self) -> Coord:
        return self.t[0]

    def real_part(self) -> Fraction:
        return Fraction(self.t[0], 2) if isinstance(self.t[0], int) else self.t[0] / 2

    def inverse(self) -> "HurwitzQuaternion":
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return self.conj() * (Fraction(1) / n)

    def divisible_by(self, n: int) -> bool:
        """True when ``self / n`` lies in O."""
        return (self * Fraction(1, n)).in_order()

    def __str__(self) -> str:
        return format_quaternion(self)

    def to_json(self) -> list:
        if not all(isinstance(v, int) for v in self.t):
            return [f"{Fraction(v).numerator}/{Fraction(v).denominator}" for v in self.t]
        return list(self.t)

    @classmethod
    def from_json(cls, data: Sequence) -> "HurwitzQuaternion":
        return cls(tuple(Fraction(v) if isinstance(v, str) else int(v) for v in data))


Q = HurwitzQuaternion
ONE = Q((2, 0, 0, 0))
I = Q((0, 2, 0, 0))
J = Q((0, 0, 2, 0))
K = Q((0, 0, 0, 2))
OMEGA = Q((1, 1, 1, 1))
PI2 = Q((2, 2, 0, 0))  # 1 + i
PI2_INV = Q((1, -1, 0, 0))  # (1 - i) / 2

HURWITZ_BASIS = (ONE, I, J, OMEGA)


def quat_arith(op: str, x: HurwitzQuaternion, y: HurwitzQuaternion | None = None):
    if op == "conj":
        return x.conj()
    if op == "neg":
        return -x
    if y is None:
        raise ValueError(f"operation {op!r} needs two operands")
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown quaternion operation {op!r}")


def norm_trace(x: HurwitzQuaternion) -> tuple[Coord, Coord]:
    return x.norm(), x.trace()


_TERM_RE = re.compile(r"([+-]?)\s*([0-9./]*)\s*\*?\s*(ij|[ijk]?)")


def parse_quaternion(text: str) -> HurwitzQuaternion:
    """Parse ``"a+bi+cj+dk"`` (rational components, ``ij`` means k).

    A whole expression may be wrapped as ``"(…)/n"``.
    """
    return HurwitzQuaternion.from_coords(*parse_components(text))


def parse_components(text: str) -> tuple[Fraction, ...]:
    """Rational coordinates of ``"a+bi+cj+dk"``; decimals are read exactly."""
    s = text.replace(" ", "")
    scale = Fraction(1)
    m = re.fullmatch(r"\((.*)\)/(\d+)", s)
    if m:
        s, scale = m.group(1), Fraction(1, int(m.group(2)))
    if not s:
        raise ValueError("empty quaternion")
    acc = [Fraction(0)] * 4
    pos = 0
    slot = {"": 0, "i": 1, "j": 2, "k": 3, "ij": 3}
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos or (not m.group(2) and not m.group(3)):
            raise ValueError(f"cannot parse quaternion {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        acc[slot[m.group(3)]] += sign * coeff
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"cannot parse quaternion {text!r}")
    return tuple(a * scale for a in acc)


def format_quaternion(x: HurwitzQuaternion) -> str:
    parts = []
    for c, unit in zip(x.coords, ("", "i", "j", "k")):
        if c == 0:
            continue
        mag = abs(c)
        body = str(mag) if (unit == "" or mag != 1) else ""
        parts.append(("-" if c < 0 else "+") + body + unit)
    if not parts:
        return "0"
    out = "".join(parts)
    return out[1:] if out[0] == "+" else out


@lru_cache(maxsize=None)
def units() -> tuple[HurwitzQuaternion, ...]:
    """The 24 units of O, found by brute force over doubled coordinates."""
    found = [Q(t) for t in product(range(-2, 3), repeat=4)
             if sum(v * v for v in t) == 4 and len({v % 2 for v in t}) == 1]
    return tuple(sorted(found, key=lambda q: tuple(-v for v in q.t)))


def units_array() -> np.ndarray:
    """Units as raw doubled-coordinate int64 array of shape (24, 4)."""
    return np.array([u.t for u in units()], dtype=np.int64)


def euclid_div(a: HurwitzQuaternion, b: HurwitzQuaternion
               ) -> tuple[HurwitzQuaternion, HurwitzQuaternion]:
    """Right division ``a = q*b + r`` with ``nu(r) < nu(b)``."""
    if b.is_zero():
        raise ZeroDivisionError("euclid_div by zero")
    if not (a.in_order() and b.in_order()):
        raise ValueError("euclid_div needs Hurwitz integers")
    x = (a * b.conj()) * (Fraction(1) / b.norm())
    coords = x.coords
    cands = set()
    for shift in (Fraction(0), Fraction(1, 2)):
        choices = []
        for c in coords:
            lo = (c - shift).__floor__() + shift
            choices.append((lo, lo + 1))
        for pick in product(*choices):
            cands.add(HurwitzQuaternion.from_coords(*pick))
    best = min(cands, key=lambda q: ((a - q * b).norm(), q.t))
    r = a - best * b
    assert r.norm() < b.norm()
    return best, r


# ---------------------------------------------------------------------------
# 2x2 matrices over O and the generator decomposition


@dataclass(frozen=True)
class QuaternionMatrix2:
    a: HurwitzQuaternion
    b: HurwitzQuaternion
    c: HurwitzQuaternion
    d: HurwitzQuaternion

    def __matmul__(self, o: "QuaternionMatrix2") -> "QuaternionMatrix2":
        return QuaternionMatrix2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                                 self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    @classmethod
    def identity(cls) -> "QuaternionMatrix2":
        z = HurwitzQuaternion.zero()
        return cls(ONE, z, z, ONE)

    def entries(self) -> tuple[HurwitzQuaternion, ...]:
        return (self.a, self.b, self.c, self.d)

    def to_json(self) -> list:
        return [e.to_json() for e in self.entries()]


Generator = tuple  # ("S",) | ("D", unit) | ("T", v)


def generator_matrix(g: Generator) -> QuaternionMatrix2:
    z = HurwitzQuaternion.zero()
    if g[0] == "S":
        return QuaternionMatrix2(z, ONE, -ONE, z)
    if g[0] == "D":
        if g[1].norm() != 1 or not g[1].in_order():
            raise ValueError(f"D needs a unit, got {g[1]}")
        return QuaternionMatrix2(g[1], z, z, ONE)
    if g[0] == "T":
        if not g[1].in_order():
            raise ValueError(f"T needs an element of O, got {g[1]}")
        return QuaternionMatrix2(ONE, g[1], z, ONE)
    raise ValueError(f"unknown generator {g[0]!r}")


def recompose(word: Iterable[Generator]) -> QuaternionMatrix2:
    m = QuaternionMatrix2.identity()
    for g in word:
        m = m @ generator_matrix(g)
    return m


@dataclass(frozen=True)
class Decomposition:
    invertible: bool
    word: tuple
    reason: str = ""


def _inverse_word(g: Generator) -> list[Generator]:
    if g[0] == "S":
        return [("S",), ("S",), ("S",)]
    if g[0] == "T":
        return [("T", -g[1])]
    return [("D", g[1].inverse())]


def generator_decompose(m: QuaternionMatrix2) -> Decomposition:
    """Write ``m`` as a product of S, D_u, T_v, or report non-invertibility."""
    if not all(e.in_order() for e in m.entries()):
        raise ValueError("matrix entries must lie in O")
    applied: list[Generator] = []
    cur = m
    while not cur.c.is_zero():
        q, _ = euclid_div(cur.a, cur.c)
        if not q.is_zero():
            op = ("T", -q)
            cur = generator_matrix(op) @ cur
            applied.append(op)
        cur = generator_matrix(("S",)) @ cur
        applied.append(("S",))
    alpha, beta, delta = cur.a, cur.b, cur.d
    if alpha.norm() != 1 or delta.norm() != 1:
        return Decomposition(False, (), "diagonal entry is not a unit")
    word: list[Generator] = []
    for op in applied:
        word.extend(_inverse_word(op))
    if alpha != ONE:
        word.append(("D", alpha))
    if delta != ONE:
        word.extend([("S",), ("D", delta), ("S",), ("S",), ("S",)])
    w = alpha.inverse() * beta
    if not w.is_zero():
        word.append(("T", w))
    return Decomposition(True, tuple(word))


def format_word(word: Iterable[Generator]) -> list[str]:
    out = []
    for g in word:
        out.append("S" if g[0] == "S" else f"{g[0]}[{format_quaternion(g[1])}]")
    return out
