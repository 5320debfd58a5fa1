"""Exact arithmetic in Q(zeta_8), basis 1, z, z^2, z^3 with z^4 = -1."""
from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Sequence

from .exact import AlgebraicReal, format_rational, parse_rational

_ZETA = cmath.exp(1j * cmath.pi / 4)


class CyclotomicValue:
    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = (0, 0, 0, 0)):
        if len(coeffs) != 4:
            raise ValueError("a cyclotomic value has four coefficients")
        self.c = tuple(Fraction(v) for v in coeffs)

    @classmethod
    def _raw(cls, c: tuple) -> "CyclotomicValue":
        obj = object.__new__(cls)
        obj.c = c
        return obj

    @classmethod
    def zero(cls) -> "CyclotomicValue":
        return cls._raw((Fraction(0),) * 4)

    @classmethod
    def one(cls) -> "CyclotomicValue":
        return cls((1, 0, 0, 0))

    @classmethod
    def zeta(cls, k: int = 1) -> "CyclotomicValue":
        k %= 8
        sign = -1 if k >= 4 else 1
        c = [0, 0, 0, 0]
        c[k % 4] = sign
        return cls(c)

    @classmethod
    def sqrt2(cls) -> "CyclotomicValue":
        return cls((0, 1, 0, -1))

    @classmethod
    def coerce(cls, x) -> "CyclotomicValue":
        if isinstance(x, CyclotomicValue):
            return x
        if isinstance(x, (int, Fraction)):
            return cls((x, 0, 0, 0))
        if isinstance(x, AlgebraicReal):
            out = cls.zero()
            for r, q in x.terms.items():
                if r == 1:
                    out = out + cls((q, 0, 0, 0))
                elif r == 2:
                    out = out + cls.sqrt2() * q
                else:
                    raise ValueError(f"sqrt({r}) is not in Q(zeta_8)")
            return out
        raise TypeError(f"cannot coerce {type(x).__name__} to CyclotomicValue")

    def __bool__(self) -> bool:
        return any(self.c)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, AlgebraicReal)):
            other = CyclotomicValue.coerce(other)
        if not isinstance(other, CyclotomicValue):
            return NotImplemented
        return self.c == other.c

    def __hash__(self) -> int:
        return hash(self.c)

    def __add__(self, other):
        if not isinstance(other, CyclotomicValue):
            other = CyclotomicValue.coerce(other)
        return CyclotomicValue._raw(tuple(a + b for a, b in zip(self.c, other.c)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicValue._raw(tuple(-a for a in self.c))

    def __sub__(self, other):
        if not isinstance(other, CyclotomicValue):
            other = CyclotomicValue.coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicValue._raw(tuple(a * other for a in self.c))
        if not isinstance(other, CyclotomicValue):
            if isinstance(other, AlgebraicReal):
                other = CyclotomicValue.coerce(other)
            else:
                return NotImplemented
        acc = [Fraction(0)] * 4
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                if not b:
                    continue
                k = i + j
                if k >= 4:
                    acc[k - 4] -= a * b
                else:
                    acc[k] += a * b
        return CyclotomicValue._raw(tuple(acc))

    __rmul__ = __mul__

    def galois(self, k: int) -> "CyclotomicValue":
        """Image under zeta -> zeta^k (k odd)."""
        out = CyclotomicValue.zero()
        for i, a in enumerate(self.c):
            if a:
                out = out + CyclotomicValue.zeta(i * k) * a
        return out

    def conjugate(self) -> "CyclotomicValue":
        return self.galois(7)

    def norm(self) -> Fraction:
        prod = self * self.galois(3) * self.galois(5) * self.galois(7)
        assert not any(prod.c[1:]), "field norm must be rational"
        return prod.c[0]

    def inv(self) -> "CyclotomicValue":
        if not self:
            raise ZeroDivisionError("inverse of zero in Q(zeta_8)")
        others = self.galois(3) * self.galois(5) * self.galois(7)
        return others * (1 / self.norm())

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * CyclotomicValue.coerce(other).inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        out = CyclotomicValue.one()
        for _ in range(n):
            out = out * self
        return out

    def __complex__(self) -> complex:
        return sum(complex(float(a)) * _ZETA ** i for i, a in enumerate(self.c))

    def root_of_unity_index(self) -> int | None:
        """k with self == zeta^k, or None."""
        for k in range(8):
            if self == CyclotomicValue.zeta(k):
                return k
        return None

    def __repr__(self) -> str:
        return f"CyclotomicValue({[str(a) for a in self.c]})"

    def __str__(self) -> str:
        names = ("", "z", "z^2", "z^3")
        parts = []
        for a, n in zip(self.c, names):
            if a:
                parts.append(f"{a}" if not n else (n if a == 1 else f"({a})*{n}"))
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> list:
        return [format_rational(a) for a in self.c]

    @classmethod
    def from_json(cls, data) -> "CyclotomicValue":
        return cls([parse_rational(v) for v in data])
