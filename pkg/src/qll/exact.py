"""Exact arithmetic: rationals, real multi-quadratic towers, and symbolic
polynomials in the Hecke indeterminates.

Rationals are :class:`fractions.Fraction`.  An :class:`AlgebraicReal` is a
finite sum ``sum q_r * sqrt(r)`` over squarefree radicands ``r``; the
representation is a normal form, so equality is structural.
:class:`SymbolicValue` is a polynomial whose coefficients live in such a
field (or in any other exact field with the same operator surface, e.g.
:class:`qll.cyclotomic.CyclotomicValue`).
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd, isqrt, sqrt
from typing import Iterable, Mapping, Union

from sympy import factorint, primefactors

Rational = Fraction
Scalar = Union[int, Fraction]


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str | int) -> Fraction:
    if isinstance(text, int):
        return Fraction(text)
    return Fraction(text.strip())


@lru_cache(maxsize=4096)
def squarefree_split(n: int) -> tuple[int, int]:
    """Return ``(s, r)`` with ``n == s*s*r`` and ``r`` squarefree."""
    if n < 1:
        raise ValueError(f"squarefree_split needs a positive integer, got {n}")
    s, r = 1, 1
    for p, e in factorint(n).items():
        s *= p ** (e // 2)
        if e % 2:
            r *= p
    return s, r


@lru_cache(maxsize=4096)
def _radicand_primes(r: int) -> tuple[int, ...]:
    return tuple(primefactors(r))


class AlgebraicReal:
    """Element of Q(sqrt r_1, ..., sqrt r_k), stored as ``{r: q_r}``."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Scalar] | Scalar | None = None):
        if terms is None:
            terms = {}
        elif not isinstance(terms, Mapping):
            terms = {1: terms}
        acc: dict[int, Fraction] = {}
        for r, q in terms.items():
            r = int(r)
            if r < 1:
                raise ValueError(f"radicand must be positive, got {r}")
            s, core = squarefree_split(r)
            acc[core] = acc.get(core, Fraction(0)) + Fraction(q) * s
        self._terms = tuple(sorted((r, q) for r, q in acc.items() if q))
        self._hash = None

    @classmethod
    def _raw(cls, items: Iterable[tuple[int, Fraction]]) -> "AlgebraicReal":
        obj = object.__new__(cls)
        obj._terms = tuple(sorted((r, q) for r, q in items if q))
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x) -> "AlgebraicReal":
        if isinstance(x, AlgebraicReal):
            return x
        if isinstance(x, (int, Fraction)):
            return cls._raw([(1, Fraction(x))])
        raise TypeError(f"cannot coerce {type(x).__name__} to AlgebraicReal")

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def radicands(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self._terms)

    def is_rational(self) -> bool:
        return all(r == 1 for r, _ in self._terms)

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self._terms[0][1] if self._terms else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __float__(self) -> float:
        return sum((float(q) * sqrt(r) for r, q in self._terms), 0.0)

    def __hash__(self) -> int:
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_value())
            else:
                self._hash = hash(self._terms)
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = AlgebraicReal.coerce(other)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self._terms == other._terms

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicReal.coerce(other)
        elif not isinstance(other, AlgebraicReal):
            return NotImplemented
        acc = dict(self._terms)
        for r, q in other._terms:
            acc[r] = acc.get(r, 0) + q
        return AlgebraicReal._raw(acc.items())

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicReal._raw((r, -q) for r, q in self._terms)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = AlgebraicReal.coerce(other)
        elif not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return AlgebraicReal._raw(())
            return AlgebraicReal._raw((r, q * other) for r, q in self._terms)
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        acc: dict[int, Fraction] = {}
        for r, a in self._terms:
            for s, b in other._terms:
                g = gcd(r, s)
                key = (r // g) * (s // g)
                acc[key] = acc.get(key, 0) + a * b * g
        return AlgebraicReal._raw(acc.items())

    __rmul__ = __mul__

    def conjugate(self, prime: int) -> "AlgebraicReal":
        """Galois conjugate sending sqrt(prime) to -sqrt(prime)."""
        return AlgebraicReal._raw(
            (r, -q if r % prime == 0 else q) for r, q in self._terms)

    def inv(self) -> "AlgebraicReal":
        if not self._terms:
            raise ZeroDivisionError("inverse of zero in AlgebraicReal")
        primes = sorted({p for r, _ in self._terms for p in _radicand_primes(r)})
        acc = AlgebraicReal.coerce(1)
        b = self
        for p in primes:
            c = b.conjugate(p)
            acc = acc * c
            b = b * c
        norm = b.rational_value()
        return acc * (1 / norm)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of AlgebraicReal by zero")
            return self * (1 / Fraction(other))
        if not isinstance(other, AlgebraicReal):
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        return AlgebraicReal.coerce(other) * self.inv()

    def __pow__(self, n: int):
        if n < 0:
            return self.inv() ** (-n)
        result = AlgebraicReal.coerce(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __repr__(self) -> str:
        return f"AlgebraicReal({dict(self._terms)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for r, q in self._terms:
            qs = str(q)
            parts.append(qs if r == 1 else (f"√{r}" if q == 1 else f"({qs})√{r}"))
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"terms": [[r, format_rational(q)] for r, q in self._terms]}

    @classmethod
    def from_json(cls, data: Mapping) -> "AlgebraicReal":
        return cls({int(r): parse_rational(q) for r, q in data["terms"]})


def sqrt_of(n: int | Fraction) -> AlgebraicReal:
    """Exact square root of a positive integer (or rational, as sqrt(ab)/b)."""
    q = Fraction(n)
    if q <= 0:
        raise ValueError(f"sqrt_of needs a positive argument, got {n}")
    num, den = q.numerator, q.denominator
    s, r = squarefree_split(num * den)
    return AlgebraicReal._raw([(r, Fraction(s, den))])


def field_arith(op: str, a, b=None) -> AlgebraicReal:
    a = AlgebraicReal.coerce(a)
    if op == "neg":
        return -a
    if op == "inv":
        return a.inv()
    if b is None:
        raise ValueError(f"operation {op!r} needs two operands")
    b = AlgebraicReal.coerce(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown field operation {op!r}")


# ---------------------------------------------------------------------------
# symbolic polynomials

_VAR_RE = re.compile(r"^(eps|lam\d+|D\d+|c\d+)$")
_KIND_ORDER = {"eps": 0, "lam": 1, "D": 2, "c": 3}

Monomial = tuple  # tuple[tuple[str, int], ...], sorted by _var_key


def _var_key(name: str) -> tuple[int, int]:
    if name == "eps":
        return (0, 0)
    m = re.match(r"^([a-zA-Z]+)(\d+)$", name)
    return (_KIND_ORDER[m.group(1)], int(m.group(2)))


def _check_var(name: str) -> str:
    if not _VAR_RE.match(name):
        raise ValueError(f"unsupported indeterminate {name!r}")
    return name


@lru_cache(maxsize=65536)
def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    acc = dict(a)
    for v, e in b:
        acc[v] = acc.get(v, 0) + e
    if "eps" in acc:
        acc["eps"] %= 2
    return tuple(sorted(((v, e) for v, e in acc.items() if e),
                        key=lambda ve: _var_key(ve[0])))


def format_monomial(m: Monomial) -> str:
    if not m:
        return "1"
    return "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)


def parse_monomial(text: str) -> Monomial:
    if text == "1":
        return ()
    acc = {}
    for part in text.split("*"):
        v, _, e = part.partition("^")
        acc[_check_var(v)] = acc.get(v, 0) + (int(e) if e else 1)
    return _mono_mul(tuple(sorted(acc.items(), key=lambda ve: _var_key(ve[0]))), ())


class SymbolicValue:
    """Polynomial in eps, lam<p>, D<p> and seed symbols c<m>.

    ``eps`` is reduced with eps^2 = 1 on every product.  Coefficients default
    to :class:`AlgebraicReal`; any exact field type with ``+``, ``*``, unary
    ``-`` and truthiness works, as long as one value does not mix types.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, object] | None = None):
        self._terms = {m: c for m, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def const(cls, c) -> "SymbolicValue":
        if isinstance(c, (int, Fraction)):
            c = AlgebraicReal.coerce(c)
        return cls({(): c})

    @classmethod
    def var(cls, name: str, coeff=None) -> "SymbolicValue":
        _check_var(name)
        if coeff is None:
            coeff = AlgebraicReal.coerce(1)
        return cls({((name, 1),): coeff})

    @classmethod
    def eps(cls) -> "SymbolicValue":
        return cls.var("eps")

    @classmethod
    def lam(cls, p: int) -> "SymbolicValue":
        return cls.var(f"lam{p}")

    @classmethod
    def seed(cls, m: int) -> "SymbolicValue":
        return cls.var(f"c{m}")

    @classmethod
    def coerce(cls, x) -> "SymbolicValue":
        if isinstance(x, SymbolicValue):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        return cls({(): x})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def variables(self) -> set[str]:
        return {v for m in self._terms for v, _ in m}

    def __eq__(self, other) -> bool:
        if not isinstance(other, SymbolicValue):
            if isinstance(other, (int, Fraction, AlgebraicReal)):
                other = SymbolicValue.coerce(other)
            else:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other):
        if not isinstance(other, SymbolicValue):
            other = SymbolicValue.coerce(other)
        acc = dict(self._terms)
        for m, c in other._terms.items():
            if m in acc:
                s = acc[m] + c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
            else:
                acc[m] = c
        out = SymbolicValue.__new__(SymbolicValue)
        out._terms = acc
        out._hash = None
        return out

    __radd__ = __add__

    def __neg__(self):
        out = SymbolicValue.__new__(SymbolicValue)
        out._terms = {m: -c for m, c in self._terms.items()}
        out._hash = None
        return out

    def __sub__(self, other):
        if not isinstance(other, SymbolicValue):
            other = SymbolicValue.coerce(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, k) -> "SymbolicValue":
        """Multiply every coefficient by a scalar of the coefficient field."""
        if not k:
            return SymbolicValue()
        out = SymbolicValue.__new__(SymbolicValue)
        out._terms = {m: c * k for m, c in self._terms.items()}
        out._hash = None
        return out

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, AlgebraicReal)):
            return self.scale(other)
        if not isinstance(other, SymbolicValue):
            return NotImplemented
        acc: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = _mono_mul(m1, m2)
                c = c1 * c2
                if m in acc:
                    acc[m] = acc[m] + c
                else:
                    acc[m] = c
        return SymbolicValue(acc)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not supported")
        result = SymbolicValue.const(1)
        for _ in range(n):
            result = result * self
        return result

    def map_coefficients(self, f) -> "SymbolicValue":
        return SymbolicValue({m: f(c) for m, c in self._terms.items()})

    def coefficient(self, monomial: Monomial | str):
        if isinstance(monomial, str):
            monomial = parse_monomial(monomial)
        return self._terms.get(monomial)

    def reduce_square(self, name: str, replacement: "SymbolicValue") -> "SymbolicValue":
        """Rewrite ``name^2`` as ``replacement`` until ``name`` has degree <= 1."""
        result = SymbolicValue()
        for m, c in self._terms.items():
            e = dict(m).get(name, 0)
            rest = tuple((v, k) for v, k in m if v != name)
            term = SymbolicValue({rest: c})
            if e % 2:
                term = term * SymbolicValue.var(name)
            for _ in range(e // 2):
                term = term * replacement
            result = result + term
        return result

    def substitute(self, bindings: Mapping[str, object], partial: bool = False):
        """Evaluate with ``bindings``; returns a coefficient-field element.

        With ``partial=True`` unbound variables are kept and a
        :class:`SymbolicValue` is returned.
        """
        for name, val in bindings.items():
            if name == "eps" and val not in (1, -1) and not isinstance(val, SymbolicValue):
                raise ValueError("eps must be bound to +1 or -1")
        result = SymbolicValue()
        for m, c in self._terms.items():
            term = SymbolicValue({(): c})
            for v, e in m:
                if v in bindings:
                    val = bindings[v]
                    factor = val if isinstance(val, SymbolicValue) else SymbolicValue.coerce(val)
                    for _ in range(e):
                        term = term * factor
                elif partial:
                    term = term * SymbolicValue({((v, e),): _one_like(c)})
                else:
                    raise KeyError(f"unbound indeterminate {v!r}")
            result = result + term
        if partial:
            return result
        if result.variables():
            missing = sorted(result.variables())
            raise KeyError(f"unbound indeterminate {missing[0]!r}")
        return result._terms.get((), _zero_like(self))

    def __repr__(self) -> str:
        return f"SymbolicValue({self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(f"({c})*{format_monomial(m)}" if m else f"({c})"
                          for m, c in self._sorted_items())

    def _sorted_items(self):
        return sorted(self._terms.items(),
                      key=lambda mc: [(_var_key(v), e) for v, e in mc[0]])

    def to_json(self) -> list:
        return [[format_monomial(m), c.to_json()] for m, c in self._sorted_items()]

    @classmethod
    def from_json(cls, data: list) -> "SymbolicValue":
        return cls({parse_monomial(m): AlgebraicReal.from_json(c) for m, c in data})


def _one_like(c):
    if isinstance(c, AlgebraicReal):
        return AlgebraicReal.coerce(1)
    return type(c).one()


def _zero_like(v: SymbolicValue):
    for c in v._terms.values():
        if isinstance(c, AlgebraicReal):
            return AlgebraicReal()
        return type(c).zero()
    return AlgebraicReal()


def substitute(expr: SymbolicValue, bindings: Mapping[str, object]):
    return expr.substitute(bindings)


def is_perfect_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n
