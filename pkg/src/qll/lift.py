"""Lift coefficients A(beta), coefficient sources, and the Hecke action on
lifted coefficients with exact equivariance checks.

``A(beta)`` depends only on ``N = nu(beta)`` and the odd content ``d`` of
beta (``u`` is ``v2(N) - 1``), so it is memoized by the pair ``(N, d)``.
"""
from __future__ import annotations

import math
import random
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Union

import numpy as np
from sympy import divisors, factorint, isprime

from .errors import ConfigError, SourceError, UsageError
from .exact import AlgebraicReal, SymbolicValue, sqrt_of
from .hecke_local import enumerate_cp
from .lattice import (PrimitiveDecomposition, in_s_fast, keys_from_doubled,
                      odd_content, primitive_decompose, s_points, split_key, v2)
from .quaternion import PI2, PI2_INV, HurwitzQuaternion, hamilton_np

Value = Union[SymbolicValue, float]


def seeded_rational(seed: int, label: str) -> Fraction:
    """Deterministic nonzero rational drawn from a per-label stream."""
    rng = random.Random(f"{seed}:{label}")
    num = rng.choice([v for v in range(-50, 51) if v])
    return Fraction(num, rng.randint(1, 16))


def _as_symbolic(x) -> SymbolicValue:
    if isinstance(x, SymbolicValue):
        return x
    if isinstance(x, (int, Fraction, AlgebraicReal)):
        return SymbolicValue.const(AlgebraicReal.coerce(x))
    raise TypeError(f"cannot use {type(x).__name__} as an exact coefficient")


class _Memo:
    """Dictionary memo with idempotent fill under a lock."""

    def __init__(self):
        self._data: dict = {}
        self._lock = threading.Lock()

    def get(self, key, compute):
        try:
            return self._data[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._data.setdefault(key, value)


@dataclass
class HeckeSource:
    """Coefficients generated from seeds by the Hecke relations.

    ``primes`` are the active odd primes, extended by
    ``c(p n) = p^(-1/2) lam_p c(n) - p^(-1) c(n/p)``.  With ``newform`` the
    prime 2 is active too, via ``c(2m) = -(eps/2) c(m)``.  Indices coprime to
    the active primes are seeds: taken from ``seeds`` or, with
    ``symbolic_default``, given independent symbols ``c<m>``; with
    ``random_seed`` set they are instead seeded random rationals, one
    deterministic stream per index.  ``eps=None`` and missing ``lam``
    entries mean symbolic.  ``overrides`` pins values at
    specific indices (used to build deliberately inconsistent sources).
    """

    primes: tuple = ()
    newform: bool = False
    eps: int | None = None
    lam: Mapping[int, object] = field(default_factory=dict)
    seeds: Mapping[int, object] = field(default_factory=dict)
    symbolic_default: bool = True
    overrides: Mapping[int, object] = field(default_factory=dict)
    random_seed: int | None = None
    exact = True

    def __post_init__(self):
        self.primes = tuple(sorted(set(self.primes)))
        for p in self.primes:
            if p == 2 or not isprime(p):
                raise ConfigError(f"active primes must be odd primes, got {p}", "primes")
        if self.eps not in (None, 1, -1):
            raise ConfigError(f"eps must be +1, -1 or symbolic, got {self.eps}", "eps")
        self._values = _Memo()
        self._lifts = _Memo()

    def eps_value(self) -> SymbolicValue:
        return SymbolicValue.eps() if self.eps is None else _as_symbolic(self.eps)

    def lam_value(self, p: int) -> SymbolicValue:
        if p in self.lam and self.lam[p] is not None:
            return _as_symbolic(self.lam[p])
        return SymbolicValue.lam(p)

    def zero(self) -> SymbolicValue:
        return SymbolicValue()

    def _seed(self, m0: int) -> SymbolicValue:
        if m0 in self.seeds:
            return _as_symbolic(self.seeds[m0])
        if self.random_seed is not None:
            return _as_symbolic(seeded_rational(self.random_seed, f"c{m0}"))
        if self.symbolic_default:
            return SymbolicValue.seed(m0)
        active = set(self.primes) | ({2} if self.newform else set())
        outside = sorted(q for q in factorint(m0) if q not in active)
        if outside:
            raise SourceError(f"c(-{m0}) needs prime {outside[0]}, which is not active and has no seed")
        raise SourceError(f"no seed for c(-{m0})")

    def value(self, n: int) -> SymbolicValue:
        if n >= 0:
            raise ValueError(f"source_value needs a negative index, got {n}")
        return self._values.get(n, lambda: self._compute(-n))

    def _compute(self, m: int) -> SymbolicValue:
        if m in self.overrides:
            return _as_symbolic(self.overrides[m])
        m0 = m
        factor = SymbolicValue.const(1)
        if self.newform:
            a = v2(m0)
            m0 >>= a
            step = self.eps_value().scale(AlgebraicReal.coerce(Fraction(-1, 2)))
            for _ in range(a):
                factor = factor * step
        for p in self.primes:
            k = 0
            while m0 % p == 0:
                m0 //= p
                k += 1
            if k:
                factor = factor * self._hecke_poly(p, k)
        return factor * self._seed(m0)

    def _hecke_poly(self, p: int, k: int) -> SymbolicValue:
        """X_k with c(m p^k) = X_k c(m) for p not dividing m."""
        r = sqrt_of(Fraction(1, p))
        lam = self.lam_value(p).scale(r)
        prev, cur = SymbolicValue(), SymbolicValue.const(1)
        for _ in range(k):
            prev, cur = cur, lam * cur - prev.scale(AlgebraicReal.coerce(Fraction(1, p)))
        return cur


@dataclass
class FileSource:
    """Numeric coefficients read from a file; absent indices are zero."""

    values: Mapping[int, object]
    r: float | None
    eps: int
    exact = False

    def __post_init__(self):
        self._lifts = _Memo()

    def zero(self) -> float:
        return 0.0

    def eps_value(self) -> int:
        return self.eps

    def value(self, n: int):
        if n >= 0:
            raise ValueError(f"source_value needs a negative index, got {n}")
        return self.values.get(n, 0)


def source_value(src, n: int):
    return src.value(n)


# ---------------------------------------------------------------------------
# lift coefficients


def lift_value(src, norm: int, d: int):
    """A(beta) for any beta in S with nu(beta) = norm and odd content d."""
    return src._lifts.get((norm, d), lambda: _lift_compute(src, norm, d))


def _lift_compute(src, norm: int, d: int):
    u = v2(norm) - 1
    if u < 0:
        raise ValueError(f"norm {norm} is not the norm of an element of S")
    ns = divisors(d)
    if src.exact:
        total = SymbolicValue()
        sign = SymbolicValue.const(1)
        step = -src.eps_value()
        for t in range(u + 1):
            inner = SymbolicValue()
            for n in ns:
                q, rem = divmod(norm, (2 << t) * n * n)
                assert rem == 0, "lift index is not an integer"
                inner = inner + src.value(-q)
            total = total + sign * inner
            sign = sign * step
        return total.scale(sqrt_of(norm))
    total = 0.0
    for t in range(u + 1):
        inner = 0.0
        for n in ns:
            q, rem = divmod(norm, (2 << t) * n * n)
            assert rem == 0, "lift index is not an integer"
            inner += float(src.value(-q))
        total += (-src.eps) ** t * inner
    return math.sqrt(norm) * total


def lift_value_from_key(src, key: int):
    if key == 0:
        return src.zero()
    n, d = split_key(int(key))
    return lift_value(src, n, d)


@dataclass(frozen=True)
class LiftCoefficient:
    beta: HurwitzQuaternion
    value: object
    decomposition: PrimitiveDecomposition

    def to_json(self) -> dict:
        v = self.value
        return {"beta": self.beta.to_json(), "decomposition": self.decomposition.to_json(),
                "value": v.to_json() if isinstance(v, SymbolicValue) else float(v)}


def lift_coeff(src, beta: HurwitzQuaternion) -> LiftCoefficient:
    if beta.is_zero() or not in_s_fast(beta):
        raise ValueError(f"lift_coeff needs a nonzero element of S, got {beta}")
    dec = primitive_decompose(beta)
    return LiftCoefficient(beta, lift_value(src, beta.norm(), dec.d), dec)


def coefficient_at(src, x: HurwitzQuaternion):
    """A(x), with A(x) = 0 for x outside S (or x = 0)."""
    if x.is_zero() or not in_s_fast(x):
        return src.zero()
    return lift_value(src, x.norm(), odd_content(x))


# ---------------------------------------------------------------------------
# Hecke operators


@dataclass(frozen=True)
class HeckeOperatorId:
    p: int
    shape: str = "two"

    def __post_init__(self):
        if self.p == 2:
            if self.shape != "two":
                raise UsageError("p = 2 has a single operator")
        elif not isprime(self.p):
            raise UsageError(f"p must be prime, got {self.p}")
        elif self.shape not in ("a", "b", "c"):
            raise UsageError(f"shape must be a, b or c, got {self.shape!r}")

    @classmethod
    def make(cls, p: int, shape: str | None = None) -> "HeckeOperatorId":
        return cls(p, "two" if p == 2 else (shape or "b"))


def eigenvalue(op: HeckeOperatorId, src) -> SymbolicValue:
    p = op.p
    if op.shape == "two":
        return src.eps_value().scale(sqrt_of(2) * -3)
    lam = src.lam_value(p)
    if op.shape in ("a", "b"):
        return lam.scale(AlgebraicReal.coerce(p * (p + 1)))
    return (lam * lam).scale(AlgebraicReal.coerce(p * p)) + (p ** 3 + p)


def _reps(p: int) -> list[HurwitzQuaternion]:
    return list(enumerate_cp(p).representatives)


def hecke_apply(op: HeckeOperatorId, src, beta: HurwitzQuaternion):
    """(K h K . F)_beta from the coefficients of F, term by term."""
    A = lambda x: coefficient_at(src, x)  # noqa: E731
    p = op.p
    if op.shape == "two":
        return (A(beta * PI2_INV) + A(beta * PI2)) * 2
    reps = _reps(p)
    inv_p = Fraction(1, p)
    if op.shape == "a":
        s = sum((A(beta * a * inv_p) for a in reps), src.zero())
        s = s + sum((A(a.conj() * beta) for a in reps), src.zero())
        return s * p
    if op.shape == "b":
        s = sum((A(a.conj() * beta * inv_p) for a in reps), src.zero())
        s = s + sum((A(beta * a) for a in reps), src.zero())
        return s * p
    s = (A(beta * inv_p) + A(beta * p)) * (p * p)
    inner = src.zero()
    for a1 in reps:
        left = a1.conj() * beta
        for a2 in reps:
            inner = inner + A(left * a2 * inv_p)
    return s + inner * p


@dataclass
class EquivarianceReport:
    p: int
    shape: str
    bound: int
    eigenvalue: SymbolicValue
    checked: int
    signatures: int
    witnesses: list

    @property
    def status(self) -> str:
        return "fail" if self.witnesses else "pass"

    def to_json(self) -> dict:
        return {"p": self.p, "shape": self.shape, "bound": self.bound,
                "eigenvalue": self.eigenvalue.to_json(),
                "eigenvalue_text": str(self.eigenvalue),
                "checked": self.checked, "signatures": self.signatures,
                "witnesses": self.witnesses}


def _term_groups(op: HeckeOperatorId, t: np.ndarray) -> tuple[list[np.ndarray], list[int]]:
    """Key arrays (one per term group) for doubled coordinates ``t``."""
    p = op.p
    if op.shape == "two":
        w_inv = np.array(PI2_INV.t, dtype=np.int64)
        w = np.array(PI2.t, dtype=np.int64)
        g1 = keys_from_doubled(hamilton_np(t, w_inv), 2)[:, None]
        g2 = keys_from_doubled(hamilton_np(t, w), 2)[:, None]
        return [g1, g2], [2, 2]
    reps = np.array([a.t for a in _reps(p)], dtype=np.int64)
    conj = reps * np.array([1, -1, -1, -1])
    tt = t[:, None, :]
    if op.shape == "a":
        g1 = keys_from_doubled(hamilton_np(tt, reps[None]), 2 * p)
        g2 = keys_from_doubled(hamilton_np(conj[None], tt), 2)
        return [g1, g2], [p, p]
    if op.shape == "b":
        g1 = keys_from_doubled(hamilton_np(conj[None], tt), 2 * p)
        g2 = keys_from_doubled(hamilton_np(tt, reps[None]), 2)
        return [g1, g2], [p, p]
    g1 = keys_from_doubled(t, p)[:, None]
    g2 = keys_from_doubled(t * p, 1)[:, None]
    left = hamilton_np(conj[None], tt)  # (n, p+1, 4), raw = 2 * doubled
    both = hamilton_np(left[:, :, None, :], reps[None, None, :, :])
    g3 = keys_from_doubled(both.reshape(len(t), -1, 4), 4 * p)
    return [g1, g2, g3], [p * p, p * p, p]


def verify_equivariance(op: HeckeOperatorId, src, norm_bound: int,
                        chunk: int = 8192) -> EquivarianceReport:
    """Check hecke_apply - mu * A(beta) == 0 exactly for nu(beta) <= bound."""
    if not getattr(src, "exact", False):
        raise ConfigError("equivariance checks need an exact coefficient source", "source")
    if op.p == 2 and not src.newform:
        raise ConfigError("p = 2 needs a source obeying the newform relation", "newform")
    if op.p != 2 and op.p not in src.primes:
        raise ConfigError(f"source does not apply the Hecke relation at p = {op.p}", "primes")
    mu = eigenvalue(op, src)
    pts = s_points(norm_bound)
    sigs, firsts = [], []
    for start in range(0, len(pts), chunk):
        t = 2 * pts[start:start + chunk]
        groups, _ = _term_groups(op, t)
        own = keys_from_doubled(t, 1)[:, None]
        sig = np.concatenate([own] + [np.sort(g, axis=1) for g in groups], axis=1)
        uniq, idx = np.unique(sig, axis=0, return_index=True)
        sigs.append(uniq)
        firsts.append(idx + start)
    allsig = np.concatenate(sigs)
    allfirst = np.concatenate(firsts)
    uniq, pos = np.unique(allsig, axis=0, return_index=True)
    _, mults = _term_groups(op, 2 * pts[:1])
    widths = [g.shape[1] for g in _term_groups(op, 2 * pts[:1])[0]]
    witnesses = []
    for row, ix in zip(uniq, allfirst[pos]):
        total = SymbolicValue()
        col = 1
        for width, mult in zip(widths, mults):
            group = SymbolicValue()
            for key in row[col:col + width]:
                if key:
                    group = group + lift_value_from_key(src, key)
            total = total + group.scale(AlgebraicReal.coerce(mult))
            col += width
        diff = total - mu * lift_value_from_key(src, row[0])
        if diff:
            beta = HurwitzQuaternion(tuple(int(2 * v) for v in pts[ix]))
            witnesses.append({"beta": beta.to_json(), "residual": str(diff)})
    witnesses.sort(key=lambda w: (sum(v * v for v in w["beta"]), w["beta"]))
    return EquivarianceReport(op.p, op.shape, norm_bound, mu, len(pts), len(uniq), witnesses)
