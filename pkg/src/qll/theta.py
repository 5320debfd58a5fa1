"""Harmonic eigenpolynomials, theta series of S, and the formal Dirichlet
series identity between lift coefficients and theta coefficients."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct

import numpy as np
from sympy import Matrix, divisor_sigma

from .cyclotomic import CyclotomicValue
from .errors import ConfigError, UsageError
from .exact import AlgebraicReal, SymbolicValue, sqrt_of
from .lattice import keys_from_doubled, o_points, s_points, split_key
from .lift import lift_value

Exponent = tuple  # (e1, e2, e3, e4)

MAX_DEGREE = 8


def monomials(l: int) -> list[Exponent]:
    return sorted((e for e in iproduct(range(l + 1), repeat=4) if sum(e) == l), reverse=True)


def _laplacian_matrix(l: int) -> list[list[int]]:
    src, dst = monomials(l), monomials(l - 2)
    col = {e: i for i, e in enumerate(src)}
    rows = [[0] * len(src) for _ in dst]
    row = {e: i for i, e in enumerate(dst)}
    for e in src:
        for v in range(4):
            if e[v] >= 2:
                f = list(e)
                f[v] -= 2
                rows[row[tuple(f)]][col[e]] += e[v] * (e[v] - 1)
    return rows


def laplacian(poly: dict) -> dict:
    out: dict = {}
    for e, c in poly.items():
        for v in range(4):
            if e[v] >= 2:
                f = list(e)
                f[v] -= 2
                f = tuple(f)
                out[f] = out.get(f, 0) + c * (e[v] * (e[v] - 1))
    return {e: c for e, c in out.items() if c}


def _poly_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


# left multiplication by (1+i), before the 1/sqrt(2) scaling, as linear forms
_LEFT_1PI = (
    {(1, 0, 0, 0): 1, (0, 1, 0, 0): -1},
    {(1, 0, 0, 0): 1, (0, 1, 0, 0): 1},
    {(0, 0, 1, 0): 1, (0, 0, 0, 1): -1},
    {(0, 0, 1, 0): 1, (0, 0, 0, 1): 1},
)


def substitute_left(poly: dict, l: int) -> dict:
    """P(L x) with L = left multiplication by (1+i)/sqrt(2); l even so the
    scaling 2^(-l/2) is rational."""
    powers = [[{(0, 0, 0, 0): 1}] for _ in range(4)]
    for v in range(4):
        for _ in range(l):
            powers[v].append(_poly_mul(powers[v][-1], _LEFT_1PI[v]))
    out: dict = {}
    scale = Fraction(1, 2 ** (l // 2))
    for e, c in poly.items():
        term = {(0, 0, 0, 0): c * scale}
        for v in range(4):
            if e[v]:
                term = _poly_mul(term, powers[v][e[v]])
        for f, d in term.items():
            out[f] = out.get(f, 0) + d
    return {e: c for e, c in out.items() if c}


def _nullspace(rows: list[list], zero, one) -> list[list]:
    """Kernel basis of a matrix over an exact field (Gauss-Jordan)."""
    m = [list(r) for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = one / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


@dataclass(frozen=True)
class HarmonicPolynomial:
    l: int
    coeffs: tuple  # ((exponent, CyclotomicValue), ...)
    eps: CyclotomicValue
    nu: int = 0

    @property
    def poly(self) -> dict:
        return dict(self.coeffs)

    def eps_index(self) -> int:
        return self.eps.root_of_unity_index()

    def eps_is_real(self) -> bool:
        return self.eps_index() in (0, 4)

    def evaluate(self, x) -> CyclotomicValue:
        out = CyclotomicValue.zero()
        for e, c in self.coeffs:
            out = out + c * math.prod(Fraction(v) ** k for v, k in zip(x, e))
        return out

    def evaluate_complex(self, x) -> complex:
        return sum(complex(c) * math.prod(float(v) ** k for v, k in zip(x, e))
                   for e, c in self.coeffs)

    def abs_coeff_sum(self) -> float:
        return sum(abs(complex(c)) for _, c in self.coeffs)

    def to_json(self) -> dict:
        return {"l": self.l, "nu": self.nu, "eps": self.eps.to_json(), "eps_index": self.eps_index(),
                "coefficients": [[list(e), c.to_json()] for e, c in self.coeffs]}


@lru_cache(maxsize=None)
def _rational_harmonics(l: int) -> tuple[list[Exponent], list[list[Fraction]], list[int]]:
    """Reduced row echelon basis of harmonic degree-l polynomials over Q."""
    mons = monomials(l)
    if l < 2:
        return mons, [[Fraction(1 if i == j else 0) for i in range(len(mons))] for j in range(len(mons))], list(range(len(mons)))
    kernel = Matrix(_laplacian_matrix(l)).nullspace()
    basis = Matrix.hstack(*kernel).T
    rref, pivots = basis.rref()
    rows = [[Fraction(int(v.p), int(v.q)) for v in rref.row(i)] for i in range(rref.rows)]
    return mons, rows, list(pivots)


@lru_cache(maxsize=None)
def harmonic_basis(l: int) -> tuple[HarmonicPolynomial, ...]:
    """Eigenbasis of the harmonic degree-l space under x -> (1+i)/sqrt(2) x."""
    if l < 0 or l % 2:
        raise UsageError(f"harmonic_basis needs an even non-negative degree, got {l}")
    if l > MAX_DEGREE:
        raise UsageError(f"degree {l} exceeds the supported bound {MAX_DEGREE}")
    mons, rows, pivots = _rational_harmonics(l)
    dim = len(rows)
    polys = [{mons[i]: c for i, c in enumerate(r) if c} for r in rows]
    # matrix of the substitution in the echelon basis: column j = coords of T(h_j)
    cols = []
    for h in polys:
        th = substitute_left(h, l)
        vec = [th.get(mons[pc], Fraction(0)) for pc in pivots]
        cols.append(vec)
    mat = [[CyclotomicValue((cols[j][i], 0, 0, 0)) for j in range(dim)] for i in range(dim)]
    out = []
    for k in range(8):
        lam = CyclotomicValue.zeta(k)
        shifted = [[mat[i][j] - (lam if i == j else 0) for j in range(dim)] for i in range(dim)]
        for vec in _nullspace(shifted, CyclotomicValue.zero(), CyclotomicValue.one()):
            first = next(v for v in vec if v)
            vec = [v / first for v in vec]
            coeffs: dict = {}
            for cv, h in zip(vec, polys):
                if not cv:
                    continue
                for e, q in h.items():
                    coeffs[e] = coeffs.get(e, CyclotomicValue.zero()) + cv * q
            items = tuple(sorted(((e, c) for e, c in coeffs.items() if c), reverse=True, key=lambda ec: ec[0]))
            out.append(HarmonicPolynomial(l, items, lam, len(out)))
    if len(out) != (l + 1) ** 2:
        raise ArithmeticError(f"eigenbasis has {len(out)} elements, expected {(l + 1) ** 2}")
    return tuple(out)


def is_harmonic(P: HarmonicPolynomial) -> bool:
    return not laplacian(P.poly)


def eigen_relation_holds(P: HarmonicPolynomial) -> bool:
    lhs = substitute_left(P.poly, P.l)
    rhs = {e: c * P.eps for e, c in P.coeffs}
    keys = set(lhs) | set(rhs)
    return all(lhs.get(e, CyclotomicValue.zero()) == rhs.get(e, CyclotomicValue.zero()) for e in keys)


# ---------------------------------------------------------------------------
# moment sums


def _monomial_values(points: np.ndarray, exps: list[Exponent]) -> np.ndarray:
    pts = np.asarray(points, dtype=np.int64)
    cols = []
    for e in exps:
        v = np.ones(len(pts), dtype=np.int64)
        for i, k in enumerate(e):
            if k:
                v = v * pts[:, i] ** k
        cols.append(v)
    return np.stack(cols, axis=1) if cols else np.zeros((len(pts), 0), dtype=np.int64)


def grouped_polynomial_sums(P: HarmonicPolynomial, points: np.ndarray, groups: np.ndarray,
                            scale: Fraction = Fraction(1)) -> dict:
    """Map group id -> sum of P(scale * x) over the points in that group."""
    exps = [e for e, _ in P.coeffs]
    vals = _monomial_values(points, exps)
    order = np.argsort(groups, kind="stable")
    g = groups[order]
    vals = vals[order]
    starts = np.flatnonzero(np.r_[True, g[1:] != g[:-1]])
    sums = np.add.reduceat(vals, starts, axis=0) if len(g) else np.zeros((0, len(exps)), dtype=np.int64)
    factor = scale ** P.l
    out = {}
    for gid, row in zip(g[starts], sums):
        acc = CyclotomicValue.zero()
        for (_, c), s in zip(P.coeffs, row):
            if s:
                acc = acc + c * int(s)
        out[int(gid)] = acc * factor
    return out


# ---------------------------------------------------------------------------
# theta coefficients


def _p_at_zero(P: HarmonicPolynomial) -> CyclotomicValue:
    return P.poly.get((0, 0, 0, 0), CyclotomicValue.zero())


def theta_coeffs(P: HarmonicPolynomial, M: int) -> dict[int, CyclotomicValue]:
    """m -> b(2m) for 0 <= m <= M."""
    out = {m: CyclotomicValue.zero() for m in range(M + 1)}
    out[0] = _p_at_zero(P)
    if M >= 1:
        pts = s_points(2 * M)
        norms = (pts * pts).sum(axis=1)
        out.update({n // 2: v for n, v in grouped_polynomial_sums(P, pts, norms).items()})
    return out


def o_sums(P: HarmonicPolynomial, M: int) -> dict[int, CyclotomicValue]:
    """m -> sum of P over x in O with nu(x) = m."""
    out = {m: CyclotomicValue.zero() for m in range(M + 1)}
    out[0] = _p_at_zero(P)
    if M >= 1:
        t = o_points(M)
        norms = (t * t).sum(axis=1) // 4
        out.update(grouped_polynomial_sums(P, t, norms, Fraction(1, 2)))
    return out


def verify_o_s_identity(P: HarmonicPolynomial, M: int) -> bool:
    b = theta_coeffs(P, M)
    lhs = o_sums(P, M)
    factor = P.eps.inv() * Fraction(1, 2 ** (P.l // 2))
    return all(lhs[m] == factor * b[m] for m in range(M + 1))


def _sphere_bound(P: HarmonicPolynomial, m: int) -> float:
    """Upper bound for |b(2m)|: 24 sigma_odd(m) points, |P| <= sum|c| * (2m)^(l/2)."""
    return 24 * m * (1 + math.log(m)) * P.abs_coeff_sum() * (2 * m) ** (P.l / 2)


def theta_tail_bound(P: HarmonicPolynomial, y: float, M: int) -> float:
    """Bound for sum_{m > M} |b(2m)| exp(-2 pi m y).

    Terms are formed in log space; once they decrease geometrically the rest
    of the series is bounded by a geometric tail.
    """
    if P.abs_coeff_sum() == 0:
        return 0.0
    total = 0.0
    m = M + 1
    prev = None
    while True:
        log_term = math.log(_sphere_bound(P, m)) - 2 * math.pi * m * y
        if prev is not None and log_term < prev:
            ratio = math.exp(log_term - prev)
            if log_term < -700 or math.exp(log_term) < 1e-30 * max(total, 1e-300):
                return total + math.exp(log_term) / (1 - ratio)
        total += math.exp(log_term)
        prev = log_term
        m += 1
        if m > M + 10 ** 6:
            return math.inf


@dataclass
class ThetaValue:
    value: complex
    tail: float


def theta_eval(P: HarmonicPolynomial, z: complex, M: int, coeffs: dict | None = None) -> ThetaValue:
    if z.imag <= 0:
        raise UsageError("theta_eval needs Im z > 0")
    b = coeffs if coeffs is not None else theta_coeffs(P, M)
    q = cmath.exp(2j * cmath.pi * z)
    val = sum(complex(b[m]) * q ** m for m in range(M + 1))
    return ThetaValue(val, theta_tail_bound(P, z.imag, M))


@dataclass
class TransformReport:
    status: str
    M: int
    checks: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"status": self.status, "M": self.M, "checks": self.checks}


def _combined_tails(P: HarmonicPolynomial, z: complex, M: int) -> list[float]:
    k = P.l + 2
    w, gz = -1 / (2 * z), (z - 1) / (2 * z - 1)
    tz = theta_tail_bound(P, z.imag, M)
    return [theta_tail_bound(P, w.imag, M) + 2 ** (P.l / 2 + 1) * abs(z) ** k * tz,
            2 * tz,
            theta_tail_bound(P, gz.imag, M) + abs(2 * z - 1) ** k * tz]


def choose_truncation(P: HarmonicPolynomial, z: complex, target: float = 1e-9) -> int:
    """Smallest multiple of 10 whose combined tail bounds are all below target."""
    M = 10
    while max(_combined_tails(P, z, M)) >= target and M < 5000:
        M += 10
    return M


def verify_transformation(P: HarmonicPolynomial, z: complex, M: int | None = None,
                          tol: float = 1e-8, sign: int = 1) -> TransformReport:
    """Check Theta(-1/(2z)) = -eps^-1 2^(l/2+1) z^(l+2) Theta(z) plus two
    Gamma_0(2) spot checks.  ``sign=-1`` flips the right-hand side (control)."""
    if z.imag <= 0:
        raise UsageError("verify_transformation needs Im z > 0")
    gz = (z - 1) / (2 * z - 1)
    w = -1 / (2 * z)
    if M is None:
        M = choose_truncation(P, z, min(tol / 10, 1e-9))
    b = theta_coeffs(P, M)
    k = P.l + 2
    eps_inv = complex(P.eps.inv())
    t_z = theta_eval(P, z, M, b)
    t_w = theta_eval(P, w, M, b)
    t_z1 = theta_eval(P, z + 1, M, b)
    t_g = theta_eval(P, gz, M, b)
    factor = -eps_inv * 2 ** (P.l / 2 + 1) * z ** k * sign
    checks = [
        ("atkin_lehner", t_w.value, factor * t_z.value, t_w.tail + abs(factor) * t_z.tail),
        ("translation", t_z1.value, t_z.value, 2 * t_z.tail),
        ("gamma0_2", t_g.value, (2 * z - 1) ** k * t_z.value, t_g.tail + abs(2 * z - 1) ** k * t_z.tail),
    ]
    status = "pass"
    out = []
    for name, lhs, rhs, tail in checks:
        err = abs(lhs - rhs)
        if tail >= tol:
            verdict = "inconclusive"
        elif err <= tol:
            verdict = "pass"
        else:
            verdict = "fail"
        out.append({"check": name, "error": err, "tail_bound": tail, "status": verdict})
        if verdict == "fail":
            status = "fail"
        elif verdict == "inconclusive" and status == "pass":
            status = "inconclusive"
    return TransformReport(status, M, out)


# ---------------------------------------------------------------------------
# Dirichlet series identity


@dataclass
class DirichletReport:
    status: str
    branch: str
    N: int
    mismatches: list
    nonzero_indices: int

    def to_json(self) -> dict:
        return {"status": self.status, "branch": self.branch, "N": self.N,
                "mismatches": self.mismatches, "nonzero_indices": self.nonzero_indices}


def _to_cyclotomic(v: SymbolicValue) -> SymbolicValue:
    return v.map_coefficients(CyclotomicValue.coerce)


def _add(table: dict, n: int, v: SymbolicValue) -> None:
    cur = table.get(n)
    table[n] = v if cur is None else cur + v


def dirichlet_lhs(P: HarmonicPolynomial, src, N: int) -> dict[int, SymbolicValue]:
    """k -> sum_{nu(beta)=k} A(beta) P(beta) k^(-(l+1)/2), radicals exact."""
    pts = s_points(N)
    keys = keys_from_doubled(2 * pts, 1)
    sums = grouped_polynomial_sums(P, pts, keys)
    out: dict[int, SymbolicValue] = {}
    for key, psum in sums.items():
        if not psum:
            continue
        k, d = split_key(key)
        a = lift_value(src, k, d).scale(sqrt_of(k) ** (-(P.l + 1)))
        _add(out, k, _to_cyclotomic(a).scale(psum))
    return {k: v for k, v in out.items() if v}


def dirichlet_rhs(P: HarmonicPolynomial, src, N: int) -> dict[int, SymbolicValue]:
    """Formal expansion of 2^(-l/2) (1 - 4^-s) zeta(2s) (2^s + e)^(-1)
    sum_m c(-m) b(2m) m^(-l/2) m^(-s), with e = eps_{l,nu} * eps."""
    idx = P.eps_index()
    e_lnu = 1 if idx == 0 else -1
    e = _to_cyclotomic(src.eps_value().scale(AlgebraicReal.coerce(e_lnu)))
    b = theta_coeffs(P, N)
    base = Fraction(1, 2 ** (P.l // 2))
    series: dict[int, SymbolicValue] = {}
    for m in range(1, N + 1):
        if not b[m]:
            continue
        c = _to_cyclotomic(src.value(-m))
        series[m] = c.scale(b[m] * (base * Fraction(1, m ** (P.l // 2))))
    # (2^s + e)^-1 = sum_u (-e)^u 2^-(u+1)s
    geo: dict[int, SymbolicValue] = {}
    power = SymbolicValue.const(CyclotomicValue.one())
    u = 0
    while 2 ** (u + 1) <= N:
        geo[2 ** (u + 1)] = power
        power = power * (-e)
        u += 1
    pre: dict[int, int] = {}
    for f, sgn in ((1, 1), (4, -1)):
        j = 1
        while f * j * j <= N:
            n = f * j * j
            pre[n] = pre.get(n, 0) + sgn
            j += 1
    out: dict[int, SymbolicValue] = {}
    for n1, s1 in pre.items():
        if not s1:
            continue
        for n2, g in geo.items():
            if n1 * n2 > N:
                continue
            gs = g.scale(CyclotomicValue.coerce(s1))
            for m, sm in series.items():
                n = n1 * n2 * m
                if n > N:
                    continue
                _add(out, n, gs * sm)
    return {k: v for k, v in out.items() if v}


def dirichlet_identity_check(P: HarmonicPolynomial, src, N: int) -> DirichletReport:
    if not getattr(src, "exact", False):
        raise ConfigError("the Dirichlet identity needs an exact coefficient source", "source")
    lhs = dirichlet_lhs(P, src, N)
    if P.eps_is_real():
        rhs = dirichlet_rhs(P, src, N)
        bad = sorted(k for k in set(lhs) | set(rhs) if lhs.get(k, SymbolicValue()) != rhs.get(k, SymbolicValue()))
        mismatches = [{"index": k, "lhs": str(lhs.get(k, 0)), "rhs": str(rhs.get(k, 0))} for k in bad[:5]]
        return DirichletReport("fail" if bad else "pass", "identity", N, mismatches, len(lhs))
    mismatches = [{"index": k, "lhs": str(v), "rhs": "0"} for k, v in sorted(lhs.items())[:5]]
    return DirichletReport("fail" if lhs else "pass", "vanishing", N, mismatches, len(lhs))


def sigma_odd(m: int) -> int:
    """Sum of odd divisors of m (24 * sigma_odd(m) = #{x in O : nu(x) = m})."""
    while m % 2 == 0:
        m //= 2
    return int(divisor_sigma(m))
