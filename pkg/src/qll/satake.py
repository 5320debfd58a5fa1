"""Local Satake parameters, their consistency with the Hecke eigenvalues,
temperedness, and matching against induced-representation data."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from sympy import isprime

from .errors import UsageError
from .exact import AlgebraicReal, SymbolicValue, sqrt_of

TOL = 1e-9


@dataclass(frozen=True)
class SatakeParams:
    p: object  # prime or "infinity"
    values: tuple
    tempered: str = "undetermined"
    note: str = ""
    spectral_r: float | None = None

    def is_symbolic(self) -> bool:
        return any(isinstance(v, SymbolicValue) for v in self.values)

    def numeric(self) -> list[complex]:
        return [complex(v) if not isinstance(v, AlgebraicReal) else complex(float(v)) for v in self.values]

    def moduli(self) -> list[float]:
        return [abs(v) for v in self.numeric()]

    def to_json(self) -> dict:
        out = {"p": self.p, "tempered": self.tempered}
        if self.is_symbolic():
            out["values"] = [v.to_json() for v in self.values]
        else:
            out["values"] = [[round(v.real, 15), round(v.imag, 15)] for v in self.numeric()]
            out["moduli"] = [round(m, 15) for m in self.moduli()]
        if self.note:
            out["note"] = self.note
        if self.spectral_r is not None:
            out["r"] = self.spectral_r
        return out


def _check_odd_prime(p: int) -> None:
    if not (isinstance(p, int) and p > 2 and isprime(p)):
        raise UsageError(f"p must be an odd prime, got {p}")


def _radical(p: int) -> str:
    return f"D{p}"


def satake_odd_symbolic(p: int) -> SatakeParams:
    """The four parameters with lam_p and D = sqrt(lam_p^2 - 4) kept formal."""
    _check_odd_prime(p)
    lam, D = SymbolicValue.lam(p), SymbolicValue.var(_radical(p))
    half = AlgebraicReal.coerce(Fraction(1, 2))
    eta_plus, eta_minus = (lam + D).scale(half), (lam - D).scale(half)
    up, down = sqrt_of(p), sqrt_of(Fraction(1, p))
    vals = (eta_plus.scale(up), eta_minus.scale(up), eta_plus.scale(down), eta_minus.scale(down))
    return SatakeParams(p, vals, "undetermined", "symbolic parameters")


def satake_odd(p: int, lam: float | None = None) -> SatakeParams:
    if lam is None:
        return satake_odd_symbolic(p)
    _check_odd_prime(p)
    root = cmath.sqrt(lam * lam - 4)
    eta = ((lam + root) / 2, (lam - root) / 2)
    s = math.sqrt(p)
    vals = (s * eta[0], s * eta[1], eta[0] / s, eta[1] / s)
    return classify(SatakeParams(p, vals))


def elementary_symmetric(values) -> list:
    """e1..e4 of four symbolic values, with D^2 reduced to lam^2 - 4."""
    e = [SymbolicValue.const(1)] + [SymbolicValue() for _ in values]
    for v in values:
        for k in range(len(values), 0, -1):
            e[k] = e[k] + e[k - 1] * v
    return e[1:]


@dataclass
class SatakeCheck:
    p: int
    checks: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "pass" if all(self.checks.values()) else "fail"

    def to_json(self) -> dict:
        return {"p": self.p, "status": self.status, "checks": self.checks}


def verify_hecke_satake_odd(p: int) -> SatakeCheck:
    params = satake_odd_symbolic(p)
    lam = SymbolicValue.lam(p)
    rad = _radical(p)
    e = [x.reduce_square(rad, lam * lam - 4) for x in elementary_symmetric(params.values)]
    p32 = sqrt_of(p) ** 3
    mu2 = lam.scale(AlgebraicReal.coerce(p * (p + 1)))
    mu3 = (lam * lam).scale(AlgebraicReal.coerce(p * p)) + (p ** 3 + p)
    checks = {
        "radical_free": not any(rad in x.variables() for x in e),
        "e1": e[0].scale(p32) == mu2,
        "e3": e[2].scale(p32) == mu2,
        "e2": e[1].scale(AlgebraicReal.coerce(p * p)) == mu3,
        "e4": e[3] == SymbolicValue.const(1),
    }
    return SatakeCheck(p, checks)


def satake_two(eps: int) -> SatakeParams:
    if eps not in (1, -1):
        raise UsageError(f"eps must be +1 or -1, got {eps}")
    r2 = sqrt_of(2)
    a1, a2 = r2 * (-eps), r2.inv() * (-eps)
    if a1 * a2 != 1:
        raise ArithmeticError("central character check failed at p = 2")
    if (a1 + a2) * 2 != r2 * (-3 * eps):
        raise ArithmeticError("Hecke eigenvalue check failed at p = 2")
    return classify(SatakeParams(2, (a1, a2)))


def satake_infinity(r: float | None = None) -> SatakeParams:
    return SatakeParams("infinity", (), "tempered",
                        "unitary spherical principal series; recorded, not computed", r)


def classify_temperedness(params: SatakeParams) -> str:
    if params.p == "infinity":
        return params.tempered
    if params.is_symbolic():
        return "undetermined"
    return "tempered" if all(abs(m - 1) <= TOL for m in params.moduli()) else "non-tempered"


def classify(params: SatakeParams) -> SatakeParams:
    verdict = classify_temperedness(params)
    note = "" if verdict != "undetermined" else "numeric values are needed for a verdict"
    return SatakeParams(params.p, params.values, verdict, note, params.spectral_r)


def induced_parameters(p: int, lam: float) -> list[complex]:
    """Parameters of the induced representation: p^(+-1/2) eta0^(+-1) with
    eta0 + 1/eta0 = lam."""
    eta0 = (lam + cmath.sqrt(lam * lam - 4)) / 2
    s = math.sqrt(p)
    return [s * eta0, s / eta0, eta0 / s, 1 / (eta0 * s)]


def multiset_distance(a, b) -> float:
    return min(max(abs(x - y) for x, y in zip(a, perm)) for perm in permutations(b))


def cap_match(p: int, lam: float, induced: list | None = None, tol: float = TOL) -> bool:
    _check_odd_prime(p)
    if induced is None and lam in (2, -2):
        sign = 1 if lam == 2 else -1
        exact = sorted([sqrt_of(p) * sign] * 2 + [sqrt_of(Fraction(1, p)) * sign] * 2, key=float)
        eta0 = AlgebraicReal.coerce(sign)
        ind = sorted([sqrt_of(p) * eta0, sqrt_of(p) * eta0.inv(),
                      sqrt_of(Fraction(1, p)) * eta0, sqrt_of(Fraction(1, p)) * eta0.inv()], key=float)
        return ind == exact
    ours = satake_odd(p, lam).numeric()
    theirs = induced if induced is not None else induced_parameters(p, lam)
    return multiset_distance(ours, theirs) <= tol


def two_power_eigenvalue(n: int, eps: int) -> AlgebraicReal:
    if n < 0:
        raise UsageError("n must be non-negative")
    if eps not in (1, -1):
        raise UsageError(f"eps must be +1 or -1, got {eps}")
    r2 = sqrt_of(2)
    return (r2 ** (3 * n) + r2 ** n) * (-eps) ** n
