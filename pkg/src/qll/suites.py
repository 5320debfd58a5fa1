"""Verification suites: each runs one family of checks and returns a
VerificationReport.  ``run_all`` composes them, optionally at reduced bounds."""
from __future__ import annotations

import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor

import mpmath

from .analytic import bessel_k_imag, eval_lift
from .coeffile import synthetic_file
from .exact import sqrt_of
from .hecke_local import coset_counts, divisibility_sweep, enumerate_cp, primitive_points
from .lattice import hurwitz_by_norm, s_points, verify_s_equals_w2O
from .lift import HeckeOperatorId, HeckeSource, lift_coeff, seeded_rational, verify_equivariance
from .quaternion import (HURWITZ_BASIS, PI2, HurwitzQuaternion, generator_decompose,
                         hamilton, recompose, units)
from .report import VerificationReport, combine
from .satake import (cap_match, classify_temperedness, satake_infinity, satake_odd, satake_two,
                     two_power_eigenvalue, verify_hecke_satake_odd)
from .theta import (dirichlet_identity_check, harmonic_basis, theta_coeffs, verify_o_s_identity,
                    verify_transformation)

DEFAULT_SEED = 20240601
TRANSFORM_POINTS = (complex(0.3, 0.8), complex(-0.2, 1.1))


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _timed(fn):
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        rep = fn(*args, **kwargs)
        rep.timing = time.perf_counter() - start
        return rep
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def suite_cp(primes=(3, 5, 7, 11, 13)) -> VerificationReport:
    rows, witnesses = [], []
    for p in primes:
        cls = enumerate_cp(p)
        ok = len(cls.representatives) == p + 1 and cls.raw_count == 24 * (p + 1)
        rows.append({"p": p, "classes": len(cls.representatives), "raw": cls.raw_count})
        if not ok:
            witnesses.append({"p": p, "classes": len(cls.representatives), "raw": cls.raw_count})
    return VerificationReport("cp", {"primes": list(primes)}, _status(not witnesses),
                              witnesses, {"counts": rows})


@_timed
def suite_fundlemma(primes=(3, 5, 7), bound: int = 400) -> VerificationReport:
    pts = primitive_points(s_points(bound))
    rows, witnesses = [], []
    for p in primes:
        res = divisibility_sweep(pts, p)
        rows.append({"p": p, "checked": res.checked, "agree": res.agree,
                     "p2_violations": res.p2_violations})
        witnesses.extend({"p": p, "beta": [2 * v for v in w]} for w in res.witnesses)  # doubled coordinates
    return VerificationReport("fundlemma", {"primes": list(primes), "bound": bound},
                              _status(not witnesses), witnesses, {"sweeps": rows})


@_timed
def suite_cosets(primes=(3, 5, 7)) -> VerificationReport:
    rows, witnesses = [], []
    cases = [(t, p) for p in primes for t in ("odd-a", "odd-b", "odd-c")] + [("even", 2)]
    for h_type, p in cases:
        lemma, oracle = coset_counts(h_type, p)
        ok = lemma == oracle and (h_type != "even" or lemma == 5)
        rows.append({"type": h_type, "p": p, "lemma": lemma, "oracle": oracle})
        if not ok:
            witnesses.append({"type": h_type, "p": p, "lemma": lemma, "oracle": oracle})
    return VerificationReport("cosets", {"primes": list(primes)}, _status(not witnesses),
                              witnesses, {"counts": rows})


def equivariance_source(p: int, seed: int | None = None, eps: int | None = None) -> HeckeSource:
    """Fully symbolic source (or seeded rational, when ``seed`` is given)."""
    if p == 2:
        return HeckeSource(newform=True, eps=eps, random_seed=seed)
    lam = {p: seeded_rational(seed, f"lam{p}")} if seed is not None else {}
    return HeckeSource(primes=(p,), eps=eps, lam=lam, random_seed=seed)


@_timed
def suite_equivariance(p: int, shape: str | None, bound: int, seed: int | None = None,
                       eps: int | None = None) -> VerificationReport:
    op = HeckeOperatorId.make(p, shape)
    rep = verify_equivariance(op, equivariance_source(p, seed, eps), bound)
    params = {"p": p, "shape": op.shape, "bound": bound, "seed": seed, "eps": eps}
    details = {"eigenvalue": rep.eigenvalue.to_json(), "eigenvalue_text": str(rep.eigenvalue),
               "checked": rep.checked, "signatures": rep.signatures}
    return VerificationReport(f"equivariance-p{p}-{op.shape}", params, rep.status,
                              rep.witnesses, details)


def suite_equivariance_all(bound: int = 240) -> list[VerificationReport]:
    reps = [suite_equivariance(p, s, bound) for p in (3, 5) for s in ("a", "b", "c")]
    reps += [suite_equivariance(2, None, bound, eps=e) for e in (1, -1)]
    for r in reps[-2:]:
        r.suite += "-eps" + ("+" if r.parameters["eps"] == 1 else "-")
    return reps


@_timed
def suite_dirichlet(ls=(0, 2), N: int = 200, eps_values=(1, -1)) -> VerificationReport:
    rows, witnesses = [], []
    for l in ls:
        for P in harmonic_basis(l):
            for e in eps_values:
                rep = dirichlet_identity_check(P, HeckeSource(eps=e), N)
                rows.append({"l": l, "nu": P.nu, "eps": e, "branch": rep.branch,
                             "status": rep.status, "nonzero_indices": rep.nonzero_indices})
                if rep.status != "pass":
                    witnesses.append({"l": l, "nu": P.nu, "eps": e, "mismatches": rep.mismatches})
    return VerificationReport("dirichlet", {"l": list(ls), "N": N, "eps": list(eps_values)},
                              _status(not witnesses), witnesses, {"checks": rows})


@_timed
def suite_theta(o_s_degrees=(0, 2, 4), o_s_max: int = 30, transform_degrees=(0, 2),
                points=TRANSFORM_POINTS, tol: float = 1e-8) -> VerificationReport:
    rows, witnesses = [], []
    status = "pass"
    for l in o_s_degrees:
        for P in harmonic_basis(l):
            if not verify_o_s_identity(P, o_s_max):
                witnesses.append({"check": "o_s_identity", "l": l, "nu": P.nu})
    rows.append({"check": "o_s_identity", "degrees": list(o_s_degrees), "max": o_s_max,
                 "failures": len(witnesses)})
    controls = 0
    for l in transform_degrees:
        for P in harmonic_basis(l):
            # the sign control only discriminates on a series that is not identically 0
            vanishes = not any(theta_coeffs(P, 40).values())
            for z in points:
                rep = verify_transformation(P, z, tol=tol)
                ctrl = verify_transformation(P, z, rep.M, tol=tol, sign=-1) if not vanishes else None
                tails = max(c["tail_bound"] for c in rep.checks)
                rows.append({"check": "transformation", "l": l, "nu": P.nu,
                             "z": [z.real, z.imag], "M": rep.M, "status": rep.status,
                             "max_tail_bound": tails,
                             "control": ctrl.status if ctrl else "not applicable"})
                if rep.status == "fail":
                    witnesses.append({"check": "transformation", "l": l, "nu": P.nu,
                                      "z": [z.real, z.imag], "checks": rep.checks})
                elif rep.status == "inconclusive" or tails >= 1e-9:
                    status = "inconclusive"
                if ctrl is not None:
                    controls += 1
                    if ctrl.status != "fail":
                        witnesses.append({"check": "sign_control", "l": l, "nu": P.nu,
                                          "z": [z.real, z.imag], "status": ctrl.status})
    if transform_degrees and not controls:
        witnesses.append({"check": "sign_control", "reason": "no non-vanishing series to control"})
    if witnesses:
        status = "fail"
    params = {"o_s_degrees": list(o_s_degrees), "o_s_max": o_s_max,
              "transform_degrees": list(transform_degrees), "tol": tol,
              "z": [[z.real, z.imag] for z in points]}
    return VerificationReport("theta", params, status, witnesses, {"checks": rows})


@_timed
def suite_satake(seed: int = DEFAULT_SEED, random_count: int = 20) -> VerificationReport:
    witnesses, rows = [], []
    for p in (3, 5, 7, 11):
        chk = verify_hecke_satake_odd(p)
        rows.append(chk.to_json())
        if chk.status != "pass":
            witnesses.append({"check": "hecke_satake", "p": p, "checks": chk.checks})
    for e in (1, -1):
        try:
            params = satake_two(e)
        except ArithmeticError as exc:
            witnesses.append({"check": "satake_two", "eps": e, "error": str(exc)})
            continue
        if params.tempered != "non-tempered":
            witnesses.append({"check": "satake_two_tempered", "eps": e, "tempered": params.tempered})
    rng = random.Random(seed)
    lams = [-2, -1, 0, 1, 2] + [rng.uniform(-2, 2) for _ in range(random_count)]
    for p in (3, 5):
        for lam in lams:
            params = satake_odd(p, lam)
            prod = math.prod(params.numeric())
            ok = (cap_match(p, lam) and classify_temperedness(params) == "non-tempered"
                  and abs(prod - 1) <= 1e-9)
            if not ok:
                witnesses.append({"check": "cap_match", "p": p, "lambda": lam})
    for p in (3, 5):
        for lam in (3, -3):
            if classify_temperedness(satake_odd(p, lam)) != "non-tempered":
                witnesses.append({"check": "real_branch", "p": p, "lambda": lam})
    if classify_temperedness(satake_infinity()) != "tempered":
        witnesses.append({"check": "infinity"})
    mags = [abs(float(two_power_eigenvalue(n, 1))) for n in range(21)]
    if not all(m >= 2 ** (1.5 * n) for n, m in enumerate(mags)) or \
            not all(a < b for a, b in zip(mags, mags[1:])):
        witnesses.append({"check": "two_power_growth"})
    rows.append({"cap_match_lambdas": len(lams)})
    return VerificationReport("satake", {"seed": seed, "random_lambdas": random_count},
                              _status(not witnesses), witnesses, {"checks": rows})


def random_generator_word(rng: random.Random, max_len: int = 30) -> list:
    us = units()
    word = []
    for _ in range(rng.randint(0, max_len)):
        kind = rng.choice("SDT")
        if kind == "S":
            word.append(("S",))
        elif kind == "D":
            word.append(("D", rng.choice(us)))
        else:
            v = HurwitzQuaternion.zero()
            for b in HURWITZ_BASIS:
                v = v + b * rng.randint(-3, 3)
            word.append(("T", v))
    return word


@_timed
def suite_structure(seed: int = DEFAULT_SEED, words: int = 200, max_len: int = 30) -> VerificationReport:
    witnesses = []
    if not verify_s_equals_w2O():
        witnesses.append({"check": "s_equals_w2O"})
    rng = random.Random(seed)
    for i in range(words):
        word = random_generator_word(rng, max_len)
        m = recompose(word)
        dec = generator_decompose(m)
        if not dec.invertible or recompose(dec.word) != m:
            witnesses.append({"check": "generator_round_trip", "index": i, "matrix": m.to_json()})
    cos = suite_cosets()
    witnesses.extend(cos.witnesses)
    return VerificationReport("structure", {"seed": seed, "words": words, "max_len": max_len},
                              _status(not witnesses), witnesses, {"cosets": cos.details["counts"]})


def bessel_oracle(r: float, y: float) -> float:
    """K_{ir}(y) by high-precision quadrature of the defining integral."""
    with mpmath.workdps(30):
        T = mpmath.acosh(1 + mpmath.mpf(80) / y)
        f = lambda t: mpmath.exp(-y * mpmath.cosh(t)) * mpmath.cos(r * t)  # noqa: E731
        return float(mpmath.quad(f, mpmath.linspace(0, T, 41)))


BESSEL_GRID_R = (0.0, 0.5, 1.0, 2.5, 5.0)
BESSEL_GRID_Y = (0.25, 0.5, 1.0, 2.0, 5.0)
GENERIC_X = (0.13, -0.41, 0.27, 0.08)


@_timed
def suite_eval(seed: int = DEFAULT_SEED, bound: int = 400, tol: float = 1e-6) -> VerificationReport:
    witnesses = []
    src = synthetic_file(seed, 10, 1.0, 1).to_source()
    rows = []
    for x, y in (((0.0, 0.0, 0.0, 0.0), 1.0), (GENERIC_X, 0.9)):
        base = eval_lift(src, x, y, bound)
        F0 = complex(base.value, base.imag)
        worst = 0.0
        for v in HURWITZ_BASIS:
            shifted = tuple(a + float(b) for a, b in zip(x, v.coords))
            e = eval_lift(src, shifted, y, bound)
            worst = max(worst, abs(complex(e.value, e.imag) - F0))
        twist = 0.0
        for u in units():
            ux = hamilton(tuple(float(c) for c in u.coords), x)
            e = eval_lift(src, ux, y, bound)
            twist = max(twist, abs(complex(e.value, e.imag) - F0))
        rows.append({"x": list(x), "y": y, "value": base.value, "translation_error": worst,
                     "unit_twist_error": twist, "tail_estimate": base.tail_estimate})
        if worst > tol or twist > tol:
            witnesses.append({"check": "invariance", "x": list(x), "y": y,
                              "translation_error": worst, "unit_twist_error": twist})
    bessel_err = 0.0
    for r in BESSEL_GRID_R:
        for y in BESSEL_GRID_Y:
            err = abs(bessel_k_imag(r, y) - bessel_oracle(r, y))
            bessel_err = max(bessel_err, err)
            if err > 1e-10:
                witnesses.append({"check": "bessel", "r": r, "y": y, "error": err})
    rows.append({"bessel_max_error": bessel_err})
    return VerificationReport("eval", {"seed": seed, "bound": bound, "tol": tol},
                              _status(not witnesses), witnesses, {"checks": rows})


def nonvanishing_source(n0: int) -> HeckeSource:
    """No active primes, c(-m) = 0 for m < n0, symbols beyond."""
    return HeckeSource(seeds={m: 0 for m in range(1, n0)})


@_timed
def suite_nonvanishing(n0_values=(1, 2, 3, 5)) -> VerificationReport:
    witnesses, rows = [], []
    for n0 in n0_values:
        src = nonvanishing_source(n0)
        beta0 = hurwitz_by_norm(n0)[0]
        beta = PI2 * beta0
        got = lift_coeff(src, beta).value
        want = src.value(-n0).scale(sqrt_of(2 * n0))
        rows.append({"N0": n0, "beta": beta.to_json(), "value": str(got)})
        if got != want or not got:
            witnesses.append({"N0": n0, "beta": beta.to_json(), "value": str(got), "expected": str(want)})
    return VerificationReport("nonvanishing", {"N0": list(n0_values)}, _status(not witnesses),
                              witnesses, {"checks": rows})


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("QLL_THREADS", "1")))
    except ValueError:
        return 1


def run_all(quick: bool = False, seed: int = DEFAULT_SEED) -> VerificationReport:
    if quick:
        jobs = [
            lambda: [suite_cp()],
            lambda: [suite_fundlemma(bound=100)],
            lambda: suite_equivariance_all_quick(60),
            lambda: [suite_dirichlet(N=40)],
            lambda: [suite_theta(o_s_max=10, points=TRANSFORM_POINTS[:1])],
            lambda: [suite_satake(seed, 5)],
            lambda: [suite_structure(seed, 40, 15)],
            lambda: [suite_eval(seed, 60)],
            lambda: [suite_nonvanishing()],
        ]
    else:
        jobs = [
            lambda: [suite_cp()],
            lambda: [suite_fundlemma()],
            lambda: suite_equivariance_all(240),
            lambda: [suite_dirichlet()],
            lambda: [suite_theta()],
            lambda: [suite_satake(seed)],
            lambda: [suite_structure(seed)],
            lambda: [suite_eval(seed)],
            lambda: [suite_nonvanishing()],
        ]
    with ThreadPoolExecutor(max_workers=thread_count()) as pool:
        results = [r for batch in pool.map(lambda j: j(), jobs) for r in batch]
    return combine("all", {"quick": quick, "seed": seed}, results)


def suite_equivariance_all_quick(bound: int) -> list[VerificationReport]:
    reps = [suite_equivariance(3, s, bound) for s in ("a", "b", "c")]
    reps.append(suite_equivariance(2, None, bound, eps=1))
    return reps
