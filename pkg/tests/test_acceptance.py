"""Acceptance criteria 1-10 at full parameters, one PASS/FAIL line each."""
from __future__ import annotations

import math
import time
from contextlib import contextmanager

import pytest

from qll.exact import sqrt_of
from qll.hecke_local import enumerate_cp
from qll.lattice import hurwitz_by_norm, verify_s_equals_w2O
from qll.lift import lift_coeff
from qll.quaternion import PI2
from qll.satake import classify_temperedness, satake_infinity
from qll.suites import (suite_cp, suite_dirichlet, suite_equivariance_all, suite_eval,
                        suite_fundlemma, suite_nonvanishing, suite_satake, suite_structure,
                        suite_theta, nonvanishing_source)


@contextmanager
def criterion(capsys, label: str):
    ok = False
    start = time.perf_counter()
    try:
        yield
        ok = True
    finally:
        with capsys.disabled():
            print(f"\n{label}: {'PASS' if ok else 'FAIL'} ({time.perf_counter() - start:.1f} s)")


def test_c1_cp_cardinality(capsys):
    with criterion(capsys, "C1 C_p cardinality"):
        start = time.perf_counter()
        for p in (3, 5, 7, 11, 13):
            cls = enumerate_cp(p)
            assert len(cls.representatives) == p + 1
            assert cls.raw_count == 24 * (p + 1)
        assert suite_cp().status == "pass"
        assert time.perf_counter() - start < 5


def test_c2_fundamental_lemma_sweep(capsys):
    with criterion(capsys, "C2 divisibility sweep"):
        start = time.perf_counter()
        rep = suite_fundlemma((3, 5, 7), 400)
        assert time.perf_counter() - start < 60
        assert rep.status == "pass", rep.witnesses
        for row in rep.details["sweeps"]:
            assert row["checked"] > 0 and row["agree"] == row["checked"]
            assert row["p2_violations"] == 0


def test_c3_c4_equivariance(capsys):
    by_name = {}
    with criterion(capsys, "C3 equivariance, odd p"):
        start = time.perf_counter()
        reps = suite_equivariance_all(240)
        elapsed = time.perf_counter() - start
        by_name.update((r.suite, r) for r in reps)
        for p in (3, 5):
            for shape in ("a", "b", "c"):
                rep = by_name[f"equivariance-p{p}-{shape}"]
                assert rep.status == "pass", rep.witnesses
                assert rep.parameters["bound"] == 240 and rep.parameters["seed"] is None
        assert by_name["equivariance-p3-b"].details["eigenvalue_text"] == "(12)*lam3"
        assert by_name["equivariance-p5-c"].details["eigenvalue_text"] == "(130) + (25)*lam5^2"
        assert elapsed < 300
    with criterion(capsys, "C4 equivariance, p = 2"):
        for sign in "+-":
            rep = by_name[f"equivariance-p2-two-eps{sign}"]
            assert rep.status == "pass", rep.witnesses
            assert rep.parameters["bound"] == 240
        # eigenvalue -3*sqrt(2)*eps
        assert by_name["equivariance-p2-two-eps+"].details["eigenvalue_text"] == "((-3)√2)"
        assert by_name["equivariance-p2-two-eps-"].details["eigenvalue_text"] == "((3)√2)"


def test_c5_dirichlet(capsys):
    with criterion(capsys, "C5 Dirichlet identity"):
        rep = suite_dirichlet((0, 2), 200, (1, -1))
        assert rep.status == "pass", rep.witnesses
        rows = rep.details["checks"]
        assert {r["branch"] for r in rows if r["l"] == 2} == {"identity", "vanishing"}
        assert len(rows) == (1 + 9) * 2


def test_c6_theta(capsys):
    with criterion(capsys, "C6 theta checks"):
        rep = suite_theta((0, 2, 4), 30, (0, 2), (complex(0.3, 0.8), complex(-0.2, 1.1)), 1e-8)
        assert rep.status == "pass", rep.witnesses
        transforms = [r for r in rep.details["checks"] if r["check"] == "transformation"]
        assert all(r["max_tail_bound"] < 1e-9 for r in transforms)
        assert any(r["control"] == "fail" for r in transforms)


def test_c7_satake(capsys):
    with criterion(capsys, "C7 Satake consistency"):
        rep = suite_satake(random_count=20)
        assert rep.status == "pass", rep.witnesses
        assert classify_temperedness(satake_infinity()) == "tempered"


def test_c8_structure(capsys):
    with criterion(capsys, "C8 structure checks"):
        assert verify_s_equals_w2O()
        rep = suite_structure(words=200, max_len=30)
        assert rep.status == "pass", rep.witnesses
        even = [c for c in rep.details["cosets"] if c.get("p") == 2]
        assert even and all(c["lemma"] == c["oracle"] == 5 for c in even)


def test_c9_numeric_evaluation(capsys):
    with criterion(capsys, "C9 numeric lift evaluation"):
        rep = suite_eval(bound=400, tol=1e-6)
        assert rep.status == "pass", rep.witnesses
        rows = rep.details["checks"]
        assert all(r["translation_error"] <= 1e-6 and r["unit_twist_error"] <= 1e-6 for r in rows[:2])
        assert rows[-1]["bessel_max_error"] <= 1e-10


def test_c10_nonvanishing(capsys):
    with criterion(capsys, "C10 non-vanishing witness"):
        for n0 in (1, 2, 3, 5):
            src = nonvanishing_source(n0)
            beta = PI2 * hurwitz_by_norm(n0)[0]
            got = lift_coeff(src, beta).value
            assert got == src.value(-n0).scale(sqrt_of(2 * n0))
            assert got
        assert suite_nonvanishing((1, 2, 3, 5)).status == "pass"
