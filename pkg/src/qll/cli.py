"""Command-line entry point ``qll``.

Exit codes: 0 all checks pass, 1 verification failure, 2 usage or
configuration error, 3 inconclusive only.
"""
from __future__ import annotations

import argparse
import sys
import time

from .analytic import eval_lift
from .coeffile import load_coefficient_file, synthetic_file
from .errors import QllError
from .exact import SymbolicValue, format_rational
from .hecke_local import enumerate_cp
from .lattice import (enumerate_by_norm, lattice_coordinates, primitive_decompose,
                      s_membership)
from .lift import HeckeSource, lift_coeff
from .quaternion import format_quaternion, parse_components, parse_quaternion
from .report import VerificationReport, emit_report
from .satake import cap_match, satake_infinity, satake_odd, satake_odd_symbolic, satake_two
from .suites import (DEFAULT_SEED, run_all, suite_cosets, suite_cp, suite_dirichlet,
                     suite_equivariance, suite_eval, suite_fundlemma, suite_nonvanishing,
                     suite_satake, suite_structure, suite_theta)
from .theta import harmonic_basis, theta_coeffs, verify_transformation


def _info(suite: str, params: dict, details: dict, table: list | None = None) -> VerificationReport:
    return VerificationReport(suite, params, "pass", [], details, table)


def _parse_z(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise QllError(f"cannot parse complex number {text!r}") from exc


# ---------------------------------------------------------------------------
# command handlers


def cmd_cp(args):
    cls = enumerate_cp(args.p, args.side)
    return _info("cp-enumerate", {"p": args.p, "side": args.side}, cls.to_json())


def cmd_lattice_member(args):
    beta = parse_quaternion(args.beta)
    coords = [format_rational(c) for c in lattice_coordinates(beta)]
    return _info("lattice-member", {"beta": beta.to_json()},
                 {"member": s_membership(beta), "basis_coordinates": coords})


def cmd_lattice_decompose(args):
    beta = parse_quaternion(args.beta)
    return _info("lattice-decompose", {"beta": beta.to_json()}, primitive_decompose(beta).to_json())


def cmd_lattice_enumerate(args):
    rows = [{"beta": b.to_json(), "text": format_quaternion(b)} for b in enumerate_by_norm(args.norm)]
    return _info("lattice-enumerate", {"norm": args.norm}, {"count": len(rows)}, rows)


def cmd_lift(args):
    beta = parse_quaternion(args.beta)
    if args.coeffs:
        src = load_coefficient_file(args.coeffs)
    else:
        src = HeckeSource(primes=tuple(args.primes), newform=args.newform, eps=args.eps)
    lc = lift_coeff(src, beta)
    details = lc.to_json()
    if isinstance(lc.value, SymbolicValue):
        details["value_text"] = str(lc.value)
    return _info("lift-coeff", {"beta": beta.to_json(), "coeffs": args.coeffs, "eps": args.eps}, details)


def _basis_element(l: int, nu: int):
    basis = harmonic_basis(l)
    if not 0 <= nu < len(basis):
        raise QllError(f"nu must lie in [0, {len(basis) - 1}] for l = {l}")
    return basis[nu]


def cmd_theta_basis(args):
    basis = harmonic_basis(args.l)
    return _info("theta-basis", {"l": args.l}, {"dimension": len(basis),
                                                "basis": [P.to_json() for P in basis]})


def cmd_theta_coeffs(args):
    P = _basis_element(args.l, args.nu)
    b = theta_coeffs(P, args.max)
    rows = [{"n": 2 * m, "value": str(v)} for m, v in b.items()]
    return _info("theta-coeffs", {"l": args.l, "nu": args.nu, "max": args.max},
                 {"coefficients": [[2 * m, v.to_json()] for m, v in b.items()]}, rows)


def cmd_theta_transform(args):
    P = _basis_element(args.l, args.nu)
    rep = verify_transformation(P, _parse_z(args.z), args.max, args.tol)
    witnesses = [c for c in rep.checks if c["status"] == "fail"]
    params = {"l": args.l, "nu": args.nu, "z": args.z, "tol": args.tol}
    return VerificationReport("theta-check-transform", params, rep.status, witnesses, rep.to_json())


def cmd_satake(args):
    if args.p == 2:
        if args.epsilon is None:
            raise QllError("satake at p = 2 needs --epsilon")
        params = satake_two(args.epsilon)
        return _info("satake", {"p": 2, "epsilon": args.epsilon}, params.to_json())
    if args.p == "infinity":
        return _info("satake", {"p": "infinity"}, satake_infinity(args.r).to_json())
    if args.symbolic or args.lam is None:
        return _info("satake", {"p": args.p, "symbolic": True}, satake_odd_symbolic(args.p).to_json())
    details = satake_odd(args.p, args.lam).to_json()
    details["cap_match"] = cap_match(args.p, args.lam)
    return _info("satake", {"p": args.p, "lambda": args.lam}, details)


def cmd_capmatch(args):
    ok = cap_match(args.p, args.lam)
    params = {"p": args.p, "lambda": args.lam}
    details = satake_odd(args.p, args.lam).to_json()
    details["cap_match"] = ok
    wit = [] if ok else [{"p": args.p, "lambda": args.lam}]
    return VerificationReport("capmatch", params, "pass" if ok else "fail", wit, details)


def cmd_eval(args):
    src = load_coefficient_file(args.coeffs)
    x = tuple(float(c) for c in parse_components(args.x))
    res = eval_lift(src, x, args.y, args.bound)
    return _info("eval", {"x": list(x), "y": args.y, "bound": args.bound},
                 {"value": res.value, "imag": res.imag, "tail_estimate": res.tail_estimate,
                  "terms": res.terms})


def cmd_gen(args):
    cf = synthetic_file(args.seed, args.count, args.r, args.eps)
    cf.save(args.out)
    return _info("gen", {"seed": args.seed, "count": args.count, "r": args.r, "eps": args.eps},
                 {"path": args.out, "coefficients": len(cf.coefficients)})


def cmd_verify(args):
    kind = args.suite
    if kind == "all":
        return run_all(args.quick, args.seed)
    if kind == "equivariance":
        return suite_equivariance(args.p, args.shape, args.bound, args.eq_seed, args.eps)
    if kind == "fundlemma":
        return suite_fundlemma((args.p,), args.bound)
    if kind == "cosets":
        return suite_cosets()
    if kind == "dirichlet":
        return suite_dirichlet((args.l,), args.N)
    if kind == "satake":
        return suite_satake(args.seed)
    if kind == "theta":
        return suite_theta()
    if kind == "structure":
        return suite_structure(args.seed)
    if kind == "cp":
        return suite_cp()
    if kind == "eval":
        return suite_eval(args.seed)
    if kind == "nonvanishing":
        return suite_nonvanishing()
    raise QllError(f"unknown suite {kind!r}")


# ---------------------------------------------------------------------------
# parser


def _sign(text: str) -> int:
    v = int(text)
    if v not in (1, -1):
        raise argparse.ArgumentTypeError("must be +1 or -1")
    return v


def _prime_or_inf(text: str):
    if text in ("inf", "infinity"):
        return "infinity"
    return int(text)


def _int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "csv"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall-clock time")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized checks")

    parser = argparse.ArgumentParser(prog="qll", description="Exact and numeric checks for the "
                                     "quaternionic lift on the Hurwitz order.")
    sub = parser.add_subparsers(dest="command", metavar="command")

    cp = sub.add_parser("cp", help="norm-p classes").add_subparsers(dest="action", metavar="action")
    q = cp.add_parser("enumerate", parents=[common])
    q.add_argument("-p", "--p", type=int, required=True)
    q.add_argument("--side", choices=("right", "left"), default="right")
    q.set_defaults(func=cmd_cp)

    lat = sub.add_parser("lattice", help="the lattice S").add_subparsers(dest="action", metavar="action")
    q = lat.add_parser("member", parents=[common])
    q.add_argument("--beta", required=True)
    q.set_defaults(func=cmd_lattice_member)
    q = lat.add_parser("decompose", parents=[common])
    q.add_argument("--beta", required=True)
    q.set_defaults(func=cmd_lattice_decompose)
    q = lat.add_parser("enumerate", parents=[common])
    q.add_argument("--norm", type=int, required=True)
    q.set_defaults(func=cmd_lattice_enumerate)

    lift = sub.add_parser("lift", aliases=["l"], help="lift coefficients")
    lift_sub = lift.add_subparsers(dest="action", metavar="action")
    q = lift_sub.add_parser("coeff", parents=[common])
    q.add_argument("--beta", required=True)
    q.add_argument("--coeffs", help="coefficient file (default: symbolic source)")
    q.add_argument("--eps", type=_sign)
    q.add_argument("--primes", type=_int_list, default=[], help="active odd primes, comma separated")
    q.add_argument("--newform", action="store_true")
    q.set_defaults(func=cmd_lift)

    th = sub.add_parser("theta", help="theta series").add_subparsers(dest="action", metavar="action")
    q = th.add_parser("basis", parents=[common])
    q.add_argument("--l", type=int, required=True)
    q.set_defaults(func=cmd_theta_basis)
    q = th.add_parser("coeffs", parents=[common])
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--nu", type=int, default=0)
    q.add_argument("--max", type=int, required=True)
    q.set_defaults(func=cmd_theta_coeffs)
    q = th.add_parser("check-transform", parents=[common])
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--nu", type=int, default=0)
    q.add_argument("--z", required=True)
    q.add_argument("--tol", type=float, default=1e-8)
    q.add_argument("--max", type=int)
    q.set_defaults(func=cmd_theta_transform)

    q = sub.add_parser("satake", parents=[common], help="local Satake parameters")
    q.add_argument("--p", type=_prime_or_inf, required=True)
    q.add_argument("--lambda", dest="lam", type=float)
    q.add_argument("--symbolic", action="store_true")
    q.add_argument("--epsilon", type=_sign)
    q.add_argument("--r", type=float)
    q.set_defaults(func=cmd_satake)

    q = sub.add_parser("capmatch", parents=[common], help="compare with induced parameters")
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--lambda", dest="lam", type=float, required=True)
    q.set_defaults(func=cmd_capmatch)

    q = sub.add_parser("eval", parents=[common], help="evaluate the lift numerically")
    q.add_argument("--x", required=True)
    q.add_argument("--y", type=float, required=True)
    q.add_argument("--bound", type=int, required=True)
    q.add_argument("--coeffs", required=True)
    q.set_defaults(func=cmd_eval)

    ver = sub.add_parser("verify", help="verification suites").add_subparsers(dest="suite", metavar="suite")
    q = ver.add_parser("all", parents=[common])
    q.add_argument("--quick", action="store_true")
    q = ver.add_parser("equivariance", parents=[common])
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--shape", choices=("a", "b", "c"))
    q.add_argument("--bound", type=int, default=240)
    q.add_argument("--eps", type=_sign)
    q.set_defaults(eq_seed=None)
    q = ver.add_parser("fundlemma", parents=[common])
    q.add_argument("--p", type=int, required=True)
    q.add_argument("--bound", type=int, default=400)
    q = ver.add_parser("dirichlet", parents=[common])
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--N", type=int, default=200)
    for name in ("cosets", "satake", "theta", "structure", "cp", "eval", "nonvanishing"):
        ver.add_parser(name, parents=[common])
    for p in ver.choices.values():
        p.set_defaults(func=cmd_verify)

    q = sub.add_parser("gen", parents=[common], help="write a synthetic coefficient file")
    q.add_argument("--out", required=True)
    q.add_argument("--count", type=int, default=10)
    q.add_argument("--r", type=float, default=1.0)
    q.add_argument("--eps", type=_sign, default=1)
    q.set_defaults(func=cmd_gen)
    return parser


def _explicit_seed(argv: list[str]) -> bool:
    return any(a == "--seed" or a.startswith("--seed=") for a in argv)


def run_command(argv: list[str], out=None, err=None) -> int:
    out = out if out is not None else sys.stdout.buffer
    err = err if err is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not hasattr(args, "func"):
        parser.print_usage(err)
        print("qll: error: a command is required", file=err)
        return 2
    if getattr(args, "suite", None) == "equivariance" and _explicit_seed(argv):
        args.eq_seed = args.seed
    start = time.perf_counter()
    try:
        report = args.func(args)
        if args.timing and report.timing is None:
            report.timing = time.perf_counter() - start
        out.write(emit_report(report, args.format, args.timing))
    except (QllError, ValueError, KeyError, OverflowError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) or isinstance(exc, QllError) else str(exc.args[0])
        field = getattr(exc, "field", None)
        print(f"qll: error: {msg}" + (f" (field: {field})" if field else ""), file=err)
        return 2
    return report.exit_code


def main(argv: list[str] | None = None) -> int:
    return run_command(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
