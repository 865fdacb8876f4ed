"""Command-line front end.  Every subcommand prints a JSON report (schema 1).

Exit codes: 0 when all requested tolerances are met, 1 on tolerance failure,
2 on usage errors.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction

import numpy as np

from . import checks, scalar
from .algebra import dense_eigen
from .bethe import BetheSystem, solve_bethe, sum_rule_defect
from .errors import EllipticBetheError
from .gauge_aba import GaugeParams, transfer_eigenvalue
from .qop import select_basis, tq_eigenvalue_residual, tq_operator_residual
from .verify import spectrum_coverage
from .vertex import ModelParams, transfer_matrix

SCHEMA = 1


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_eta(text: str) -> Fraction:
    try:
        num, den = text.split("/") if "/" in text else (text, "1")
        return Fraction(int(num), int(den))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--eta must be P/Q with integers, got {text!r}") from None


def to_json(obj):
    """Complex numbers become [re, im]; numpy scalars and arrays become plain lists."""
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [to_json(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): to_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_json(x) for x in obj]
    return obj


def _model(args):
    eta = parse_eta(args.eta)
    tau = parse_complex(args.tau)
    if args.xi:
        xi = [parse_complex(x) for x in args.xi.split(",")]
    else:
        xi = checks.default_xi(args.N, args.seed, tau)
    mp = ModelParams.from_eta(args.N, eta, tau, xi=xi)
    return mp


def _params(text: str | None, n: int, mp: ModelParams, seed: int) -> list[complex]:
    if text is None or text.startswith("random"):
        if text and ":" in text:
            key, _, val = text.split(":", 1)[1].partition("=")
            if key != "seed":
                raise UsageError(f"bad --u text {text!r}")
            seed = int(val)
        return checks.random_parameters(np.random.default_rng(seed), n, mp.tau.tau)
    us = [parse_complex(x) for x in text.split(",")]
    if len(us) != n:
        raise UsageError(f"--u needs {n} values, got {len(us)}")
    return us


def _state(states, nu: int, index: int):
    matching = [st for st in states if st.nu == nu]
    if not matching:
        raise UsageError(f"no on-shell state with nu={nu}; available: {sorted({st.nu for st in states})}")
    if not 0 <= index < len(matching):
        raise UsageError(f"--state must be in 0..{len(matching) - 1}")
    return matching[index]


def _header(args, mp):
    return {"schema": SCHEMA, "command": args.command, "N": mp.N, "n": mp.n, "P": mp.P, "Q": mp.Q,
            "eta": str(Fraction(2 * mp.P, mp.Q)),
            "tau": mp.tau.tau, "xi": list(mp.xi), "seed": args.seed}


def _state_json(st, mp):
    d, nu1, nu3 = sum_rule_defect(st.roots, st.nu, BetheSystem(mp, st.nu))
    return {"nu": st.nu, "roots": list(st.roots), "max_residual": float(np.max(st.residuals)),
            "sumrule_ints": [nu1, nu3], "sumrule_defect": abs(d)}


def cmd_bethe_solve(args, mp):
    states = solve_bethe(mp, seed=args.seed)
    tol = args.tol or 1e-9
    rows = [_state_json(st, mp) for st in states]
    ok = all(r["max_residual"] <= tol and r["sumrule_defect"] <= tol for r in rows)
    table = [[r["nu"], " ".join(f"{z.real:.15g}{z.imag:+.15g}j" for z in r["roots"]), r["max_residual"]]
             for r in rows]
    return {"states": rows, "tol": tol}, ok, table


def cmd_spectrum(args, mp):
    states = solve_bethe(mp, seed=args.seed)
    tol = args.tol or 1e-10
    rng = np.random.default_rng(args.seed)
    rows = []
    worst = 0.0
    for u in checks.random_parameters(rng, args.points, mp.tau.tau):
        ev = dense_eigen(transfer_matrix(u, mp))[0]
        for k, st in enumerate(states):
            lam = transfer_eigenvalue(st.nu, u, st.roots, mp)
            err = float(np.min(np.abs(ev - lam)) / abs(lam))
            worst = max(worst, err)
            rows.append({"u": u, "state": k, "nu": st.nu, "T_nu": lam, "rel_error": err})
    coverage = spectrum_coverage(states, rows[0]["u"], mp) if rows else {}
    report = {"states": [_state_json(st, mp) for st in states], "matches": rows, "worst": worst, "tol": tol,
              "coverage": coverage}
    return report, worst <= tol, [[r["state"], r["nu"], r["rel_error"]] for r in rows]


def cmd_scalar_product(args, mp):
    states = solve_bethe(mp, seed=args.seed)
    st = _state(states, args.nu, args.state)
    gp = GaugeParams.default(mp, seed=args.seed, roots=[v for s in states for v in s.roots])
    us = _params(args.u, mp.n, mp, args.seed)
    rep = scalar.normalized_scalar_product(st.nu, st.roots, args.mu % mp.Q, us, mp, gp,
                                           check_bruteforce=args.check_bruteforce)
    tol = args.tol or 1e-8
    ok = rep.rel_error is None or rep.rel_error <= tol
    out = {"nu": rep.nu, "mu": rep.mu, "vs": list(rep.vs), "us": list(rep.us), "r": rep.r, "branch": rep.branch,
           "det": rep.det_value, "phi1": rep.phi1, "S": rep.S_formula, "S_bruteforce": rep.S_bruteforce,
           "rel_error": rep.rel_error, "tol": tol}
    return out, ok, [[rep.nu, rep.mu, rep.S_formula.real, rep.S_formula.imag, rep.rel_error]]


def cmd_free_fermion(args, mp):
    if (mp.P, mp.Q) != (1, 4):
        raise UsageError("free-fermion requires --eta 1/2")
    res = checks.check_free_fermion(mp.N, seed=args.seed, n_random=args.samples)
    tol = args.tol or 1.0
    return {"determinant_error": res.details["determinant_error"],
            "scalar_product_error": res.details["scalar_product_error"], "score": res.value, "tol": tol}, \
        res.value <= tol, [[res.details["determinant_error"], res.details["scalar_product_error"]]]


def cmd_qop(args, mp):
    states = solve_bethe(mp, seed=args.seed)
    gp = GaugeParams.default(mp, seed=args.seed, roots=[v for s in states for v in s.roots])
    us = checks.random_parameters(np.random.default_rng(args.seed), args.points, mp.tau.tau)
    br, bl = select_basis(mp, gp, "right"), select_basis(mp, gp, "left")
    op = [max(tq_operator_residual(u, mp, gp, "right", br), tq_operator_residual(u, mp, gp, "left", bl))
          for u in us]
    ev = [tq_eigenvalue_residual(st, us, mp) for st in states]
    tol = args.tol or 1e-9
    ok = max(op) <= tol and max(ev) <= tol
    return {"operator_tq": op, "eigenvalue_tq": ev, "tol": tol}, ok, [[k, r] for k, r in enumerate(op)]


def cmd_verify(args, mp=None):
    suites = args.suite or ["all"]
    results = checks.run_suites(suites, samples=args.samples, seed=args.seed)
    rows = [{"name": r.name, "value": r.value, "tol": r.tol, "passed": r.passed, "details": r.details}
            for r in results]
    return {"schema": SCHEMA, "command": "verify", "seed": args.seed, "samples": args.samples,
            "checks": rows, "passed": all(r.passed for r in results)}, all(r.passed for r in results), \
        [[r.name, r.value, r.tol, r.passed] for r in results]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ellipt-bethe", description="Elliptic Bethe ansatz tools")
    sub = p.add_subparsers(dest="command", required=True)

    def model_args(sp):
        sp.add_argument("--N", type=int, default=2)
        sp.add_argument("--eta", default="1/2", help="rational eta as P/Q")
        sp.add_argument("--tau", default="0.8i")
        sp.add_argument("--xi", default=None, help="comma-separated inhomogeneities")
        common(sp)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=None)
        sp.add_argument("--csv", default=None, help="also write a CSV table to this path")
        sp.add_argument("--output", default=None, help="write JSON here instead of stdout")

    model_args(sub.add_parser("bethe-solve", help="roots, residuals and sum-rule integers"))
    sp = sub.add_parser("spectrum", help="exact diagonalisation vs T_nu")
    model_args(sp)
    sp.add_argument("--points", type=int, default=10)
    sp = sub.add_parser("scalar-product", help="normalised scalar product from the determinant formula")
    model_args(sp)
    sp.add_argument("--nu", type=int, required=True)
    sp.add_argument("--mu", type=int, required=True)
    sp.add_argument("--state", type=int, default=0, help="index among on-shell states with this nu")
    sp.add_argument("--u", default=None, help="comma list or random:seed=K")
    sp.add_argument("--check-bruteforce", action="store_true")
    sp = sub.add_parser("free-fermion", help="closed forms at eta=1/2 vs the generic path")
    model_args(sp)
    sp.add_argument("--samples", type=int, default=3)
    sp = sub.add_parser("qop", help="TQ residuals")
    model_args(sp)
    sp.add_argument("--points", type=int, default=5)
    sp = sub.add_parser("verify", help="run check suites")
    common(sp)
    sp.add_argument("--suite", action="append", choices=["all", *checks.SUITES])
    sp.add_argument("--samples", type=int, default=10)
    return p


COMMANDS = {"bethe-solve": cmd_bethe_solve, "spectrum": cmd_spectrum, "scalar-product": cmd_scalar_product,
            "free-fermion": cmd_free_fermion, "qop": cmd_qop, "verify": cmd_verify}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            report, ok, table = cmd_verify(args)
        else:
            mp = _model(args)
            body, ok, table = COMMANDS[args.command](args, mp)
            report = {**_header(args, mp), **body, "passed": bool(ok)}
    except (UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EllipticBetheError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(to_json(report), indent=2, sort_keys=False)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(_CSV_HEADERS[args.command])
            w.writerows(to_json(table))
    if not ok:
        print("tolerance check failed", file=sys.stderr)
    return 0 if ok else 1


_CSV_HEADERS = {
    "bethe-solve": ["nu", "roots", "max_residual"],
    "spectrum": ["state", "nu", "rel_error"],
    "scalar-product": ["nu", "mu", "S_re", "S_im", "rel_error"],
    "free-fermion": ["determinant_error", "scalar_product_error"],
    "qop": ["point", "operator_tq"],
    "verify": ["name", "value", "tol", "passed"],
}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
