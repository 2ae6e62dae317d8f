"""Command-line entry point: runs verification suites and writes one JSON report.

Exit codes: 0 when every executed check passes, 1 when any check fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import dunkl, dunkl_classical, poisson, quantum, roots, sim
from .diffop import DiffOp
from .report import CheckResult, render_report, report_merge, run_check, witness
from .scalar import Poly, RatFunc

__all__ = ["main", "build_parser"]

ALL_ROOT_TYPES = ("A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6", "E7", "E8")
ALL_DUNKL_TYPES = ("A2", "A3", "B2", "G2", "F4")


class UsageError(Exception):
    pass


def _param(text: str) -> Poly:
    """A rational literal becomes a constant; anything else a symbol."""
    try:
        return Poly.const(Fraction(text))
    except (ValueError, ZeroDivisionError):
        if not text.isidentifier():
            raise UsageError(f"bad parameter {text!r}")
        return Poly.var(text)


def _pair(text: str | None) -> tuple[int, int] | None:
    if text is None:
        return None
    try:
        r, s = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--perturb-m expects 'r,s' (1-based), got {text!r}")
    return r - 1, s - 1


def _check_n(n: int, lo: int = 2) -> int:
    if n < lo:
        raise UsageError(f"--n must be at least {lo}")
    return n


def _check_perturb(perturb, n: int) -> None:
    if perturb is not None and not (0 <= perturb[0] < n and 0 <= perturb[1] < n):
        raise UsageError("--perturb-m index out of range")


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def suite_classical_lax(n: int, k: Poly, perturb=None) -> list[CheckResult]:
    name = "classical-lax"
    _check_perturb(perturb, n)
    lax = poisson.build_classical_lax(n, k, perturb)
    out = [run_check(name, f"{name}.n{n}.sum-to-zero", lambda: witness([d[2] for d in lax.sum_to_zero_defects()]))]
    residual = poisson.classical_lax_residual(lax=lax)
    for r in range(n):
        for s in range(n):
            out.append(run_check(name, f"{name}.n{n}.entry{r + 1}{s + 1}", lambda r=r, s=s: witness(residual[r][s])))
    return out


def suite_quantum_lax(n: int, k: Poly, g: Poly, perturb=None) -> list[CheckResult]:
    name = "quantum-lax"
    _check_perturb(perturb, n)
    lax = quantum.build_quantum_lax(n, k, g, perturb, validate=False)
    out = [run_check(name, f"{name}.n{n}.sum-to-zero", lambda: witness([d[2] for d in lax.sum_to_zero_defects()]))]
    residual = quantum.quantum_lax_residual(lax=lax)
    for r in range(n):
        for s in range(n):
            out.append(run_check(name, f"{name}.n{n}.entry{r + 1}{s + 1}", lambda r=r, s=s: witness(residual[r][s])))
    return out


def suite_involution(n: int, k: Poly) -> list[CheckResult]:
    name = "involution"
    lax = poisson.build_classical_lax(n, k)
    integrals = poisson.classical_integrals(lax, min(n, 2))
    total_p = sum((RatFunc.coerce(Poly.var(p)) for p in poisson.phase_variables(n)[1]), RatFunc.coerce(0))
    out = [
        run_check(name, f"{name}.n{n}.I1-total-momentum", lambda: witness(integrals[0] - total_p)),
        run_check(name, f"{name}.n{n}.I2-hamiltonian", lambda: witness(integrals[1] - poisson.classical_hamiltonian(n, k))),
    ]
    return out + poisson.involution_check(n, k, name)


def suite_quantum_commute(n: int, k: Poly, g: Poly, perturb=None) -> list[CheckResult]:
    name = "quantum-commute"
    _check_perturb(perturb, n)
    lax = quantum.build_quantum_lax(n, k, g, perturb, validate=False)
    pos = lax.positions
    J = quantum.quantum_integrals(lax)
    total_p = DiffOp.zero(pos)
    for v in pos:
        total_p = total_p + DiffOp.momentum(v, pos)
    out = [
        run_check(name, f"{name}.n{n}.sum-to-zero", lambda: witness([d[2] for d in lax.sum_to_zero_defects()])),
        run_check(name, f"{name}.n{n}.J1-total-momentum", lambda: witness(J[0] - total_p)),
        run_check(name, f"{name}.n{n}.J2-hamiltonian", lambda: witness(J[1] - lax.H)),
    ]
    for i in range(n):
        for j in range(i + 1, n):
            out.append(
                run_check(name, f"{name}.n{n}.J{i + 1}_J{j + 1}", lambda i=i, j=j: witness(quantum.commutator(J[i], J[j])))
            )
    return out


def suite_roots(label: str, check: bool = True, weyl: bool = False) -> tuple[list[CheckResult], dict]:
    name = "roots"
    rs = roots.build_root_system(label)
    lab = rs.type_label
    out = [
        run_check(
            name,
            f"{name}.{lab}.count",
            lambda: None if len(rs.roots) == roots.expected_root_count(lab) else f"{len(rs.roots)} roots, expected {roots.expected_root_count(lab)}",
        ),
        run_check(name, f"{name}.{lab}.simple", lambda: None if len(rs.simple) == rs.rank else f"{len(rs.simple)} simple roots"),
    ]
    info: dict = {"type": lab, "roots": len(rs.roots)}
    if check:
        out.append(run_check(name, f"{name}.{lab}.axioms", lambda: "; ".join(roots.axiom_check(rs.roots))))
        out.append(
            run_check(
                name,
                f"{name}.{lab}.crystallographic",
                lambda: "; ".join(f"<{b},{a}^v> = {v}" for a, b, v in roots.crystallographic_check(rs.roots)[:5]),
            )
        )

        def coxeter():
            hist, bad = roots.coxeter_sweep(rs)
            info["coxeter_orders"] = {str(m): c for m, c in hist.items()}
            return "; ".join(f"m({a},{b}) = {m}" for a, b, m in bad[:5])

        out.append(run_check(name, f"{name}.{lab}.coxeter", coxeter))
    if weyl:

        def group():
            els = roots.weyl_group_enumerate(rs)
            info["weyl_order"] = len(els)
            if len(els) != roots.weyl_group_order(lab):
                return f"enumerated {len(els)}, expected {roots.weyl_group_order(lab)}"
            return "; ".join(roots.conjugation_check(rs, els))

        out.append(run_check(name, f"{name}.{lab}.weyl", group))
    return out, info


def suite_dunkl_commute(label: str, max_degree: int) -> list[CheckResult]:
    return dunkl.dunkl_commute_check(roots.build_root_system(label), max_degree=max_degree)


def suite_dunkl_restrict(label: str) -> list[CheckResult]:
    name = "dunkl-restrict"
    rs = roots.build_root_system(label)
    ops = dunkl.DunklOperators(rs)
    out = [run_check(name, f"{name}.{rs.type_label}.operator", lambda: dunkl.res_operator_check(rs, ops=ops))]
    try:
        gens = dunkl.invariant_generators(rs)
    except ValueError:
        gens = []
    for i, p in enumerate(gens):
        out.append(run_check(name, f"{name}.{rs.type_label}.invariant{i + 1}", lambda p=p: dunkl.res_identity_check(rs, p, ops=ops)))
    return out


def suite_dunkl_gauge(label: str) -> list[CheckResult]:
    return dunkl.gauge_conjugation_check(roots.build_root_system(label))


def suite_dunkl_classical(label: str) -> list[CheckResult]:
    rs = roots.build_root_system(label)
    return (
        dunkl_classical.classical_poisson_involution_check(rs)
        + dunkl_classical.classical_equivariance_check(rs)
        + dunkl_classical.theta_check(rs)
    )


def suite_simulate(config: sim.SimConfig, order: bool = True, reversal: bool = True) -> tuple[list[CheckResult], dict, sim.Trajectory]:
    name = "simulate"
    traj = sim.integrate(config)
    rep = sim.drift_report(traj)
    out = [
        run_check(
            name,
            f"{name}.n{config.n}.drift",
            lambda: None if rep["status"] == "pass" else json.dumps(rep["max_relative_drift"], sort_keys=True),
        )
    ]
    extra = {"drift": rep}
    if order and config.integrator == "rk4":

        def study():
            res = sim.observed_order(config)
            extra["order_study"] = res
            return None if res["order"] >= sim.ORDER_MIN else f"observed order {res['order']:.3f} < {sim.ORDER_MIN}"

        out.append(run_check(name, f"{name}.n{config.n}.rk4-order", study))
    if reversal:

        def rev():
            err = sim.time_reversal_error(config)
            extra["time_reversal_error"] = err
            return None if err < sim.REVERSAL_TOL else f"time reversal error {err:.3e}"

        out.append(run_check(name, f"{name}.n{config.n}.time-reversal", rev))
    return out, extra, traj


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", type=Path, help="write the JSON report here")
    common.add_argument("--json", action="store_true", help="print the JSON report on stdout")
    common.add_argument("--quiet", action="store_true", help="suppress per-check lines")

    ap = _Parser(prog="cmverify", description="Exact verification of rational Calogero-Moser integrability.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="Lax pairs and integrals")
    vsub = v.add_subparsers(dest="what", required=True, parser_class=_Parser)
    for what in ("classical-lax", "quantum-lax", "involution", "quantum-commute"):
        p = vsub.add_parser(what, parents=[common])
        p.add_argument("--n", type=int, default=3)
        p.add_argument("--k", default="k", help="coupling symbol or rational value")
        if what != "involution":
            p.add_argument("--perturb-m", metavar="R,S", help="flip the sign of M[R][S] (negative control)")
        if what.startswith("quantum"):
            p.add_argument(
                "--coupling",
                choices=("lax", "stated"),
                default="lax",
                help="potential strength g: lax = k(k-1) (default), stated = k(k+1)",
            )

    r = sub.add_parser("roots", help="root systems")
    rsub = r.add_subparsers(dest="what", required=True, parser_class=_Parser)
    b = rsub.add_parser("build", parents=[common])
    b.add_argument("--type", required=True, dest="type_label")
    b.add_argument("--check", action="store_true", help="run axiom, crystallographic and Coxeter checks")
    b.add_argument("--weyl", action="store_true", help="enumerate the Weyl group (capped)")
    b.add_argument("--emit", choices=("json",), help="print the root system itself")

    d = sub.add_parser("dunkl", help="Dunkl operators")
    dsub = d.add_subparsers(dest="what", required=True, parser_class=_Parser)
    for what in ("commute", "restrict", "gauge", "classical"):
        p = dsub.add_parser(what, parents=[common])
        p.add_argument("--type", required=True, dest="type_label")
        if what == "commute":
            p.add_argument("--max-degree", type=int, default=5)

    s = sub.add_parser("simulate", parents=[common], help="numerical flow and drift diagnostics")
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--k", type=float, default=1.0)
    s.add_argument("--dt", type=float, default=1e-3)
    s.add_argument("--t-end", type=float, default=10.0)
    s.add_argument("--integrator", choices=("rk4", "leapfrog"), default="rk4")
    s.add_argument("--cadence", type=int, default=10)
    s.add_argument("--csv", type=Path, help="write the trajectory CSV here")
    s.add_argument("--no-order", action="store_true", help="skip the dt-halving study")

    sub.add_parser("all", parents=[common], help="curated default matrix")
    return ap


def _coupling(args, k: Poly) -> Poly:
    return quantum.lax_coupling(k) if args.coupling == "lax" else quantum.stated_coupling(k)


def _dispatch(args) -> tuple[str, list[CheckResult], dict]:
    cmd = args.command
    if cmd == "verify":
        n = _check_n(args.n)
        k = _param(args.k)
        label = f"verify {args.what}"
        if args.what == "classical-lax":
            return label, suite_classical_lax(n, k, _pair(args.perturb_m)), {}
        if args.what == "quantum-lax":
            return label, suite_quantum_lax(n, k, _coupling(args, k), _pair(args.perturb_m)), {"g": str(_coupling(args, k))}
        if args.what == "involution":
            return label, suite_involution(n, k), {}
        return label, suite_quantum_commute(n, k, _coupling(args, k), _pair(args.perturb_m)), {"g": str(_coupling(args, k))}
    if cmd == "roots":
        try:
            results, info = suite_roots(args.type_label, args.check, args.weyl)
        except roots.UnsupportedType as exc:
            raise UsageError(str(exc))
        if args.emit == "json":
            info["system"] = roots.build_root_system(args.type_label).to_json()
        return f"roots build {args.type_label}", results, info
    if cmd == "dunkl":
        try:
            roots.build_root_system(args.type_label)
        except roots.UnsupportedType as exc:
            raise UsageError(str(exc))
        if args.what == "commute":
            if args.max_degree < 1:
                raise UsageError("--max-degree must be at least 1")
            return f"dunkl commute {args.type_label}", suite_dunkl_commute(args.type_label, args.max_degree), {}
        fn = {"restrict": suite_dunkl_restrict, "gauge": suite_dunkl_gauge, "classical": suite_dunkl_classical}[args.what]
        return f"dunkl {args.what} {args.type_label}", fn(args.type_label), {}
    if cmd == "simulate":
        try:
            # n=3 starts from the reference initial state
            ref = sim.reference_config() if args.n == 3 else sim.SimConfig(n=args.n)
            config = replace(ref, k=args.k, dt=args.dt, t_end=args.t_end, integrator=args.integrator, cadence=args.cadence)
        except ValueError as exc:
            raise UsageError(str(exc))
        results, extra, traj = suite_simulate(config, order=not args.no_order)
        if args.csv:
            args.csv.write_text(traj.to_csv())
        return "simulate", results, extra
    return "all", run_all(), {}


def run_all() -> list[CheckResult]:
    k = Poly.var("k")
    results = []
    results += suite_classical_lax(3, k)
    results += suite_involution(3, k)
    results += suite_quantum_lax(3, k, quantum.lax_coupling(k))
    results += suite_quantum_commute(3, k, quantum.lax_coupling(k))
    for label in ALL_ROOT_TYPES:
        results += suite_roots(label, check=True)[0]
    for label in ALL_DUNKL_TYPES:
        results += suite_dunkl_commute(label, 5)
    for label in ("A1", "A2", "B2"):
        results += suite_dunkl_restrict(label)
        results += suite_dunkl_gauge(label)
    for label in ("A2", "A3", "B2", "G2"):
        results += suite_dunkl_classical(label)
    results += suite_simulate(sim.reference_config())[0]
    return results


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        command, results, extra = _dispatch(args)
    except UsageError as exc:
        print(f"cmverify: error: {exc}", file=sys.stderr)
        return 2
    text = render_report(command, results, extra)
    if args.report:
        args.report.write_text(text)
    if args.json:
        sys.stdout.write(text)
    elif not args.quiet:
        for r in results:
            line = f"{r.status.upper():4}  {r.check_id}  ({r.elapsed_ms} ms)"
            if r.residual_witness:
                line += f"\n      witness: {r.residual_witness[:300]}"
            print(line)
    summary = report_merge(results)
    if not args.json:
        print(f"{command}: {summary['status']} ({summary['counts']['pass']}/{summary['total']} passed)")
    return 0 if summary["status"] == "pass" else 1


if __name__ == "__main__":
    raise SystemExit(main())
