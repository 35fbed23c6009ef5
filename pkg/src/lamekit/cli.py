"""Command-line front end.

Subcommands::

    wp           ℘ and ℘' on a grid                       CSV x,p0,p1
    solve        closed-form fundamental solutions        CSV x,z,w,y1,y2,Phi
    lame even    even family coefficients and c_w         JSON
    lame odd     odd family coefficients and residuals    JSON
    lame odd-trivial   closed-form parabolic pair         JSON
    lame check   R1/R2 coefficient table                  JSON
    eigen        Dirichlet eigenvalues                    JSON
    eigen density  normalized y^2 for an eigenvalue       CSV x,density
    hierarchy    one hierarchy step on a spec             JSON (new spec + report)

Exit status: 0 success, 1 numerical/domain failure, 2 usage or spec error.
"""
from __future__ import annotations

import argparse
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import Tolerances
from .elliptic import EllipticInvariants, WeierstrassP
from .errors import DomainError, SpecError
from .lame import (
    LamePotentialSpec,
    even_coefficients,
    gc_residuals,
    odd_coefficients,
    odd_trivial_pair,
    r1_r2_polynomials,
    reduced_lie_operator,
)
from .numerics import Grid, Polynomial
from .specfile import (
    build_pair,
    build_potential,
    default_domain,
    dumps,
    fmt_float,
    lambda_family,
    load_spec,
    parse_spec,
    parse_symmetry,
)
from .symcore import compute_cw, fundamental_solutions, hierarchy_step, invariant_report

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


def csv_text(header: list[str], rows) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt_float(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def _emit(args, text: str, params: dict):
    if args.out is None:
        sys.stdout.write(text)
        return
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(text.encode("utf-8"))
    manifest = {
        "command": args.command_line,
        "parameters": params,
        "library_version": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "tolerances": args.tol.asdict(),
        "wall_clock_s": time.perf_counter() - args.t_start,
        "output": path.name,
    }
    Path(str(path) + ".manifest.json").write_bytes((dumps(manifest) + "\n").encode("utf-8"))


def _params(args, *names) -> dict:
    return {n: getattr(args, n) for n in names}


def _float_list(raw: str) -> list[float]:
    try:
        return [float(t) for t in raw.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {raw!r}") from None


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_wp(args):
    ev = WeierstrassP(args.g2, args.g3)
    xs = args.x if args.x else Grid(args.x0, args.x1, args.samples).nodes
    rows = [(x, *ev(x)) for x in xs]
    _emit(args, csv_text(["x", "p0", "p1"], rows), _params(args, "g2", "g3", "x", "x0", "x1", "samples"))


def cmd_solve(args):
    spec = load_spec(args.potential)
    grid = Grid(args.x0, args.x1, args.samples)
    pair = build_pair(spec, (args.x0, args.x1))
    fp = fundamental_solutions(pair, x_b=args.base, grid=grid, rtol=min(args.tol.rtol, 1e-10))
    phi = fp.phi_grid.values
    rows = [(x, pair.z(x), pair.w(x), fp.y1(x), fp.y2(x), p) for x, p in zip(grid.nodes, phi)]
    _emit(
        args,
        csv_text(["x", "z", "w", "y1", "y2", "Phi"], rows),
        {"spec": spec.to_dict(), **_params(args, "x0", "x1", "samples", "base"), "case": pair.case, "c_w": pair.c_w},
    )


def cmd_lame_even(args):
    inv = EllipticInvariants(args.g2, args.g3)
    fam = even_coefficients(args.n, args.c0, inv)
    from .symcore import classify_case

    out = {"n": args.n, "c0": args.c0, "g2": args.g2, "g3": args.g3, "c1": fam.c1, "a": fam.a, "c_w": fam.c_w}
    out["case"] = classify_case(fam.c_w, max(1.0, abs(fam.c_w)))
    _emit(args, dumps(out) + "\n", _params(args, "n", "c0", "g2", "g3"))


def cmd_lame_odd(args):
    inv = EllipticInvariants(args.g2, args.g3)
    fam = odd_coefficients(args.n, args.c0, inv)
    out = {"n": args.n, "c0": args.c0, "g2": args.g2, "g3": args.g3, "c1": fam.c1, "b": fam.b, "gc_residuals": list(gc_residuals(fam))}
    _emit(args, dumps(out) + "\n", _params(args, "n", "c0", "g2", "g3"))


def cmd_lame_odd_trivial(args):
    dom = (1.0 - args.w0, 2.0 - args.w0) if args.x0 is None else (args.x0, args.x1)
    pair = odd_trivial_pair(args.n, args.w0, dom)
    rep = invariant_report(pair)
    out = {
        "n": args.n,
        "w0": args.w0,
        "c1": -15.0 / 4.0 - args.n * (args.n + 4),
        "w": f"c1*(x+w0)^-2",
        "z": f"-2*(x+w0)^{-(2 * args.n + 3)}",
        "solution": f"a1*(x+w0)^{-1.5 - args.n} + a2*(x+w0)^{args.n + 2.5}",
        "domain": list(dom),
        "c_w": pair.c_w,
        "case": pair.case,
        "lie_residual_rel": rep["lie_residual_rel"],
        "cw_deviation": rep["cw_deviation"],
    }
    _emit(args, dumps(out) + "\n", _params(args, "n", "w0", "x0", "x1"))


def cmd_lame_check(args):
    spec = load_spec(args.potential)
    if spec.kind not in ("lame_even", "lame_odd", "lame_general"):
        raise SpecError([f"kind: lame check needs a lame_* potential, got {spec.kind!r}"])
    p = spec.params
    inv = EllipticInvariants(p["g2"], p["g3"])
    if spec.kind == "lame_general":
        pot = LamePotentialSpec(Polynomial(p["C"]), Polynomial(p["E"]), inv)
    else:
        fam = (even_coefficients if spec.kind == "lame_even" else odd_coefficients)(p["n"], p["c0"], inv)
        pot = fam.potential
    sym = parse_symmetry(Path(args.symmetry).read_text(encoding="utf-8"))
    R1, R2 = r1_r2_polynomials(pot, sym)
    D1, D2 = reduced_lie_operator(pot, sym)
    n = max(R1.degree, R2.degree, 0) + 1
    table = [{"power": i, "R1": R1.coeff(i), "R2": R2.coeff(i)} for i in range(n)]
    out = {
        "R1": R1.tolist(),
        "R2": R2.tolist(),
        "table": table,
        "derivation_mismatch": max((R1 - D1).max_abs_coeff(), (R2 - D2).max_abs_coeff()),
        "max_abs": max(R1.max_abs_coeff(), R2.max_abs_coeff()),
    }
    _emit(args, dumps(out) + "\n", {"potential": spec.to_dict(), "symmetry": {"A": sym.A.tolist(), "B": sym.B.tolist()}})


def cmd_eigen(args):
    from .eigen import EigenProblem, solve_eigen

    spec = load_spec(args.potential)
    w = build_potential(spec, (args.a, args.b))
    fam = lambda_family(spec, args.a, args.b) if args.method != "shoot" else None
    prob = EigenProblem(
        w, args.a, args.b, args.lmin, args.lmax, scan=args.scan, method=args.method, family=fam,
        threads=args.threads, rtol=args.tol.rtol, atol=args.tol.atol, xtol=args.tol.xtol,
    )
    res = solve_eigen(prob)
    out = {"eigenvalues": res.eigenvalues, "residuals": res.residuals, "method_flags": res.flags, "method": res.method}
    _emit(args, dumps(out) + "\n", {"potential": spec.to_dict(), **_params(args, "a", "b", "lmin", "lmax", "method", "scan", "threads")})


def cmd_eigen_density(args):
    from .eigen import density_profile, refine_eigenvalue

    spec = load_spec(args.potential)
    w = build_potential(spec, (args.a, args.b))
    lam = refine_eigenvalue(w, args.lam, args.a, args.b) if args.refine else args.lam
    grid = density_profile(w, lam, args.a, args.b, Grid(args.a, args.b, args.samples))
    _emit(
        args,
        csv_text(["x", "density"], zip(grid.nodes, grid.values)),
        {"potential": spec.to_dict(), "lambda": lam, **_params(args, "a", "b", "samples", "refine")},
    )


def cmd_hierarchy(args):
    spec = load_spec(args.base)
    alpha = _float_list(args.alpha)
    if len(alpha) != 3:
        raise UsageError("--alpha needs three comma-separated numbers")
    x0 = args.x0 if args.x0 is not None else default_domain(spec)[0]
    x1 = args.x1 if args.x1 is not None else default_domain(spec)[1]
    base = build_pair(spec, (x0, x1))
    new = hierarchy_step(base, args.chat, alpha, x_b=args.base_point, grid=Grid(x0, x1, 257))
    rep = invariant_report(new, 50)
    new_spec = parse_spec(
        {"kind": "hierarchy", "base": spec.to_dict(), "c_hat": args.chat, "alpha": alpha, "x_b": new.meta["x_b"], "domain": [x0, x1]}
    )
    report = {
        "case": new.case,
        "c_w": new.c_w,
        "c_w_expected": new.meta["c_w_expected"],
        "lie_residual_rel": rep["lie_residual_rel"],
        "cw_deviation": rep["cw_deviation"],
        "scale": new.scale,
        "ok": bool(rep["lie_ok"] and rep["cw_ok"]),
    }
    params = {"base": spec.to_dict(), "c_hat": args.chat, "alpha": alpha, "x0": x0, "x1": x1, "base_point": args.base_point}
    if args.out is None:
        sys.stdout.write(dumps({"spec": new_spec.to_dict(), "report": report}) + "\n")
    else:
        _emit(args, dumps(new_spec.to_dict()) + "\n", params)
        sys.stdout.write(dumps(report) + "\n")


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lamekit", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="write to this file (plus FILE.manifest.json) instead of stdout")
        return sp

    sp = common(sub.add_parser("wp", help="℘ and ℘' (CSV x,p0,p1)"))
    sp.add_argument("--g2", type=float, required=True)
    sp.add_argument("--g3", type=float, required=True)
    sp.add_argument("--x", type=float, action="append")
    sp.add_argument("--x0", type=float)
    sp.add_argument("--x1", type=float)
    sp.add_argument("--samples", type=int, default=101)
    sp.set_defaults(func=cmd_wp)

    sp = common(sub.add_parser("solve", help="fundamental solutions (CSV x,z,w,y1,y2,Phi)"))
    sp.add_argument("--potential", required=True)
    sp.add_argument("--x0", type=float, required=True)
    sp.add_argument("--x1", type=float, required=True)
    sp.add_argument("--samples", type=int, default=101)
    sp.add_argument("--base", type=float, help="phase base point (default: midpoint)")
    sp.set_defaults(func=cmd_solve)

    lame = sub.add_parser("lame", help="Lamé families").add_subparsers(dest="lame_cmd", required=True, parser_class=_Parser)
    for name, func in (("even", cmd_lame_even), ("odd", cmd_lame_odd)):
        sp = common(lame.add_parser(name))
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--c0", type=float, required=True)
        sp.add_argument("--g2", type=float, required=True)
        sp.add_argument("--g3", type=float, required=True)
        sp.set_defaults(func=func)
    sp = common(lame.add_parser("odd-trivial"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--w0", type=float, default=0.0)
    sp.add_argument("--x0", type=float)
    sp.add_argument("--x1", type=float)
    sp.set_defaults(func=cmd_lame_odd_trivial)
    sp = common(lame.add_parser("check"))
    sp.add_argument("--potential", required=True)
    sp.add_argument("--symmetry", required=True)
    sp.set_defaults(func=cmd_lame_check)

    sp = common(sub.add_parser("eigen", help="Dirichlet eigenvalues; 'eigen density' for profiles"))
    sp.add_argument("--potential", required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--lmin", type=float, required=True)
    sp.add_argument("--lmax", type=float, required=True)
    sp.add_argument("--method", choices=("shoot", "det", "both"), default="shoot")
    sp.add_argument("--scan", type=float, default=400.0, help="scan nodes per unit λ")
    sp.add_argument("--threads", type=int, default=1)
    sp.set_defaults(func=cmd_eigen)

    sp = common(sub.add_parser("eigen-density", help="alias of 'eigen density'", prog="lamekit eigen density"))
    sp.add_argument("--potential", required=True)
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--a", type=float, required=True)
    sp.add_argument("--b", type=float, required=True)
    sp.add_argument("--samples", type=int, default=201)
    sp.add_argument("--refine", action="store_true", help="snap λ to the nearest eigenvalue first")
    sp.set_defaults(func=cmd_eigen_density)

    sp = common(sub.add_parser("hierarchy", help="one hierarchy step"))
    sp.add_argument("--base", required=True, help="base potential spec")
    sp.add_argument("--chat", type=float, required=True)
    sp.add_argument("--alpha", required=True, help="a1,a2,a3")
    sp.add_argument("--x0", type=float)
    sp.add_argument("--x1", type=float)
    sp.add_argument("--base-point", dest="base_point", type=float)
    sp.set_defaults(func=cmd_hierarchy)
    return p


def _check_args(args):
    if args.cmd == "wp" and not args.x and (args.x0 is None or args.x1 is None):
        raise UsageError("wp: give --x (repeatable) or both --x0 and --x1")
    if getattr(args, "samples", 2) < 2:
        raise UsageError("--samples must be >= 2")
    for lo, hi in (("x0", "x1"), ("a", "b"), ("lmin", "lmax")):
        a, b = getattr(args, lo, None), getattr(args, hi, None)
        if a is not None and b is not None and not a < b:
            raise UsageError(f"need --{lo} < --{hi}")
    if getattr(args, "threads", 1) < 1:
        raise UsageError("--threads must be >= 1")


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if len(argv) >= 2 and argv[0] == "eigen" and argv[1] == "density":
        argv = ["eigen-density"] + argv[2:]
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        _check_args(args)
        args.tol = Tolerances.from_env()
        args.t_start = t0
        args.command_line = ["lamekit", *argv]
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecError as exc:
        print("error: invalid spec", file=sys.stderr)
        for prob in exc.problems:
            print(f"  - {prob}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
