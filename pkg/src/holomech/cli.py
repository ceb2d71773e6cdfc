"""Command-line interface.

Subcommands::

    simulate          integrate a trajectory (complex, darboux, or both frames)
    verify-table1     cross-check the bundled closed-form table against the
                      generic h / H_i construction
    verify-symplectic randomized sweep over structure parameters: Darboux
                      residuals and bracket compatibility
    darboux           build and print the Darboux frame of one structure
    hi-flow           integrate the symmetry flow generated by H_i
    constrain         solve H_i = 0 for x2

Exit codes: 0 success (including escape terminations), 1 usage or parse
errors, 2 numerical failure, 3 degenerate structure.  Complex literals on
the command line use the RE+IMi form (e.g. ``--z0 1.0+0.5i``); bare reals
are accepted as purely real.  All randomized verifications are seeded; the
seed is printed in every report and defaults to $HOLOMECH_SEED or 42.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from .closed_forms import verify_reference_table
from .dynamics import (
    ConstraintFreeError,
    ConstraintUnsolvableError,
    FlowConfig,
    GridMismatchError,
    IntegratorConfig,
    equivalence_report,
    integrate_complex,
    integrate_darboux,
    invariant_flow,
    solve_invariant_zero,
)
from .hamiltonian import SystemSpec, darboux_to_w, w_to_darboux
from .output import json_text, trajectory_csv, write_text_atomic
from .potentials import PotentialError
from .symplectic import (
    DegenerateStructureError,
    SymplecticParams,
    build_real_J,
    darboux_frame,
    format_matrix,
    frame_residuals,
    verify_compatibility,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2
EXIT_DEGENERATE = 3

SEED_ENV_VAR = "HOLOMECH_SEED"


def default_seed() -> int:
    try:
        return int(os.environ.get(SEED_ENV_VAR, "42"))
    except ValueError:
        return 42


def parse_complex(text: str) -> complex:
    """Parse 'RE+IMi' literals; bare reals are purely real."""
    s = text.strip().replace(" ", "")
    try:
        return complex(float(s))
    except ValueError:
        pass
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid complex literal {text!r}; expected RE+IMi, e.g. 1.0+0.5i"
        ) from None


def parse_xi(text: str):
    parts = text.split(",")
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(
            "expected four comma-separated reals: x1,p1,x2,p2")
    try:
        return np.array([float(p) for p in parts])
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid Darboux point {text!r}") from None


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; the CLI contract says 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(report: dict, out: str | None) -> None:
    text = json_text(report)
    if out:
        write_text_atomic(out, text)
    else:
        sys.stdout.write(text)


def _summary_path(csv_path: str) -> Path:
    p = Path(csv_path)
    return p.with_suffix(".json") if p.suffix else p.with_name(p.name + ".json")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="holomech", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_system_args(p):
        p.add_argument("--potential", required=True,
                       help="potential expression, e.g. 'i*z^3'")
        p.add_argument("--mass", type=float, default=0.5)

    sim = sub.add_parser("simulate", help="integrate a trajectory")
    add_system_args(sim)
    sim.add_argument("--z0", type=parse_complex, default=0j)
    sim.add_argument("--p0", type=parse_complex, default=0j)
    sim.add_argument("--xi0", type=parse_xi, default=None,
                     help="Darboux initial point x1,p1,x2,p2 (overrides --z0/--p0)")
    sim.add_argument("--frame", choices=["complex", "darboux", "both"],
                     default="complex")
    sim.add_argument("--method", choices=["rk4", "rk45", "split"], default="rk45")
    sim.add_argument("--dt", type=float, default=1e-3)
    sim.add_argument("--rel-tol", type=float, default=1e-10)
    sim.add_argument("--abs-tol", type=float, default=1e-10)
    sim.add_argument("--t-end", type=float, default=10.0)
    sim.add_argument("--escape-radius", type=float, default=1e3)
    sim.add_argument("--seed", type=int, default=default_seed())
    sim.add_argument("--out", default="traj.csv")

    vt = sub.add_parser("verify-table1",
                        help="cross-check the closed-form reference table")
    vt.add_argument("--seed", type=int, default=default_seed())
    vt.add_argument("--points", type=int, default=100)
    vt.add_argument("--out", default=None)

    vs = sub.add_parser("verify-symplectic",
                        help="randomized Darboux + compatibility sweep")
    vs.add_argument("--random", type=int, default=100, metavar="N")
    vs.add_argument("--seed", type=int, default=default_seed())
    vs.add_argument("--potential", default="i*z^3")
    vs.add_argument("--mass", type=float, default=0.5)
    vs.add_argument("--out", default=None)

    db = sub.add_parser("darboux", help="Darboux frame of one structure")
    db.add_argument("--a", type=float, default=0.0)
    db.add_argument("--b", type=float, default=0.0)
    db.add_argument("--alpha", type=parse_complex, default=0j)
    db.add_argument("--out", default=None)

    hf = sub.add_parser("hi-flow", help="integrate the H_i symmetry flow")
    add_system_args(hf)
    hf.add_argument("--z0", type=parse_complex, default=0j)
    hf.add_argument("--p0", type=parse_complex, default=0j)
    hf.add_argument("--xi0", type=parse_xi, default=None)
    hf.add_argument("--eps-end", type=float, default=1.0)
    hf.add_argument("--d-eps", type=float, default=1e-3)
    hf.add_argument("--seed", type=int, default=default_seed())
    hf.add_argument("--out", default="traj.csv")

    cn = sub.add_parser("constrain", help="solve H_i = 0 for x2")
    add_system_args(cn)
    cn.add_argument("--x1", type=float, required=True)
    cn.add_argument("--p1", type=float, required=True)
    cn.add_argument("--p2", type=float, required=True)
    cn.add_argument("--out", default=None)

    return parser


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def _traj_rows(traj):
    if traj.frame == "complex":
        w_rows = traj.states
        xi_rows = np.array([w_to_darboux(w) for w in traj.states])
    else:
        xi_rows = traj.states
        w_rows = np.array([darboux_to_w(xi) for xi in traj.states])
    return w_rows, xi_rows


def cmd_simulate(args) -> int:
    spec = SystemSpec.from_source(args.potential, args.mass)
    cfg = IntegratorConfig(method=args.method, dt=args.dt,
                           rel_tol=args.rel_tol, abs_tol=args.abs_tol,
                           t_end=args.t_end, escape_radius=args.escape_radius)
    xi0 = args.xi0
    if xi0 is None:
        xi0 = w_to_darboux(np.array([args.z0.real, args.p0.real,
                                     args.z0.imag, args.p0.imag]))
        z0, p0 = args.z0, args.p0
    else:
        w0 = darboux_to_w(xi0)
        z0, p0 = complex(w0[0], w0[2]), complex(w0[1], w0[3])

    summary = {
        "command": "simulate",
        "potential": args.potential,
        "mass": args.mass,
        "frame": args.frame,
        "method": cfg.method,
        "dt": cfg.dt,
        "rel_tol": cfg.rel_tol,
        "abs_tol": cfg.abs_tol,
        "t_end": cfg.t_end,
        "escape_radius": cfg.escape_radius,
        "z0": z0,
        "p0": p0,
        "xi0": [float(c) for c in xi0],
        "seed": args.seed,
    }

    if args.frame == "both":
        traj_c = integrate_complex(spec, z0, p0, cfg)
        traj_d = integrate_darboux(spec, xi0, cfg)
        # master grid: complex-frame samples clipped to the common range
        hi_t = min(traj_c.t[-1], traj_d.t[-1])
        keep = traj_c.t <= hi_t
        t = traj_c.t[keep]
        w_rows = traj_c.states[keep]
        xi_rows = np.array([traj_d.state_at(tq) for tq in t])
        hr = traj_c.hr[keep]
        hi = traj_c.hi[keep]
        try:
            eq = equivalence_report(traj_c, traj_d)
            summary["max_frame_deviation"] = eq.max_deviation
            summary["frames_equivalent"] = eq.passed
        except GridMismatchError as exc:
            summary["max_frame_deviation"] = None
            summary["frames_equivalent"] = False
            summary["grid_mismatch"] = str(exc)
        traj = traj_c
    else:
        if args.frame == "complex":
            traj = integrate_complex(spec, z0, p0, cfg)
        else:
            traj = integrate_darboux(spec, xi0, cfg)
        t = traj.t
        w_rows, xi_rows = _traj_rows(traj)
        hr, hi = traj.hr, traj.hi

    summary["drift_Hr"] = traj.drift_hr
    summary["drift_Hi"] = traj.drift_hi
    summary["terminated_by"] = traj.terminated_by
    summary["n_steps"] = traj.n_steps
    summary["samples"] = int(len(t))

    write_text_atomic(args.out, trajectory_csv(t, w_rows, xi_rows, hr, hi))
    write_text_atomic(_summary_path(args.out), json_text(summary))
    print(f"wrote {args.out} ({len(t)} samples), terminated by "
          f"{traj.terminated_by}; drift Hr={traj.drift_hr:.3e} "
          f"Hi={traj.drift_hi:.3e}")
    return EXIT_OK if traj.terminated_by in ("t_end", "escape") else EXIT_NUMERICAL


def cmd_verify_table1(args) -> int:
    report = verify_reference_table(seed=args.seed, points=args.points)
    _emit(report, args.out)
    return EXIT_OK if report["consistent"] else EXIT_NUMERICAL


def _sample_params(rng) -> SymplecticParams:
    while True:
        a, b = rng.uniform(-2.0, 2.0, size=2)
        alpha = complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
        params = SymplecticParams(float(a), float(b), alpha)
        # keep a healthy margin from the degenerate surface
        if abs(params.degeneracy_defect) > 0.05:
            return params


def cmd_verify_symplectic(args) -> int:
    spec = SystemSpec.from_source(args.potential, args.mass)
    rng = np.random.default_rng(args.seed)
    n_pass = 0
    worst = {"block_form": 0.0, "orthogonality": 0.0, "canonicity": 0.0,
             "position_equation": 0.0, "momentum_equation": 0.0}
    failures = []
    for k in range(args.random):
        params = _sample_params(rng)
        w = rng.uniform(-2.0, 2.0, size=4)
        frame = darboux_frame(params)
        res = frame_residuals(frame, build_real_J(params))
        compat = verify_compatibility(params, spec, w)
        res["position_equation"] = compat["residuals"]["position_equation"]
        res["momentum_equation"] = compat["residuals"]["momentum_equation"]
        ok = (res["block_form"] <= 1e-10 and res["orthogonality"] <= 1e-12
              and res["canonicity"] <= 1e-10
              and res["position_equation"] <= 1e-10
              and res["momentum_equation"] <= 1e-10)
        for key in worst:
            worst[key] = max(worst[key], res[key])
        if ok:
            n_pass += 1
        else:
            failures.append({"trial": k,
                             "params": compat["params"],
                             "residuals": res})
    report = {
        "command": "verify-symplectic",
        "seed": args.seed,
        "potential": args.potential,
        "mass": args.mass,
        "trials": args.random,
        "n_pass": n_pass,
        "worst_residuals": worst,
        "failures": failures,
        "passed": n_pass == args.random,
    }
    _emit(report, args.out)
    print(f"{n_pass}/{args.random} PASS (seed {args.seed})")
    return EXIT_OK if n_pass == args.random else EXIT_NUMERICAL


def cmd_darboux(args) -> int:
    params = SymplecticParams(args.a, args.b, args.alpha)
    J = build_real_J(params)  # raises DegenerateStructureError
    frame = darboux_frame(params)
    res = frame_residuals(frame, J)
    lines = [
        f"params: a={args.a:g} b={args.b:g} "
        f"alpha={args.alpha.real:g}{args.alpha.imag:+g}i",
        f"r_plus  = {frame.r_plus:.17g}",
        f"r_minus = {frame.r_minus:.17g}",
        "J =",
        format_matrix(J),
        "S =",
        format_matrix(frame.S),
        f"residual |S^T J S - J'|   = {res['block_form']:.3e}",
        f"residual |S^T S - I|      = {res['orthogonality']:.3e}",
        f"residual canonicity       = {res['canonicity']:.3e}",
    ]
    if frame.r_minus < 1e-6:
        lines.append("warning: r_minus < 1e-6, near-degenerate structure")
    ok = (res["block_form"] <= 1e-10 and res["orthogonality"] <= 1e-12
          and res["canonicity"] <= 1e-10)
    lines.append("PASS" if ok else "FAIL")
    text = "\n".join(lines) + "\n"
    if args.out:
        write_text_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK if ok else EXIT_NUMERICAL


def cmd_hi_flow(args) -> int:
    spec = SystemSpec.from_source(args.potential, args.mass)
    xi0 = args.xi0
    if xi0 is None:
        xi0 = w_to_darboux(np.array([args.z0.real, args.p0.real,
                                     args.z0.imag, args.p0.imag]))
    flow = FlowConfig(epsilon_end=args.eps_end, d_epsilon=args.d_eps)
    traj = invariant_flow(spec, xi0, flow)
    w_rows, xi_rows = _traj_rows(traj)
    write_text_atomic(args.out,
                      trajectory_csv(traj.t, w_rows, xi_rows, traj.hr, traj.hi))
    summary = {
        "command": "hi-flow",
        "potential": args.potential,
        "mass": args.mass,
        "xi0": [float(c) for c in xi0],
        "epsilon_end": args.eps_end,
        "d_epsilon": args.d_eps,
        "drift_Hr": traj.drift_hr,
        "drift_Hi": traj.drift_hi,
        "terminated_by": traj.terminated_by,
        "n_steps": traj.n_steps,
        "samples": int(len(traj.t)),
        "seed": args.seed,
    }
    write_text_atomic(_summary_path(args.out), json_text(summary))
    print(f"wrote {args.out} ({len(traj.t)} samples); "
          f"drift Hr={traj.drift_hr:.3e} Hi={traj.drift_hi:.3e}")
    return EXIT_OK if traj.terminated_by == "t_end" else EXIT_NUMERICAL


def cmd_constrain(args) -> int:
    from .hamiltonian import darboux_invariant

    spec = SystemSpec.from_source(args.potential, args.mass)
    report = {
        "command": "constrain",
        "potential": args.potential,
        "mass": args.mass,
        "x1": args.x1,
        "p1": args.p1,
        "p2": args.p2,
    }
    try:
        x2 = solve_invariant_zero(spec, args.x1, args.p1, args.p2)
    except ConstraintFreeError:
        report["status"] = "any"
        report["x2"] = 0.0
        report["note"] = "p1 = 0 and v_i = 0: every x2 satisfies H_i = 0"
        _emit(report, args.out)
        return EXIT_OK
    except ConstraintUnsolvableError as exc:
        report["status"] = "unsolvable"
        report["error"] = str(exc)
        _emit(report, args.out)
        print(f"constrain: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report["status"] = "solved"
    report["x2"] = x2
    report["hi_residual"] = darboux_invariant(
        spec, np.array([args.x1, args.p1, x2, args.p2]))
    _emit(report, args.out)
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "verify-table1": cmd_verify_table1,
    "verify-symplectic": cmd_verify_symplectic,
    "darboux": cmd_darboux,
    "hi-flow": cmd_hi_flow,
    "constrain": cmd_constrain,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except PotentialError as exc:
        print(f"holomech: potential error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateStructureError as exc:
        print(f"holomech: degenerate structure: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValueError, OSError) as exc:
        print(f"holomech: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
