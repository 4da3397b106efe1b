"""Command-line interface.

Subcommands: mu-c, eigen, bifurcate, simulate, sweep, boundary. Every
command writes its primary report to stdout as JSON and, into the output
directory, the report plus a manifest sufficient to reproduce the run.

Exit codes: 0 success, 2 invalid input, 3 solver failure, 4 degenerate or
nonexistent bifurcation branch, 5 CFL violation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .bifurcation import (
    bifurcation_report,
    leading_eigenpair,
    lyapunov_coeff_plain,
    solve_G11,
)
from .contours import field_svg
from .critical import mu_c_closed, mu_c_oracle
from .domain import synthesize_physical, validate
from .errors import (
    AnnuflowError,
    CFLViolation,
    DegenerateCoefficient,
    EigSolverFailure,
    GridMismatch,
    InvalidGeometry,
    InvalidPhysics,
    NoBracket,
    NoEscape,
    SingularSystem,
    SolverFailure,
    TooCoarse,
)
from .io import (
    read_config,
    write_field_csv,
    write_json,
    write_manifest,
    write_trajectory_csv,
)
from .simulator import Simulator, escape_experiment, escape_slope, fit_growth_rate
from .spectral import build_grid
from .sweep import (
    SweepSpec,
    boundary_bisect,
    sweep_l,
    write_sweep_csv,
    write_sweep_manifest,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_DEGENERATE = 4
EXIT_CFL = 5

_EXIT_BY_ERROR = {
    InvalidGeometry: EXIT_INPUT,
    InvalidPhysics: EXIT_INPUT,
    TooCoarse: EXIT_INPUT,
    GridMismatch: EXIT_INPUT,
    EigSolverFailure: EXIT_SOLVER,
    SolverFailure: EXIT_SOLVER,
    SingularSystem: EXIT_SOLVER,
    NoBracket: EXIT_SOLVER,
    NoEscape: EXIT_SOLVER,
    DegenerateCoefficient: EXIT_DEGENERATE,
    CFLViolation: EXIT_CFL,
}


class NoBranch(DegenerateCoefficient):
    """Requested a bifurcated state on the side of mu_c where none exists."""


def _args_dict(args) -> dict:
    """Serializable view of the parsed arguments for the manifest."""
    return {k: v for k, v in vars(args).items() if not callable(v)}


def _outdir(args) -> str:
    out = args.outdir or os.environ.get("ANNUFLOW_OUTDIR", ".")
    os.makedirs(out, exist_ok=True)
    return out


def _emit(doc: dict) -> None:
    json.dump(doc, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


# ------------------------------------------------------------- commands


def cmd_mu_c(args) -> int:
    params = validate(args.a, args.b, args.alpha, 1.0)
    doc = {"a": params.a, "b": params.b, "alpha": params.alpha,
           "mu_c_closed": mu_c_closed(params)}
    if args.oracle:
        doc["mu_c_oracle"] = mu_c_oracle(params)
        doc["discrepancy"] = (abs(doc["mu_c_oracle"] - doc["mu_c_closed"])
                              / doc["mu_c_closed"])
    _emit(doc)
    out = _outdir(args)
    path = os.path.join(out, "mu_c.json")
    write_json(path, doc)
    write_manifest(out, "mu-c", _args_dict(args), [path])
    return EXIT_OK


def cmd_eigen(args) -> int:
    params = validate(args.a, args.b, args.alpha, args.mu)
    grid = build_grid(params.a, params.b, args.N)
    eig = leading_eigenpair(params, params.mu, grid)
    samples = [{"r": float(r), "re": float(v.real), "im": float(v.imag)}
               for r, v in zip(grid.nodes, eig.psi1.values)]
    doc = {"a": params.a, "b": params.b, "alpha": params.alpha, "mu": params.mu,
           "N": args.N, "lambda1": eig.lambda1, "psi1_samples": samples}
    _emit(doc)
    out = _outdir(args)
    outputs = [os.path.join(out, "eigen.json")]
    write_json(outputs[0], doc)
    if args.profile_csv:
        path = os.path.join(out, args.profile_csv)
        with open(path, "w") as fh:
            fh.write("r,psi1_re,psi1_im\n")
            for s in samples:
                fh.write(f"{s['r']:.17g},{s['re']:.17g},{s['im']:.17g}\n")
        outputs.append(path)
    write_manifest(out, "eigen", _args_dict(args), outputs)
    return EXIT_OK


def cmd_bifurcate(args) -> int:
    muc = mu_c_closed(validate(args.a, args.b, args.alpha, 1.0))
    mu = args.mu if args.mu is not None else muc * (1.0 - 1e-4)
    params = validate(args.a, args.b, args.alpha, mu)
    grid = build_grid(params.a, params.b, args.N)
    report = bifurcation_report(params, mu, grid)
    if report.amplitude is None:
        raise NoBranch(
            f"no bifurcated branch at mu={mu}: lambda1={report.lambda1} and "
            f"l={report.l} have the same sign; the {report.classification.value} "
            f"branch lives on the other side of mu_c={muc}")
    eig = leading_eigenpair(params, mu, grid)
    mc = solve_G11(params, mu, eig, grid)
    doc = {"a": params.a, "b": params.b, "alpha": params.alpha, "mu": mu,
           "mu_c": muc, "N": args.N, "lambda1": report.lambda1, "l": report.l,
           "l_plain_pairing": lyapunov_coeff_plain(params, mu, eig, mc, grid),
           "classification": report.classification.value,
           "amplitude": report.amplitude, "phases": args.phases}
    _emit(doc)
    out = _outdir(args)
    outputs = [os.path.join(out, "bifurcate.json")]
    write_json(outputs[0], doc)
    for j in range(args.phases):
        s = report.amplitude * np.exp(2j * np.pi * j / args.phases)
        psi = report.psi_s(s, args.ntheta)
        vr, vt = report.velocity(s, grid, args.ntheta)
        base = os.path.join(out, f"field_phase{j}")
        write_field_csv(base + ".csv", grid.nodes, psi, vr, vt)
        with open(base + ".svg", "w") as fh:
            fh.write(field_svg(psi, grid.nodes,
                               2.0 * np.pi * np.arange(args.ntheta) / args.ntheta))
        outputs += [base + ".csv", base + ".svg"]
    write_manifest(out, "bifurcate", _args_dict(args), outputs)
    return EXIT_OK


def _sim_config(args) -> dict:
    cfg = {
        "a": 1.0, "b": 3.0, "alpha": 5.0, "mu": None, "N": 48, "ntheta": 32,
        "dt": 0.01, "steps": 1000, "delta": 1e-3, "nonlinear": True,
        "sample_every": 10, "seed": 0,
    }
    if args.config:
        raw = read_config(args.config)
        casts = {"a": float, "b": float, "alpha": float, "mu": float,
                 "N": int, "ntheta": int, "dt": float, "steps": int,
                 "delta": float, "sample_every": int, "seed": int,
                 "nonlinear": lambda s: s.lower() in ("1", "true", "yes")}
        for key, val in raw.items():
            if key not in casts:
                raise InvalidPhysics(f"unknown config key {key!r}")
            cfg[key] = casts[key](val)
    for key in ("a", "b", "alpha", "mu", "dt", "steps", "delta", "N",
                "ntheta", "sample_every"):
        arg = getattr(args, key, None)
        if arg is not None:
            cfg[key] = arg
    if args.linear:
        cfg["nonlinear"] = False
    return cfg


def cmd_simulate(args) -> int:
    cfg = _sim_config(args)
    muc = mu_c_closed(validate(cfg["a"], cfg["b"], cfg["alpha"], 1.0))
    mu = cfg["mu"] if cfg["mu"] is not None else 2.0 * muc
    cfg["mu"] = mu
    params = validate(cfg["a"], cfg["b"], cfg["alpha"], mu)
    grid = build_grid(params.a, params.b, cfg["N"])
    sim = Simulator(params, grid, mu=mu, dt=cfg["dt"], ntheta=cfg["ntheta"],
                    nonlinear=cfg["nonlinear"])
    eig = leading_eigenpair(params, mu, grid)
    out = _outdir(args)
    outputs = []

    if args.escape:
        deltas = [float(s) for s in args.escape.split(",")]
        table = escape_experiment(sim, eig, deltas, eps_thr=args.eps_thr)
        slope = escape_slope(table) if len(table) > 1 else None
        doc = {"mu": mu, "lambda1": eig.lambda1, "eps_thr": args.eps_thr,
               "escape_times": [{"delta": d, "T": t} for d, t in table],
               "slope": slope,
               "inverse_lambda1": 1.0 / eig.lambda1}
        _emit(doc)
        path = os.path.join(out, "escape.json")
        write_json(path, doc)
        outputs.append(path)
        write_manifest(out, "simulate", cfg | {"escape": args.escape,
                                               "eps_thr": args.eps_thr}, outputs)
        return EXIT_OK

    state = sim.init_from_mode(eig, cfg["delta"])
    diags = [sim.diagnostics(state)]
    residual_max = 0.0
    for k in range(1, cfg["steps"] + 1):
        new = sim.step(state)
        if k % cfg["sample_every"] == 0 or k == cfg["steps"]:
            residual_max = max(residual_max, sim.energy_residual(state, new))
            diags.append(sim.diagnostics(new))
        state = new
    try:
        sat = diags[-1].max_psi if cfg["nonlinear"] else None
        growth = fit_growth_rate(diags, saturation=None if sat in (None, 0.0) else sat)
    except (SolverFailure, ValueError):
        growth = None
    doc = {"a": params.a, "b": params.b, "alpha": params.alpha, "mu": mu,
           "N": cfg["N"], "ntheta": cfg["ntheta"], "dt": cfg["dt"],
           "steps": cfg["steps"], "delta": cfg["delta"],
           "nonlinear": cfg["nonlinear"], "final_t": state.t,
           "final_E3": diags[-1].E3, "final_max_psi": diags[-1].max_psi,
           "growth_rate": growth, "saturation_max_psi": sat,
           "energy_residual_max": residual_max}
    _emit(doc)
    traj = os.path.join(out, "trajectory.csv")
    write_trajectory_csv(traj, diags)
    final = os.path.join(out, "simulate.json")
    write_json(final, doc)
    outputs += [traj, final]
    if args.snapshot:
        phys = synthesize_physical(
            [m for f in state.modal_fields() for m in (f, f.conj())],
            cfg["ntheta"])
        vr = np.zeros((grid.N + 1, cfg["ntheta"]))
        vt = np.zeros_like(vr)
        theta = 2.0 * np.pi * np.arange(cfg["ntheta"]) / cfg["ntheta"]
        for n, c in state.psi.items():
            ph = np.exp(1j * n * theta)
            vr += 2.0 * np.real(np.outer(-1j * n * c / grid.nodes, ph))
            vt += 2.0 * np.real(np.outer(grid.d1 @ c, ph))
        snap = os.path.join(out, "snapshot.csv")
        write_field_csv(snap, grid.nodes, phys, vr, vt)
        outputs.append(snap)
    write_manifest(out, "simulate", cfg, outputs)
    return EXIT_OK


def _sweep_spec(path: str) -> SweepSpec:
    raw = read_config(path)
    kwargs = {}
    casts = {"a": float, "alpha_min": float, "alpha_max": float,
             "alpha_samples": int, "b_min": float, "b_max": float,
             "b_samples": int, "mu_offset": float, "N": int, "ntheta": int}
    vals = {}
    for key, val in raw.items():
        if key not in casts:
            raise InvalidPhysics(f"unknown sweep key {key!r}")
        vals[key] = casts[key](val)
    if "alpha_min" in vals or "alpha_max" in vals:
        kwargs["alpha_range"] = (vals.get("alpha_min", 5.0), vals.get("alpha_max", 15.0))
    if "b_min" in vals or "b_max" in vals:
        kwargs["b_range"] = (vals.get("b_min", 5.0), vals.get("b_max", 15.0))
    for key in ("a", "alpha_samples", "b_samples", "mu_offset", "N", "ntheta"):
        if key in vals:
            kwargs[key] = vals[key]
    return SweepSpec(**kwargs)


def cmd_sweep(args) -> int:
    spec = _sweep_spec(args.spec)
    out = _outdir(args)
    csv_path = os.path.join(out, "sweep.csv")
    man_path = os.path.join(out, "sweep_manifest.json")
    if args.resume and os.path.exists(csv_path) and os.path.exists(man_path):
        with open(man_path) as fh:
            prev = json.load(fh)
        if prev.get("spec") == spec.to_dict():
            _emit({"status": "resume-noop", "csv": csv_path})
            return EXIT_OK
    rows = sweep_l(spec)
    write_sweep_csv(rows, csv_path)
    write_sweep_manifest(spec, man_path, extra={"rows": len(rows)})
    classes = sorted({r.classification for r in rows if r.status == "ok"})
    _emit({"rows": len(rows), "classes_present": classes, "csv": csv_path})
    return EXIT_OK


def cmd_boundary(args) -> int:
    spec = _sweep_spec(args.spec)
    out = _outdir(args)
    alphas = [args.alpha] if args.alpha is not None else list(spec.alphas())
    results = [boundary_bisect(spec, float(al)) for al in alphas]
    csv_path = os.path.join(out, "boundary.csv")
    with open(csv_path, "w") as fh:
        fh.write("alpha,b_star,status\n")
        for res in results:
            bs = "" if res.b_star is None else f"{res.b_star:.17g}"
            fh.write(f"{res.alpha:.17g},{bs},{res.status}\n")
    write_sweep_manifest(spec, os.path.join(out, "boundary_manifest.json"),
                         extra={"alphas": [float(a) for a in alphas]})
    _emit({"points": [{"alpha": r.alpha, "b_star": r.b_star, "status": r.status}
                      for r in results], "csv": csv_path})
    return EXIT_OK


# --------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="annuflow",
        description="Stability and bifurcation toolkit for slip-driven annulus flow")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add_outdir(sp):
        sp.add_argument("-o", "--outdir", default=None,
                        help="output directory (default: $ANNUFLOW_OUTDIR or .)")

    sp = sub.add_parser("mu-c", help="critical viscosity")
    sp.add_argument("a", type=float)
    sp.add_argument("b", type=float)
    sp.add_argument("alpha", type=float)
    sp.add_argument("--oracle", action="store_true",
                    help="also compute the determinant-root cross-check")
    add_outdir(sp)
    sp.set_defaults(func=cmd_mu_c)

    sp = sub.add_parser("eigen", help="leading eigenpair")
    sp.add_argument("a", type=float)
    sp.add_argument("b", type=float)
    sp.add_argument("alpha", type=float)
    sp.add_argument("mu", type=float)
    sp.add_argument("-N", type=int, default=64)
    sp.add_argument("--profile-csv", default=None,
                    help="also dump the radial profile to this CSV filename")
    add_outdir(sp)
    sp.set_defaults(func=cmd_eigen)

    sp = sub.add_parser("bifurcate", help="center-manifold reduction and states")
    sp.add_argument("a", type=float)
    sp.add_argument("b", type=float)
    sp.add_argument("alpha", type=float)
    sp.add_argument("--mu", type=float, default=None,
                    help="viscosity (default: mu_c * (1 - 1e-4))")
    sp.add_argument("--phases", type=int, default=0,
                    help="emit this many bifurcated fields at phases 2 pi j / k")
    sp.add_argument("-N", type=int, default=48)
    sp.add_argument("--ntheta", type=int, default=64)
    add_outdir(sp)
    sp.set_defaults(func=cmd_bifurcate)

    sp = sub.add_parser("simulate", help="nonlinear time integration")
    sp.add_argument("--config", default=None, help="key=value config file")
    for name, typ in (("a", float), ("b", float), ("alpha", float),
                      ("mu", float), ("dt", float), ("delta", float)):
        sp.add_argument(f"--{name}", type=typ, default=None)
    sp.add_argument("--steps", type=int, default=None)
    sp.add_argument("-N", type=int, default=None)
    sp.add_argument("--ntheta", type=int, default=None)
    sp.add_argument("--sample-every", dest="sample_every", type=int, default=None)
    sp.add_argument("--linear", action="store_true",
                    help="disable the nonlinear term")
    sp.add_argument("--snapshot", action="store_true",
                    help="dump the final field as CSV")
    sp.add_argument("--escape", default=None,
                    help="comma-separated deltas for an escape-time experiment")
    sp.add_argument("--eps-thr", dest="eps_thr", type=float, default=1e-2,
                    help="escape threshold on the velocity L2 norm")
    add_outdir(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sweep", help="(alpha, b) classification sweep")
    sp.add_argument("spec", help="key=value sweep spec file")
    sp.add_argument("--resume", action="store_true",
                    help="no-op if the same spec already completed here")
    add_outdir(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("boundary", help="bisect the sign(l) boundary in b")
    sp.add_argument("spec", help="key=value sweep spec file")
    sp.add_argument("--alpha", type=float, default=None,
                    help="single alpha (default: all alphas in the spec grid)")
    add_outdir(sp)
    sp.set_defaults(func=cmd_boundary)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AnnuflowError as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        for cls, code in _EXIT_BY_ERROR.items():
            if isinstance(exc, cls):
                return code
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        _emit({"error": type(exc).__name__, "message": str(exc)})
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
