"""Command-line front end.

Every subcommand writes a JSON result (to ``--output`` or stdout) and, where a
plot makes sense, a CSV given by ``--csv``. Exit status is 0 on success,
1 on a domain error and 2 on a usage error. ``--config FILE`` supplies
option values from a JSON object; explicit flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from loqckit import synth
from loqckit.calib import (
    CalibrationRun,
    DutRun,
    SweepDataset,
    calibrate_insertion,
    disambiguate_linewidths,
    extract_bs_phase,
    fit_cnot_transmission,
    fit_coupler_sweep,
    fit_ring,
    ring_params,
)
from loqckit.calib.coupler import coupler_model
from loqckit.calib.sweep import read_manifest, resolve
from loqckit.components import (
    CouplerModel,
    best_design,
    cross_power,
    default_coupler_model,
    design_solutions,
    ring_transmission,
)
from loqckit.errors import DomainError
from loqckit.lincircuit import CNOT_LOGICAL
from loqckit.quantum import anchored_axis, cnot_report, fidelity_map


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(args, obj):
    text = _dump(obj)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _write_csv(path, header, rows):
    lines = [",".join(header)]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def _load_sweep(path, scale="linear"):
    return SweepDataset.from_csv(path, scale=scale)


# ----------------------------------------------------------------------------
# subcommands

def cmd_design_coupler(args):
    m = CouplerModel(args.ell_c, args.ell_0, args.d_ell_c, args.d_ell_0, args.lambda_nm)
    sols = design_solutions(args.c_target, m, args.k_max)
    out = {
        "model": {"ell_c_um": m.ell_c, "ell_0_um": m.ell_0,
                  "d_ell_c_d_lambda": m.d_ell_c_d_lambda,
                  "d_ell_0_d_lambda": m.d_ell_0_d_lambda, "lambda_nm": m.lambda_nm},
        "C_target": args.c_target,
        "solutions": [
            {"k": s.k, "branch": s.branch, "L_int_um": s.L_int, "valid": s.valid,
             "dispersion_per_nm": s.dispersion}
            for s in sols
        ],
    }
    try:
        best = best_design(args.c_target, m, args.k_max)
        out["chosen"] = {"k": best.k, "branch": best.branch, "L_int_um": best.L_int,
                         "dispersion_per_nm": best.dispersion}
    except DomainError:
        out["chosen"] = None
    _emit(args, out)


def cmd_fit_ring(args):
    ds = _load_sweep(args.input, args.scale)
    window = None
    if args.window_min is not None or args.window_max is not None:
        window = (args.window_min if args.window_min is not None else -math.inf,
                  args.window_max if args.window_max is not None else math.inf)
    fit = fit_ring(ds, window, min_depth=args.min_depth)
    _emit(args, fit.to_dict())
    if args.csv:
        d = ds.as_linear() if window is None else ds.as_linear().window(*window)
        model = ring_transmission(d.wavelength, ring_params(fit))
        _write_csv(args.csv, ["wavelength_nm", "measured", "fit"],
                   zip(d.wavelength, d.value, model))


def cmd_disambiguate(args):
    data = json.loads(Path(args.input).read_text())
    pairs = [(d["gap_nm"], d["linewidths"]) for d in data]
    a = disambiguate_linewidths(pairs)
    _emit(args, {
        "devices": [{"gap_nm": g, "w_c": c, "w_int": i}
                    for g, c, i in zip(a.gaps, a.w_c, a.w_int)],
        "mean_w_int": a.mean_w_int,
        "w_int_variance": a.w_int_variance,
        "monotone": a.monotone,
    })


def cmd_fit_coupler_sweep(args):
    arr = np.loadtxt(args.input, delimiter=",", skiprows=1, ndmin=2)
    fit = fit_coupler_sweep([tuple(r) for r in arr], args.lambda_nm, args.ell_c_guess)
    _emit(args, fit.to_dict())
    if args.csv:
        m = coupler_model(fit)
        L = np.linspace(0.0, max(arr[:, 0].max(), 1.0), 201)
        _write_csv(args.csv, ["L_int_um", "C_fit"], zip(L, cross_power(L, m)))


def cmd_fit_mzi_phase(args):
    r = extract_bs_phase(_load_sweep(args.left, args.scale), _load_sweep(args.right, args.scale),
                         min_contrast=args.min_contrast)
    out = r.fit.to_dict()
    out["phase_rad"] = r.phase
    out["phase_over_pi"] = r.phase_over_pi
    _emit(args, out)


def _manifest_runs(manifest):
    scale = manifest.get("scale", "linear")
    calib = [
        CalibrationRun(int(c["device_type"]), c["role"],
                       _load_sweep(resolve(manifest, c["file"]), scale))
        for c in manifest.get("calibration", [])
    ]
    duts = [
        DutRun(d["device"],
               _load_sweep(resolve(manifest, d["reference"]), scale),
               _load_sweep(resolve(manifest, d["through"]), scale),
               _load_sweep(resolve(manifest, d["cross"]), scale))
        for d in manifest.get("devices", [])
    ]
    return calib, duts


def cmd_calibrate_insertion(args):
    calib, duts = _manifest_runs(read_manifest(args.input))
    sol, rep = calibrate_insertion(calib, duts, order=args.order, correct=not args.no_correction)
    _emit(args, {"calibration": sol.to_dict(), "insertion_loss": rep.to_dict()})
    if args.csv:
        lines = ["device,insertion_loss_db"] + [f"{d},{v!r}" for d, v in zip(rep.devices, rep.loss_db)]
        Path(args.csv).write_text("\n".join(lines) + "\n")


def _load_matrix(path):
    p = Path(path)
    if p.suffix == ".json":
        return np.asarray(json.loads(p.read_text())["matrix"], dtype=float)
    return np.loadtxt(p, delimiter=",", comments="#", ndmin=2)


def cmd_fit_cnot(args):
    fit = fit_cnot_transmission(_load_matrix(args.input))
    out = fit.to_dict()
    out["ports"] = list(CNOT_LOGICAL)
    _emit(args, out)


def cmd_cnot_report(args):
    _emit(args, cnot_report(args.c_half, args.c_twothirds).to_dict())


def cmd_fidelity_map(args):
    fitted = None
    if args.fitted_c_half is not None and args.fitted_c_twothirds is not None:
        fitted = (args.fitted_c_half, args.fitted_c_twothirds)
    fmap = fidelity_map(
        anchored_axis(args.c_half_min, args.c_half_max, args.n, 0.5),
        anchored_axis(args.c_twothirds_min, args.c_twothirds_max, args.n, 2.0 / 3.0),
        fitted,
    )
    i, j = fmap.argmax()
    out = {
        "n": args.n,
        "max_fidelity": float(fmap.fidelity[i, j]),
        "argmax": {"C_half": float(fmap.c_half[i]), "C_twothirds": float(fmap.c_twothirds[j])},
        "ideal": list(fmap.ideal),
        "fitted": list(fitted) if fitted else None,
        "failed_cells": len(fmap.errors),
    }
    if fitted:
        out["fitted_report"] = cnot_report(*fitted).to_dict()
    if args.csv:
        fmap.to_csv(args.csv)
        script = Path(args.csv).with_suffix(".gp")
        script.write_text(fmap.gnuplot_script(Path(args.csv).name))
        out["csv"] = str(args.csv)
        out["gnuplot"] = str(script)
    _emit(args, out)


def cmd_synth(args):
    outdir = Path(args.output or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    meta = {"kind": args.kind, "seed": args.seed, "noise": args.noise,
            "rng": "numpy PCG64"}
    noise = args.noise
    if args.kind == "ring":
        lo = args.lambda_min if args.lambda_min is not None else 1548.0
        hi = args.lambda_max if args.lambda_max is not None else 1556.0
        step = args.lambda_step if args.lambda_step is not None else 0.001
        p = synth.default_ring()
        ds = synth.synth_ring(p, lo, hi, step, synth.DEFAULT_POWER_NOISE if noise is None else noise,
                              args.seed)
        ds.to_csv(outdir / "ring.csv")
        meta["params"] = p.__dict__
        meta["files"] = ["ring.csv"]
    elif args.kind == "coupler-sweep":
        m = default_coupler_model()
        pts = synth.synth_coupler_sweep(m, noise=0.01 if noise is None else noise, seed=args.seed)
        _write_csv(outdir / "coupler_sweep.csv", ["L_int_um", "C"], pts)
        meta["params"] = {"ell_c": m.ell_c, "ell_0": m.ell_0, "lambda_nm": m.lambda_nm}
        meta["files"] = ["coupler_sweep.csv"]
    elif args.kind == "mzi":
        left, right = synth.synth_mzi(
            noise=synth.DEFAULT_POWER_NOISE if noise is None else noise, seed=args.seed)
        left.to_csv(outdir / "mzi_left.csv")
        right.to_csv(outdir / "mzi_right.csv")
        meta["params"] = {"C": 0.5, "phase_rad": math.pi / 2}
        meta["files"] = ["mzi_left.csv", "mzi_right.csv"]
    elif args.kind == "insertion":
        calib, duts, truth = synth.synth_insertion(
            noise=synth.DEFAULT_POWER_NOISE if noise is None else noise, seed=args.seed)
        manifest = {"scale": "linear", "calibration": [], "devices": []}
        for r in calib:
            name = f"cal{r.device_type}_{r.role}.csv"
            r.data.to_csv(outdir / name)
            manifest["calibration"].append({"device_type": r.device_type, "role": r.role, "file": name})
        for d in duts:
            entry = {"device": d.device}
            for role in ("reference", "through", "cross"):
                name = f"{d.device}_{role}.csv"
                getattr(d, role).to_csv(outdir / name)
                entry[role] = name
            manifest["devices"].append(entry)
        (outdir / "manifest.json").write_text(_dump(manifest))
        meta["params"] = {"loss_db": truth.loss_db.tolist(), "C": truth.C.tolist()}
        meta["files"] = ["manifest.json"]
    elif args.kind == "cnot-matrix":
        M = synth.synth_cnot_matrix(args.c_half, args.c_twothirds,
                                    0.0 if noise is None else noise, args.seed)
        text = "# rows: outputs c1,c0,t1,t0; columns: inputs c1,c0,t1,t0\n"
        text += "\n".join(",".join(repr(float(v)) for v in row) for row in M) + "\n"
        (outdir / "cnot_matrix.csv").write_text(text)
        meta["params"] = {"C_half": args.c_half, "C_twothirds": args.c_twothirds}
        meta["files"] = ["cnot_matrix.csv"]
    (outdir / "synth.json").write_text(_dump(meta))


# ----------------------------------------------------------------------------
# parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loqckit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="JSON file with option values")
        p.add_argument("--output", help="output path (JSON; a directory for synth)")
        p.set_defaults(func=func)
        return p

    m = default_coupler_model()
    p = add("design-coupler", cmd_design_coupler, "interaction lengths for a target splitting ratio")
    p.add_argument("--c-target", type=float, default=0.5)
    p.add_argument("--ell-c", type=float, default=m.ell_c)
    p.add_argument("--ell-0", type=float, default=m.ell_0)
    p.add_argument("--d-ell-c", type=float, default=m.d_ell_c_d_lambda)
    p.add_argument("--d-ell-0", type=float, default=m.d_ell_0_d_lambda)
    p.add_argument("--lambda", dest="lambda_nm", type=float, default=m.lambda_nm)
    p.add_argument("--k-max", type=int, default=3)

    p = add("fit-ring", cmd_fit_ring, "fit one ring resonance")
    p.add_argument("--input", required=True)
    p.add_argument("--scale", choices=("linear", "dB"), default="linear")
    p.add_argument("--window-min", type=float)
    p.add_argument("--window-max", type=float)
    p.add_argument("--min-depth", type=float, default=0.03)
    p.add_argument("--csv")

    p = add("disambiguate", cmd_disambiguate, "assign coupling and internal linewidths across gaps")
    p.add_argument("--input", required=True)

    p = add("fit-coupler-sweep", cmd_fit_coupler_sweep, "fit coupling and offset lengths")
    p.add_argument("--input", required=True)
    p.add_argument("--lambda", dest="lambda_nm", type=float, default=1554.0)
    p.add_argument("--ell-c-guess", type=float)
    p.add_argument("--csv")

    p = add("fit-mzi-phase", cmd_fit_mzi_phase, "beam-splitter phase from MZI fringes")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--scale", choices=("linear", "dB"), default="linear")
    p.add_argument("--min-contrast", type=float, default=0.05)

    p = add("calibrate-insertion", cmd_calibrate_insertion, "port calibration and insertion loss")
    p.add_argument("--input", required=True, help="manifest JSON")
    p.add_argument("--order", type=int, default=15)
    p.add_argument("--no-correction", action="store_true")
    p.add_argument("--csv")

    p = add("fit-cnot", cmd_fit_cnot, "splitting ratios from a 4x4 CNOT transmission matrix")
    p.add_argument("--input", required=True)

    p = add("cnot-report", cmd_cnot_report, "post-selected CNOT fidelity and success probability")
    p.add_argument("--c-half", type=float, default=0.5)
    p.add_argument("--c-twothirds", type=float, default=2.0 / 3.0)

    p = add("fidelity-map", cmd_fidelity_map, "fidelity over a grid of splitting ratios")
    p.add_argument("--c-half-min", type=float, default=0.4)
    p.add_argument("--c-half-max", type=float, default=0.6)
    p.add_argument("--c-twothirds-min", type=float, default=0.55)
    p.add_argument("--c-twothirds-max", type=float, default=0.78)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--fitted-c-half", type=float)
    p.add_argument("--fitted-c-twothirds", type=float)
    p.add_argument("--csv")

    p = add("synth", cmd_synth, "generate seeded synthetic data")
    p.add_argument("kind", choices=("ring", "coupler-sweep", "mzi", "insertion", "cnot-matrix"))
    p.add_argument("--seed", type=int, default=synth.DEFAULT_SEED)
    p.add_argument("--noise", type=float)
    p.add_argument("--lambda-min", type=float)
    p.add_argument("--lambda-max", type=float)
    p.add_argument("--lambda-step", type=float)
    p.add_argument("--c-half", type=float, default=0.477)
    p.add_argument("--c-twothirds", type=float, default=0.676)
    return parser


def _apply_config(parser, argv):
    """Parse ``argv`` with defaults taken from ``--config`` so flags still win."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("command", nargs="?")
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    if not known.config or known.command not in sub.choices:
        return parser.parse_args(argv)
    try:
        cfg = json.loads(Path(known.config).read_text())
    except (OSError, ValueError) as exc:
        parser.error(f"cannot read config {known.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    subparser = sub.choices[known.command]
    known_dests = {a.dest for a in subparser._actions}
    unknown = set(cfg) - known_dests
    if unknown:
        parser.error(f"unknown config keys: {', '.join(sorted(unknown))}")
    for a in subparser._actions:
        if a.dest in cfg:
            a.required = False
    subparser.set_defaults(**cfg)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except (DomainError, OSError) as exc:
        print(f"loqckit {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
