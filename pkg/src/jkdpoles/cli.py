"""Command-line entry points.

Subcommands: ``fit``, ``rel-err``, ``cond-report``, ``verify-kernel``,
``spectrum`` and ``export-tables``. Every command prints a human-readable
table by default and JSON with ``--json``; CSV-producing commands write to
``--output`` (or stdout).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .augmented import kernel_verification, ricker_signal
from .errors import JKDError
from .fit_pade import fit_pade
from .fit_stieltjes import fit_stieltjes
from .material import BUILTIN, get_material, load_registry
from .mpcore import DEFAULT_DIGITS
from .report import (
    TABLE_COLUMNS,
    TABLE_MATRICES,
    dense_band,
    export_model,
    import_model,
    model_to_dict,
    rel_err_profile,
    table_conditions,
)
from .sampling import DEFAULT_BAND, SCHEMES, TABLE_BAND, RickerSource, make_grid, parse_band, ricker_spectrum

log = logging.getLogger("jkdpoles")

FITTERS = {"pade": fit_pade, "stieltjes": fit_stieltjes}
TABLE_DIGITS = 200


def _band_arg(text):
    try:
        return parse_band(text)
    except JKDError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _common_fit_args(p, approaches=("pade", "stieltjes")):
    p.add_argument("--material", default="S1", help="label S1..S5 or one defined in --materials-file")
    p.add_argument("--materials-file", type=Path, help="key = value material registry")
    p.add_argument("--approach", choices=approaches, default=approaches[0])
    p.add_argument("--grid", choices=SCHEMES, default="log")
    p.add_argument("-M", type=int, default=10, help="number of nodes / poles (default 10)")
    p.add_argument("--digits", type=int, default=DEFAULT_DIGITS)
    p.add_argument("--band", type=_band_arg, default=DEFAULT_BAND, help="lo:hi in s^-1 (default 1e-3:2e6)")


def build_parser():
    parser = argparse.ArgumentParser(prog="jkdpoles", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a pole-residue model")
    _common_fit_args(p, ("pade", "stieltjes", "both"))
    p.add_argument("--json", action="store_true")
    p.add_argument("--output", type=Path, help="write the model file here (prefix per approach with 'both')")
    p.add_argument("--full-precision", action="store_true", help="also store decimal strings at working precision")

    p = sub.add_parser("rel-err", help="relative error profile over the dense band (CSV omega,rel_err)")
    _common_fit_args(p)
    p.add_argument("--model", type=Path, help="use a saved model file instead of fitting")
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--output", type=Path)
    p.add_argument("--json", action="store_true", help="print summary JSON instead of CSV")

    p = sub.add_parser("cond-report", help="log10 condition numbers of A, B, S1, S2")
    p.add_argument("--material", action="append", help="repeatable; default all built-in materials")
    p.add_argument("--materials-file", type=Path)
    p.add_argument("-M", type=int, action="append", help="repeatable; default 8 and 14")
    p.add_argument("--grid", choices=SCHEMES, action="append", help="repeatable; default both")
    p.add_argument("--digits", type=int, default=TABLE_DIGITS)
    p.add_argument("--band", type=_band_arg, default=DEFAULT_BAND)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("verify-kernel", help="auxiliary ODE vs direct convolution (CSV t,theta_sum,oracle,abs_diff)")
    _common_fit_args(p)
    p.set_defaults(material="S2")
    p.add_argument("--f0", type=float, default=1e5)
    p.add_argument("--dt", type=float, default=1e-9)
    p.add_argument("--duration", type=float, default=4e-5)
    p.add_argument("--every", type=int, default=100, help="check every n-th step")
    p.add_argument("--output", type=Path)

    p = sub.add_parser("spectrum", help="Ricker spectrum (CSV omega,re,im)")
    p.add_argument("--f0", type=float, default=1e5)
    p.add_argument("--band", type=_band_arg, default=DEFAULT_BAND)
    p.add_argument("--points", type=int, default=400)
    p.add_argument("--output", type=Path)

    p = sub.add_parser("export-tables", help="condition-number tables for S1..S5 as CSV")
    p.add_argument("--outdir", type=Path, default=Path("."))
    p.add_argument("--band", type=_band_arg, default=TABLE_BAND)
    p.add_argument("--digits", type=int, default=TABLE_DIGITS)
    p.add_argument("--jobs", type=int, default=1)
    return parser


def _registry(args):
    return load_registry(args.materials_file) if getattr(args, "materials_file", None) else None


def _write_csv(rows, header, path):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    if path is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(path).write_text(buf.getvalue())


def _fit(args, approach, m):
    grid = make_grid(args.grid, args.M, *args.band)
    return FITTERS[approach](m, grid, args.M, args.digits)


def _discrepancy(a, b):
    pa, pb = a.poles_array, b.poles_array
    ra, rb = a.residues_array, b.residues_array
    return {
        "max_rel_pole": float(np.max(np.abs(pa - pb) / np.abs(pb))),
        "max_rel_residue": float(np.max(np.abs(ra - rb) / np.abs(rb))),
    }


def cmd_fit(args):
    m = get_material(args.material, _registry(args))
    approaches = ("pade", "stieltjes") if args.approach == "both" else (args.approach,)
    results = {name: _fit(args, name, m) for name in approaches}
    docs = {}
    for name, (model, report) in results.items():
        diag = report.to_dict()
        docs[name] = model_to_dict(model, diag, args.full_precision)
        docs[name]["diagnostics"]["node_residual_max"] = max(report.node_residuals)
        docs[name]["warnings"] = list(report.warnings)
        if args.output:
            path = args.output
            if len(approaches) > 1:
                path = path.with_name(f"{path.stem}_{name}{path.suffix}")
            export_model(model, path, diag, args.full_precision)
    out = {"models": docs}
    if len(approaches) == 2:
        out["discrepancy"] = _discrepancy(results["pade"][0], results["stieltjes"][0])
    if args.json:
        # wall time is left out so identical flags give identical bytes
        print(json.dumps(out, indent=2, sort_keys=True))
        return 0
    for name, (model, report) in results.items():
        print(f"{name}: material {m.label}, {args.grid} grid, M={args.M}, {args.digits} digits ({report.wall_time:.2f} s)")
        print(f"  alpha_inf = {float(model.alpha_inf):.10g}")
        print(f"  {'k':>3}  {'pole':>22}  {'residue':>22}")
        for k, (p, r) in enumerate(zip(model.poles_array, model.residues_array), 1):
            print(f"  {k:>3}  {p:>22.15e}  {r:>22.15e}")
        for key, val in report.cond_log10.items():
            print(f"  log10 cond({key}) = {val:.4f}")
        print(f"  max rel_err = {report.max_rel_err:.3e}, median = {report.median_rel_err:.3e}")
        for msg in report.warnings:
            print(f"  warning: {msg}")
    if "discrepancy" in out:
        d = out["discrepancy"]
        print(f"max relative discrepancy: poles {d['max_rel_pole']:.3e}, residues {d['max_rel_residue']:.3e}")
    return 0


def cmd_rel_err(args):
    omegas = dense_band(args.band, args.points)
    if args.model:
        model = import_model(args.model).model
        m = get_material(model.material_label, _registry(args))
    else:
        m = get_material(args.material, _registry(args))
        model, _ = _fit(args, args.approach, m)
    omegas, err = rel_err_profile(m, model, omegas)
    if args.json:
        k = int(np.argmax(err))
        print(json.dumps({"material": m.label, "max_rel_err": float(err[k]), "argmax_omega": float(omegas[k]),
                          "median_rel_err": float(np.median(err))}, indent=2, sort_keys=True))
        return 0
    _write_csv(zip(omegas, err), ["omega", "rel_err"], args.output)
    return 0


def _cond_job(job):
    m, M, scheme, band, digits = job
    return (m.label, M, scheme), table_conditions(m, M, scheme, band, digits)


def _run_jobs(jobs, n):
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as pool:
            return dict(pool.map(_cond_job, jobs))
    return dict(map(_cond_job, jobs))


def cmd_cond_report(args):
    registry = _registry(args)
    labels = args.material or sorted(BUILTIN)
    materials = [get_material(label, registry) for label in labels]
    Ms = args.M or [8, 14]
    grids = args.grid or list(SCHEMES)
    jobs = [(m, M, g, args.band, args.digits) for m in materials for M in Ms for g in grids]
    res = _run_jobs(jobs, args.jobs)
    if args.json:
        rows = [{"material": k[0], "M": k[1], "grid": k[2], "cond_log10": v} for k, v in res.items()]
        print(json.dumps(rows, indent=2, sort_keys=True))
        return 0
    print(f"{'material':>8} {'M':>3} {'grid':>6} " + " ".join(f"{name:>10}" for name in TABLE_MATRICES))
    for (label, M, g), v in res.items():
        print(f"{label:>8} {M:>3} {g:>6} " + " ".join(f"{v[name]:>10.4f}" for name in TABLE_MATRICES))
    return 0


def cmd_verify_kernel(args):
    m = get_material(args.material, _registry(args))
    model, _ = _fit(args, args.approach, m)
    q = ricker_signal(RickerSource(args.f0), args.dt, args.duration)
    rows = kernel_verification(model, m, q, args.every)
    scale = np.max(np.abs(rows[:, 2]))
    print(f"max abs_diff {rows[:, 3].max():.3e}, relative {rows[:, 3].max() / scale:.3e}", file=sys.stderr)
    _write_csv(rows, ["t", "theta_sum", "oracle", "abs_diff"], args.output)
    return 0


def cmd_spectrum(args):
    omegas = np.geomspace(args.band[0], args.band[1], args.points)
    F = ricker_spectrum(RickerSource(args.f0), omegas)
    _write_csv(zip(omegas, F.real, F.imag), ["omega", "re", "im"], args.output)
    return 0


def cmd_export_tables(args):
    args.outdir.mkdir(parents=True, exist_ok=True)
    materials = [BUILTIN[label] for label in sorted(BUILTIN)]
    jobs = [(m, M, g, args.band, args.digits) for m in materials for M, g in TABLE_COLUMNS]
    res = _run_jobs(jobs, args.jobs)
    header = ["matrix"] + [f"M{M}_{g}" for M, g in TABLE_COLUMNS]
    for number, m in enumerate(materials, 2):
        rows = [[name] + [round(res[(m.label, M, g)][name], 4) for M, g in TABLE_COLUMNS] for name in TABLE_MATRICES]
        path = args.outdir / f"table{number}_{m.label}.csv"
        _write_csv(rows, header, path)
        print(path)
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "rel-err": cmd_rel_err,
    "cond-report": cmd_cond_report,
    "verify-kernel": cmd_verify_kernel,
    "spectrum": cmd_spectrum,
    "export-tables": cmd_export_tables,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (JKDError, OSError, ValueError) as exc:
        print(f"jkdpoles {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
