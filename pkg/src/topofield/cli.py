"""Command-line front end.

Commands: build, diagnose, trace, relax, report.  Configuration comes
from an optional JSON document plus flag overrides; unknown config keys
are rejected.  Exit codes: 0 success, 1 invariant-gate failure, 2
usage/config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import beltrami, em, fieldlines, functionals, io as fio
from .beltrami import BeltramiError
from .em import FieldError
from .functionals import FunctionalError
from .grids import GridError, GridSpec3, VectorField3

EXIT_OK = 0
EXIT_GATE = 1
EXIT_USAGE = 2
EXIT_IO = 3

KINDS = ("hopfion", "dyon", "beltrami", "torus", "from-file")

CONFIG_KEYS = {
    "kind", "grid", "box", "scale", "mirror", "k", "sign", "amplitude",
    "p", "q", "seeds", "tolerances", "out", "format", "input",
    "trace_length", "relax_tol", "relax_max_iters",
}

DEFAULT_TOLS = {
    "null": 1e-10,
    "div": 1e-1,
    "arnold": 0.0,
}


class UsageError(ValueError):
    pass


def load_config(args) -> dict:
    cfg = {}
    if args.config:
        if not os.path.exists(args.config):
            raise fio.IOError3(f"config not found: {args.config}")
        with open(args.config) as fh:
            try:
                cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise UsageError(f"config is not valid JSON: {exc}")
        unknown = set(cfg) - CONFIG_KEYS
        if unknown:
            raise UsageError(
                f"unknown config keys: {sorted(unknown)}; "
                f"valid keys: {sorted(CONFIG_KEYS)}")
    # flag overrides
    if args.grid:
        try:
            cfg["grid"] = [int(t) for t in args.grid.split(",")]
        except ValueError:
            raise UsageError(f"--grid wants NX,NY,NZ, got {args.grid!r}")
    if args.box:
        try:
            cfg["box"] = [float(t) for t in args.box.split(",")]
        except ValueError:
            raise UsageError(f"--box wants LX,LY,LZ, got {args.box!r}")
    if args.seed:
        seeds = []
        for s in args.seed:
            try:
                seeds.append([float(t) for t in s.split(",")])
            except ValueError:
                raise UsageError(f"--seed wants x,y,z, got {s!r}")
        cfg["seeds"] = seeds
    if args.tol:
        tols = dict(cfg.get("tolerances", {}))
        for t in args.tol:
            if "=" not in t:
                raise UsageError(f"--tol wants NAME=VALUE, got {t!r}")
            name, val = t.split("=", 1)
            try:
                v = float(val)
            except ValueError:
                raise UsageError(f"tolerance {name!r} is not a number: {val!r}")
            if v <= 0:
                raise UsageError(f"tolerance {name!r} must be positive")
            tols[name] = v
        cfg["tolerances"] = tols
    if args.out:
        cfg["out"] = args.out
    if args.format:
        cfg["format"] = args.format
    if getattr(args, "kind", None):
        cfg["kind"] = args.kind
    if getattr(args, "input", None):
        cfg["input"] = args.input
    return cfg


def make_grid(cfg) -> GridSpec3:
    n = cfg.get("grid", [48, 48, 48])
    box = cfg.get("box", [16.0, 16.0, 16.0])
    if len(n) != 3 or len(box) != 3:
        raise UsageError("grid and box each need three entries")
    origin = tuple(-b / 2.0 for b in box)
    return GridSpec3(n[0], n[1], n[2], box[0], box[1], box[2], origin)


def build_field(cfg):
    kind = cfg.get("kind")
    if kind is None:
        raise UsageError(f"no field kind given; valid kinds: {KINDS}")
    grid = make_grid(cfg)
    if kind == "hopfion":
        return em.build_hopfion(grid, scale=float(cfg.get("scale", 1.0)),
                                mirror=bool(cfg.get("mirror", False)))
    if kind == "dyon":
        dp = em.build_dyon_pair(em.hopf_map, em.hopf_map_dual, grid)
        from .forms4 import Signature
        from .em import EMField
        return EMField(grid, dp.e_theta, dp.b_theta, Signature.MINKOWSKI,
                       kind="dyon")
    if kind == "beltrami":
        k = tuple(cfg.get("k", (0, 0, 1)))
        v = beltrami.build_beltrami_mode(k, int(cfg.get("sign", 1)),
                                         float(cfg.get("amplitude", 1.0)),
                                         grid)
        from .forms4 import Signature
        from .em import EMField
        zero = VectorField3.zeros(grid)
        return EMField(grid, zero, v, Signature.MINKOWSKI, kind="beltrami")
    if kind == "torus":
        p, q = int(cfg.get("p", 2)), int(cfg.get("q", 3))
        clo = fieldlines.build_invariant_torus_field(p, q)
        v = VectorField3.from_closure(grid, clo)
        from .forms4 import Signature
        from .em import EMField
        zero = VectorField3.zeros(grid)
        return EMField(grid, zero, v, Signature.MINKOWSKI, kind="torus")
    if kind == "from-file":
        path = cfg.get("input")
        if not path:
            raise UsageError("kind from-file needs an input path")
        grid, e, b, header = fio.read_field(path)
        from .forms4 import Signature
        from .em import EMField
        return EMField(grid, e, b, Signature.MINKOWSKI,
                       kind=header.get("kind", "from-file"))
    raise UsageError(f"unknown field kind {kind!r}; valid kinds: {KINDS}")


def outdir(cfg) -> str:
    return cfg.get("out", ".")


def cmd_build(cfg) -> int:
    f = build_field(cfg)
    path = os.path.join(outdir(cfg), f"{f.kind}.field")
    from . import __version__

    header = {"kind": f.kind, "scale": f.scale, "version": __version__}
    fio.write_field(path, f.grid, f.E, f.B, header)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_diagnose(cfg) -> int:
    f = build_field(cfg)
    tols = {**DEFAULT_TOLS, **cfg.get("tolerances", {})}
    rep = functionals.field_diagnostics(f)
    path = os.path.join(outdir(cfg), "diagnostics.report")
    fio.write_report(path, dict(rep.items()))
    failures = []
    if rep["null_degenerate"] < 1.0 and (
            rep["null_dot"] > tols["null"] or rep["null_norm"] > tols["null"]):
        failures.append(
            f"null residuals ({rep['null_dot']:.3g}, {rep['null_norm']:.3g})"
            f" exceed {tols['null']:.3g}")
    if rep["div_b"] > tols["div"]:
        failures.append(f"div B residual {rep['div_b']:.3g} exceeds "
                        f"{tols['div']:.3g}")
    if rep["arnold_ok"] < 1.0:
        failures.append("energy-helicity inequality violated")
    print(f"wrote {path}")
    for msg in failures:
        print(f"gate failure: {msg}", file=sys.stderr)
    return EXIT_GATE if failures else EXIT_OK


def cmd_trace(cfg) -> int:
    f = build_field(cfg)
    seeds = cfg.get("seeds")
    if not seeds:
        raise UsageError("trace needs at least one --seed x,y,z")
    length = float(cfg.get("trace_length", 8.0 * max(f.grid.lengths)))
    lines = []
    per_seed = []
    for i, s in enumerate(seeds):
        try:
            ln = fieldlines.trace_closed_line(f.B, s, length)
            lines.append(ln)
            per_seed.append({"seed": s, "closed": ln.closed,
                             "closure_error": ln.closure_error})
            fio.write_line_csv(os.path.join(outdir(cfg), f"line-{i}.csv"),
                               ln.arclength, ln.points)
        except fieldlines.TraceError as exc:
            lines.append(None)
            per_seed.append({"seed": s, "error": str(exc)})
    traced = [ln for ln in lines if ln is not None]
    nmat = len(lines)
    link = [[0.0] * nmat for _ in range(nmat)]
    for i in range(nmat):
        for j in range(i + 1, nmat):
            if lines[i] is None or lines[j] is None:
                continue
            ci = fieldlines._resample_closed(lines[i].points, 400)
            cj = fieldlines._resample_closed(lines[j].points, 400)
            lk = fieldlines.linking_number(ci, cj)
            link[i][j] = link[j][i] = round(lk, 6)
    record = {"lines": per_seed, "linking": link}
    if f.kind == "torus":
        p, q = int(cfg.get("p", 2)), int(cfg.get("q", 3))
        rec = fieldlines.torus_knot_classify(p, q)
        record["knot"] = {"p": rec.p, "q": rec.q, "closed": rec.closed,
                          "is_unknot": rec.is_unknot,
                          "type": f"({rec.p},{rec.q})"}
    path = os.path.join(outdir(cfg), "trace.json")
    fio.write_json(path, record)
    print(f"wrote {path}")
    return EXIT_OK if traced else EXIT_GATE


def cmd_relax(cfg) -> int:
    f = build_field(cfg)
    tol = float(cfg.get("relax_tol", 1e-9))
    max_iters = int(cfg.get("relax_max_iters", 5000))
    try:
        vf, trace = beltrami.relax_to_minimizer(f.B, tol=tol,
                                                max_iters=max_iters)
    except BeltramiError as exc:
        print(f"relaxation rejected: {exc}", file=sys.stderr)
        return EXIT_GATE
    fio.write_trace_csv(os.path.join(outdir(cfg), "relax-trace.csv"), trace)
    energy = functionals.magnetic_energy(vf)
    hel = functionals.helicity_ab(vf, div_tol=1e-6)
    lam1 = beltrami.lambda_1(f.grid)
    summary = {
        "energy": energy,
        "helicity": hel,
        "lambda_1": lam1,
        "ratio_error": abs(energy / abs(hel) / lam1 - 1.0) if hel != 0 else
        float("inf"),
        "iterations": len(trace),
    }
    fio.write_report(os.path.join(outdir(cfg), "relax.report"), summary)
    from . import __version__

    fio.write_field(os.path.join(outdir(cfg), "relaxed.field"), f.grid,
                    VectorField3.zeros(f.grid), vf,
                    {"kind": "relaxed", "version": __version__})
    print(f"relaxed in {len(trace)} iterations; E/(lambda_1 |H|) - 1 = "
          f"{summary['ratio_error']:.3g}")
    return EXIT_OK


def cmd_report(cfg) -> int:
    """Aggregate whatever artifacts exist in the output directory into a
    single JSON summary."""
    d = outdir(cfg)
    summary = {}
    rp = os.path.join(d, "diagnostics.report")
    if os.path.exists(rp):
        summary["diagnostics"] = fio.read_report(rp)
    rp = os.path.join(d, "relax.report")
    if os.path.exists(rp):
        summary["relaxation"] = fio.read_report(rp)
    tp = os.path.join(d, "trace.json")
    if os.path.exists(tp):
        with open(tp) as fh:
            summary["trace"] = json.load(fh)
    if not summary:
        raise fio.IOError3(f"nothing to report in {d}")
    path = os.path.join(d, "summary.json")
    fio.write_json(path, summary)
    print(f"wrote {path}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="topofield",
        description="Build topological fields, run invariant diagnostics, "
                    "trace field lines, relax to curl eigenfields.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (("build", cmd_build), ("diagnose", cmd_diagnose),
                     ("trace", cmd_trace), ("relax", cmd_relax),
                     ("report", cmd_report)):
        p = sub.add_parser(name)
        p.set_defaults(func=fn)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--grid", help="NX,NY,NZ")
        p.add_argument("--box", help="LX,LY,LZ")
        p.add_argument("--seed", action="append",
                       help="seed point x,y,z (repeatable)")
        p.add_argument("--tol", action="append",
                       help="tolerance NAME=VALUE (repeatable)")
        p.add_argument("--format", choices=("csv", "json", "grid"))
        if name in ("build", "diagnose", "trace", "relax"):
            p.add_argument("--kind", choices=KINDS)
            p.add_argument("--input", help="field file for kind=from-file")
    return ap


def main(argv=None) -> int:
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load_config(args)
        return args.func(cfg)
    except (UsageError, GridError, BeltramiError, FieldError,
            FunctionalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (fio.IOError3, OSError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
