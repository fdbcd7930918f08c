"""Command-line interface: ``texp <command> ...``.

Exit codes: 0 success, 2 invalid input, 3 non-convergence, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from fractions import Fraction

from mpmath import mp

from .catalog import Catalog
from .errors import ConfigurationError, ConvergenceError, DomainError, InadmissibleZError, SeedError
from .mpcx import MAX_PREC, MIN_PREC, format_mpf
from .normal_form import seed, sub_seeds
from .plog import Marker, SheetIndex, ZContext
from .render import LAYERS, PlotSpec, render_basin, render_contour
from .solver import (IterationConfig, RootId, RootRecord, basin_scan, solve_root,
                     solve_sweep, verify_root)
from .stacks import StackId
from .zspec import ZSpec

EXIT_OK, EXIT_INPUT, EXIT_NOCONV, EXIT_IO = 0, 2, 3, 4
CSV_COLUMNS = ["n", "m", "p", "re", "im", "iterations", "residualLog"]


class InputError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _zspec(args) -> ZSpec:
    try:
        return ZSpec.parse(args.z_r, args.z_theta_pi)
    except InadmissibleZError as exc:
        raise InputError(str(exc)) from exc
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"invalid z: {exc}") from exc


def _cfg(args) -> IterationConfig:
    return IterationConfig(args.prec, args.acc, args.max_iters, args.relaxation)


def _window(text: str) -> tuple[complex, float, float]:
    try:
        parts = [float(Fraction(p)) for p in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"invalid window {text!r}") from exc
    if len(parts) == 3:
        cx, cy, w = parts
        h = w
    elif len(parts) == 4:
        cx, cy, w, h = parts
    else:
        raise InputError("window is 'cx,cy,size' or 'cx,cy,width,height'")
    if w <= 0 or h <= 0:
        raise InputError("window must be nondegenerate")
    return complex(cx, cy), w, h


def _grid(text: str) -> tuple[int, int]:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError as exc:
        raise InputError(f"grid must look like 40x40, got {text!r}") from exc


def _stack(args, ctx: ZContext) -> StackId | None:
    if not getattr(args, "stack", None):
        return None
    try:
        return StackId.parse(args.stack, ctx.region)
    except ValueError as exc:
        raise InputError(f"invalid stack {args.stack!r}") from exc


# -- commands ---------------------------------------------------------------------------

def cmd_classify(args, out) -> int:
    z = _zspec(args)
    ctx = ZContext.create(z, 30)
    print(ctx.region.value, file=out)
    return EXIT_OK


def cmd_seed(args, out) -> int:
    z = _zspec(args)
    ctx = ZContext.create(z, args.prec)
    if args.sub_seeds:
        items = []
        for s in sub_seeds(ctx.region, ctx, args.prec):
            re, im = s.seed.to_strings()
            items.append({"p": s.p, "seed": {"re": re, "im": im}, "relaxation": s.relaxation,
                          "stack": s.stack.name})
        print(_dump({"z": z.to_dict(), "region": ctx.region.value, "subSeeds": items}), file=out)
        return EXIT_OK
    s = seed(SheetIndex(args.n, args.m), ctx, args.prec)
    re, im = s.to_strings()
    print(_dump({"z": z.to_dict(), "region": ctx.region.value, "n": args.n, "m": args.m,
                 "prec": args.prec, "seed": {"re": re, "im": im}}), file=out)
    return EXIT_OK


def cmd_root(args, out) -> int:
    z = _zspec(args)
    cfg = _cfg(args)
    ctx = ZContext.create(z, cfg.working_prec)
    try:
        rec = solve_root(RootId(args.n, args.m, args.p), ctx, cfg)
        code = EXIT_OK
    except ConvergenceError as exc:
        rec, code = exc.record, EXIT_NOCONV
        print(f"error: {exc}", file=sys.stderr)
    print(_dump(rec.to_dict()), file=out)
    if rec.converged and not args.no_store:
        Catalog(args.catalog).append(rec)
    return code


def cmd_sweep(args, out) -> int:
    z = _zspec(args)
    cfg = _cfg(args)
    ctx = ZContext.create(z, cfg.working_prec)
    recs = solve_sweep(args.m, args.n_from, args.n_to, ctx, cfg)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in recs:
            re, im = r.value.to_strings()
            w.writerow([r.id.n, r.id.m, "" if r.id.p is None else r.id.p, re, im,
                        r.iterations, r.residual_log_str()])
        out.write(buf.getvalue())
    else:
        for r in recs:
            print(_dump(r.to_dict()), file=out)
    if not args.no_store:
        cat = Catalog(args.catalog)
        for r in recs:
            if r.converged:
                cat.append(r)
    failed = [r for r in recs if not r.converged]
    for r in failed:
        print(f"error: root {r.id} did not converge ({', '.join(r.notes)})", file=sys.stderr)
    return EXIT_NOCONV if failed else EXIT_OK


def cmd_basin(args, out) -> int:
    z = _zspec(args)
    cfg = _cfg(args)
    ctx = ZContext.create(z, cfg.working_prec)
    center, w, h = _window(args.window)
    grid = _grid(args.grid)
    raster = basin_scan(center, (w, h), grid, RootId(args.n, args.m), ctx, cfg,
                        stack=_stack(args, ctx), precision=args.precision)
    render_basin(raster, args.out, ctx=ctx, overlay=args.overlay)
    summary = {
        "z": z.to_dict(), "region": ctx.region.value, "grid": list(grid),
        "attractors": [{"label": k, "re": f"{a.real:.10g}", "im": f"{a.imag:.10g}", "count": c}
                       for k, (a, c) in enumerate(zip(raster.attractors, raster.counts))],
        "divergent": raster.divergent, "out": str(args.out),
    }
    print(_dump(summary), file=out)
    return EXIT_OK


def cmd_contour(args, out) -> int:
    z = _zspec(args)
    ctx = ZContext.create(z, 30)
    center, w, h = _window(args.window)
    layers = frozenset(s.strip() for s in args.layers.split(",") if s.strip())
    spec = PlotSpec(center, w, h, _grid(args.resolution), layers, cycle=args.cycle)
    roots: list[RootRecord] = []
    if args.roots_from_catalog:
        roots = Catalog(args.catalog).records(z)
    render_contour(spec, ctx, roots, args.out)
    print(_dump({"z": z.to_dict(), "out": str(args.out), "layers": sorted(layers),
                 "roots": len(roots)}), file=out)
    return EXIT_OK


def cmd_verify(args, out) -> int:
    with open(args.record, encoding="utf-8") as fh:
        text = fh.read()
    try:
        docs = [json.loads(text)]
    except json.JSONDecodeError:
        try:
            docs = [json.loads(line) for line in text.splitlines() if line.strip()]
        except json.JSONDecodeError as exc:
            raise InputError(f"record file is not JSON: {exc}") from exc
    code = EXIT_OK
    for d in docs:
        try:
            rec = RootRecord.from_dict(d)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed record: {exc}") from exc
        res_log, res_exp = verify_root(rec)
        with mp.workdps(rec.prec):
            ok = res_log < mp.mpf(10) ** (-rec.target_accuracy)
        print(_dump({
            "id": {"n": rec.id.n, "m": rec.id.m, "p": rec.id.p},
            "residualLog": format_mpf(res_log, 6),
            "residualExp": str(res_exp) if isinstance(res_exp, Marker) else format_mpf(res_exp, 6),
            "targetAccuracy": rec.target_accuracy, "verified": bool(ok),
        }), file=out)
        if not ok:
            code = EXIT_NOCONV
    return code


# -- parser --------------------------------------------------------------------------------

def _prec(text: str) -> int:
    v = int(text)
    if not MIN_PREC <= v <= MAX_PREC:
        raise argparse.ArgumentTypeError(f"precision must be in [{MIN_PREC}, {MAX_PREC}]")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="texp", description="Fixed points of w = z^(z^w) on pLog sheets.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def zargs(p):
        p.add_argument("--z-r", required=True, help="modulus: rational (2, 1/2, 10^12) or exp(1/e), exp(-e)")
        p.add_argument("--z-theta-pi", default="0", help="Arg z in units of pi (rational)")

    def solver_args(p, prec=50):
        p.add_argument("--prec", type=_prec, default=prec)
        p.add_argument("--acc", type=int, default=None, help="target accuracy digits (default prec-10)")
        p.add_argument("--max-iters", type=int, default=50)
        p.add_argument("--relaxation", type=int, default=None)

    def store_args(p):
        p.add_argument("--no-store", action="store_true", help="do not append to the catalog")
        p.add_argument("--catalog", default=None, help="catalog path (default $TEXP_CATALOG)")

    p = sub.add_parser("classify", help="region tag of z")
    zargs(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("seed", help="bulb-head seed of branch m")
    zargs(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--prec", type=_prec, default=50)
    p.add_argument("--sub-seeds", action="store_true", help="list the p seeds of sheet {0,0}")
    p.set_defaults(func=cmd_seed)

    p = sub.add_parser("root", help="compute one root")
    zargs(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, default=None)
    solver_args(p)
    store_args(p)
    p.set_defaults(func=cmd_root)

    p = sub.add_parser("sweep", help="roots {n,m} for a range of n")
    zargs(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n-from", type=int, required=True)
    p.add_argument("--n-to", type=int, required=True)
    p.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    solver_args(p)
    store_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("basin", help="basin raster (PPM)")
    zargs(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--window", default="0,0,20", help="cx,cy,size or cx,cy,width,height")
    p.add_argument("--grid", default="40x40")
    p.add_argument("--stack", default=None, help="stack name, e.g. 1AN, 3AP or D")
    p.add_argument("--precision", choices=("mp", "double"), default="mp")
    p.add_argument("--overlay", action="store_true", help="draw contour crossings")
    p.add_argument("--out", required=True)
    solver_args(p, prec=30)
    p.set_defaults(func=cmd_basin)

    p = sub.add_parser("contour", help="contour diagram (SVG)")
    zargs(p)
    p.add_argument("--window", default="0,0,20")
    p.add_argument("--resolution", default="400x400")
    p.add_argument("--layers", default="realContours,imagContours",
                   help="comma list from: " + ",".join(sorted(LAYERS)))
    p.add_argument("--cycle", type=int, choices=(1, 2), default=2)
    p.add_argument("--roots-from-catalog", action="store_true")
    p.add_argument("--catalog", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("verify", help="recompute residuals of stored records")
    p.add_argument("--record", required=True, help="JSON record or JSON-lines file")
    p.set_defaults(func=cmd_verify)
    return ap


_NEGATIVE_VALUE = re.compile(r"-[0-9.]")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Attach values such as "-1/4" or "-2,0,5" to their option with '='.

    argparse only accepts plain negative numbers as option values.
    """
    out: list[str] = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) \
                and _NEGATIVE_VALUE.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(_glue_negative_values(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args, out)
    except (InputError, ConfigurationError, DomainError, InadmissibleZError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except SeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
