"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed (the report is still written),
2 usage or input error.
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction

from . import __version__
from .embedding import CapacityError
from .exports import ExportError, polytope_svg, surfaces_obj, trace_document
from .obstructions import max_equal_radius_sq
from .report import (EXAMPLES, SCHEMA, PackingFileError, build_packing, construction_failure, dumps,
                     env_seed, load_packing, packing_document, run_verification, write_json)
from .surfaces import (assemble_surfaces, build_circle_graph, detect_shared_arcs, dream_certificate,
                       fully_shared_circles, reduce_graph, two_ball_sphere)

EXPORTS = ("polytope.svg", "surface.obj", "trace.json")


class UsageError(Exception):
    pass


def _timestamp() -> str:
    return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _load(path: str):
    try:
        return load_packing(path)
    except PackingFileError as exc:
        raise UsageError(str(exc)) from exc


def cmd_construct(args) -> int:
    if args.example != "karshon2" and args.r1 is not None:
        raise UsageError("--r1 applies to karshon2 only")
    seed = env_seed(args.seed)
    try:
        r1 = None if args.r1 is None else _number(args.r1)
        p = build_packing(args.example, r1)
    except (ValueError, CapacityError) as exc:
        raise UsageError(str(exc)) from exc
    doc = packing_document(p, args.example, seed, args.r1 if args.example == "karshon2" else None)
    _emit(dumps(doc), args.out)
    print(f"{p.label}: {len(p)} balls, radii {', '.join(f'{r:.6g}' for r in p.radii)}", file=sys.stderr)
    return 0


def _number(text: str):
    """Exact rationals stay exact; anything else is a float."""
    try:
        return Fraction(text) if "/" in text else float(text)
    except ValueError as exc:
        raise UsageError(f"not a number: {text!r}") from exc


def _tolerances(pairs: list[str]) -> dict:
    out = {}
    for item in pairs or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects name=value, got {item!r}")
        try:
            out[key] = float(val)
        except ValueError as exc:
            raise UsageError(f"bad tolerance value {val!r}") from exc
    return out


def cmd_verify(args) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    if args.mc_samples < 1000:
        raise UsageError("--mc-samples must be at least 1000")
    seed = env_seed(args.seed)
    try:
        p, doc = load_packing(args.packing)
    except PackingFileError as exc:
        raise UsageError(str(exc)) from exc
    except (CapacityError, ValueError) as exc:
        report = construction_failure(args.packing, exc, seed)
    else:
        try:
            report = run_verification(p, args.samples, args.mc_samples, seed, _tolerances(args.tol))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    for c in report.checks:
        val = "-" if c.value is None else f"{c.value:.3e}"
        tol = "" if c.tolerance is None else f" (tol {c.tolerance:.1e})"
        print(f"{c.status.upper():7s} {c.name:22s} {val}{tol} {c.detail}", file=sys.stderr)
    _emit(report.dumps(), args.report)
    return 0 if report.passed else 1


def surfaces_document(p, resolution: int) -> tuple[dict, list]:
    arcs = detect_shared_arcs(p, resolution=resolution)
    spheres = [two_ball_sphere(p, i, j, c, arcs) for i, j, c in fully_shared_circles(arcs)]
    g = build_circle_graph(arcs, p)
    reduced, log = reduce_graph(g)
    surfs = assemble_surfaces(reduced, p)
    doc = {
        "schema": SCHEMA,
        "kind": "surfaces",
        "version": __version__,
        "label": p.label,
        "resolution": resolution,
        "arcs": [{"pair": list(a.pair), "samples": len(a.indices), "full": a.full,
                  "tangent": a.tangent, "quality": a.quality} for a in arcs],
        "two_ball_spheres": [dict(s.to_dict(), image_area=s.image_area(p)) for s in spheres],
        "graph": g.to_dict(),
        "erasure_log": log,
        "reduced_graph": reduced.to_dict(),
        "surfaces": [dict(s.to_dict(), image_area=s.image_area(p)) for s in surfs],
        "volatile": {"timestamp": _timestamp()},
    }
    return doc, spheres + surfs


def cmd_surfaces(args) -> int:
    if args.resolution < 360:
        raise UsageError("--resolution must be at least 360")
    p, _ = _load(args.packing)
    doc, surfs = surfaces_document(p, args.resolution)
    _emit(dumps(doc), args.out)
    if args.obj:
        _emit(surfaces_obj(p, surfs), args.obj)
    print(f"{p.label}: {len(doc['two_ball_spheres'])} two-ball sphere(s), "
          f"{len(doc['surfaces'])} supporting surface(s)", file=sys.stderr)
    return 0


def cmd_certify(args) -> int:
    if args.from_table == (args.r2 is not None):
        raise UsageError("give exactly one of --r2 and --from-table")
    if args.from_table:
        try:
            r2 = max_equal_radius_sq(args.balls)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if not isinstance(r2, Fraction):
            raise UsageError(f"r^2 for {args.balls} balls is irrational; give --r2")
    else:
        r2 = _number(args.r2)
    try:
        cert = dream_certificate(args.balls, r2, args.dmax)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = {"schema": SCHEMA, "kind": "certificate", "version": __version__, **cert.to_dict(),
           "minimal": [{"degree": m.degree, "area_over_pi": m.degree, "k": str(m.k),
                        "multiset": list(m.multiset), "discs": m.discs, "delta": m.delta}
                       for m in cert.minimal]}
    _emit(dumps(doc), args.out)
    return 0


def cmd_export(args) -> int:
    p, _ = _load(args.packing)
    try:
        if args.what == "polytope.svg":
            text = polytope_svg(p)
        elif args.what == "surface.obj":
            _, surfs = surfaces_document(p, args.resolution)
            text = surfaces_obj(p, surfs)
        else:
            doc = trace_document(p, args.ball, args.step)
            text = dumps({"schema": SCHEMA, "kind": "trace", "version": __version__, **doc})
    except ExportError as exc:
        raise UsageError(str(exc)) from exc
    _emit(text, args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sympack", description="Explicit ball packings of CP^2: build, verify, export.")
    ap.add_argument("--version", action="version", version=f"sympack {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("construct", help="write a packing description file")
    c.add_argument("--example", required=True, choices=EXAMPLES)
    c.add_argument("--r1", help="first radius for karshon2 (float or p/q)")
    c.add_argument("--seed", type=int)
    c.add_argument("--out", help="output path (default stdout)")
    c.set_defaults(func=cmd_construct)

    v = sub.add_parser("verify", help="run the verification suites on a packing file")
    v.add_argument("packing")
    v.add_argument("--samples", type=int, default=10_000)
    v.add_argument("--mc-samples", type=int, default=100_000)
    v.add_argument("--tol", action="append", metavar="NAME=VALUE")
    v.add_argument("--seed", type=int)
    v.add_argument("--report", help="report path (default stdout)")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("surfaces", help="shared circles, circle graph and supporting surfaces")
    s.add_argument("packing")
    s.add_argument("--resolution", type=int, default=360)
    s.add_argument("--out")
    s.add_argument("--obj", help="also write the surfaces as an OBJ mesh")
    s.set_defaults(func=cmd_surfaces)

    k = sub.add_parser("certify", help="degree/multiplicity certificate for equal balls")
    k.add_argument("--balls", type=int, required=True)
    k.add_argument("--r2", help="squared radius as p/q or decimal")
    k.add_argument("--from-table", action="store_true")
    k.add_argument("--dmax", type=int, default=10)
    k.add_argument("--out")
    k.set_defaults(func=cmd_certify)

    e = sub.add_parser("export", help="geometry exports")
    e.add_argument("what", choices=EXPORTS)
    e.add_argument("--packing", required=True)
    e.add_argument("--out")
    e.add_argument("--ball", type=int, default=0)
    e.add_argument("--step", type=float, default=1e-2)
    e.add_argument("--resolution", type=int, default=360)
    e.set_defaults(func=cmd_export)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"sympack: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
