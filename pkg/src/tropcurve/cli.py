"""Command line front end.

Exit codes: 0 success, 1 semantic failure (a check did not hold), 2 malformed
input (bad syntax, broken reference, missing file).

    tropcurve validate FILE...
    tropcurve div FILE CURVE FUNC
    tropcurve construct FILE SYSTEM --out DIR [--certificate PATH] [--quiet]
    tropcurve verify BUNDLE [--certificate PATH] [--quiet]
    tropcurve from-witness BUNDLE [POINT] [--out FILE] [--quiet]
    tropcurve roundtrip PATH [SYSTEM] [--quiet]

A bundle is a directory holding witness.trop (curves gamma, gtilde, target
plus maps pi: gtilde -> gamma and phi: gtilde -> target) and certificate.txt.
"""

from __future__ import annotations

import argparse
import os

from .curves import canonical_base_point
from .divisors import Divisor
from .errors import ParseError, TropError
from .formats import (
    Workspace,
    addr,
    format_workspace,
    load_file,
    parse_point,
    write_file,
)
from .functions import principal_divisor
from .gonality import (
    construct_witness,
    same_system,
    system_from_maps,
    system_from_witness,
    trees_isometric,
)
from .morphisms import global_degree, harmonic_failures, validate_morphism

BUNDLE_FILE = "witness.trop"
CERT_FILE = "certificate.txt"


def _load(path: str) -> Workspace:
    ws = Workspace()
    load_file(ws, path)
    return ws


def _say(args, msg: str) -> None:
    if not args.quiet:
        print(msg)


# -- validate ----------------------------------------------------------------


def cmd_validate(args) -> int:
    ws = Workspace()
    for path in args.files:
        load_file(ws, path)
    _say(
        args,
        f"ok: {len(ws.curves)} curves, {len(ws.points)} points, "
        f"{len(ws.funcs)} funcs, {len(ws.divisors)} divisors, "
        f"{len(ws.systems)} systems, {len(ws.maps)} maps",
    )
    return 0


# -- div ---------------------------------------------------------------------


def cmd_div(args) -> int:
    ws = _load(args.file)
    if args.func not in ws.funcs:
        raise ParseError(f"unknown func {args.func!r}")
    cid, f = ws.funcs[args.func]
    if cid != args.curve:
        raise ParseError(f"func {args.func!r} lives on curve {cid!r}, not {args.curve!r}")
    d = principal_divisor(f)
    if d.is_zero():
        print("0")
    else:
        print(", ".join(f"{k:+d} @ {addr(p)}" for p, k in d.items()))
    return 0


# -- bundles -----------------------------------------------------------------


def _write_bundle(outdir: str, wb) -> None:
    os.makedirs(outdir, exist_ok=True)
    bw = Workspace()
    bw.add_curve("gamma", wb.mod.original)
    bw.add_curve("gtilde", wb.curve)
    bw.add_curve("target", wb.target)
    bw.add_map("pi", "gtilde", "gamma", wb.retraction)
    bw.add_map("phi", "gtilde", "target", wb.phi)
    write_file(bw, os.path.join(outdir, BUNDLE_FILE))


def _read_bundle(bundle: str):
    path = os.path.join(bundle, BUNDLE_FILE)
    if not os.path.exists(path):
        raise ParseError(f"no {BUNDLE_FILE} in {bundle!r}")
    ws = _load(path)
    for name in ("gamma", "gtilde", "target"):
        if name not in ws.curves:
            raise ParseError(f"bundle is missing curve {name!r}")
    for name in ("pi", "phi"):
        if name not in ws.maps:
            raise ParseError(f"bundle is missing map {name!r}")
    gamma = ws.curves["gamma"]
    gtilde = ws.curves["gtilde"]
    target = ws.curves["target"]
    psrc, pdst, pi = ws.maps["pi"]
    fsrc, fdst, phi = ws.maps["phi"]
    if (psrc, pdst) != ("gtilde", "gamma"):
        raise ParseError("map pi must go gtilde -> gamma")
    if (fsrc, fdst) != ("gtilde", "target"):
        raise ParseError("map phi must go gtilde -> target")
    return gamma, gtilde, target, pi, phi


def _write_cert(args, outdir: str | None, lines: list[str]) -> None:
    text = "\n".join(lines) + "\n"
    if outdir is not None:
        with open(os.path.join(outdir, CERT_FILE), "w", encoding="utf-8") as fh:
            fh.write(text)
    if getattr(args, "certificate", None):
        with open(args.certificate, "w", encoding="utf-8") as fh:
            fh.write(text)


# -- construct ---------------------------------------------------------------


def cmd_construct(args) -> int:
    ws = _load(args.file)
    if args.system not in ws.systems:
        raise ParseError(f"unknown system {args.system!r}")
    _cid, system, _base, _gens = ws.systems[args.system]
    wb = construct_witness(system)

    _write_bundle(args.out, wb)
    lines = [
        "certificate construct",
        f"degree {wb.degree}",
        f"generators {len(wb.cert.system.gens)}",
        f"algdim {wb.cert.algdim}",
        f"geomdim {wb.cert.geomdim}",
        f"b1 {wb.curve.b1}",
    ]
    for p, mult in wb.indeterminacy:
        lines.append(f"indeterminacy {addr(p)} {mult}")
    grafts = sum(1 for pg in wb.plan if pg.tree is not None)
    lines.append(f"grafts {grafts}")
    for key in ("finite_morphism", "harmonic", "degree", "b1_preserved"):
        name = key.replace("_", "-")
        lines.append(f"check {name} ok")
    lines.append("check indeterminacy-degrees ok")
    _write_cert(args, args.out, lines)

    _say(args, f"degree {wb.degree}")
    tgt = wb.target
    _say(args, f"target tree: {len(tgt.vertices)} nodes, {len(tgt.edges)} edges")
    if wb.indeterminacy:
        for p, mult in wb.indeterminacy:
            _say(args, f"indeterminacy {addr(p)} multiplicity {mult}")
    else:
        _say(args, "indeterminacy: none")
    _say(args, f"grafts: {grafts}")
    _say(args, f"bundle written to {args.out}")
    return 0


# -- verify ------------------------------------------------------------------


def cmd_verify(args) -> int:
    gamma, gtilde, target, pi, phi = _read_bundle(args.bundle)
    lines = ["certificate verify"]
    checks: list[str] = []

    def fail(msg: str) -> int:
        lines.extend(checks)
        lines.append(f"check failed: {msg}")
        _write_cert(args, None, lines)
        print(f"verify failed: {msg}")
        return 1

    rep = validate_morphism(phi)
    if not rep.ok:
        return fail(f"phi is not a morphism: {rep.problems[0]}")
    checks.append("check morphism ok")
    if not rep.is_finite:
        return fail("phi is not finite")
    checks.append("check finite ok")
    bad = harmonic_failures(phi)
    if bad:
        return fail(f"phi not harmonic at {bad[0].point}: sums {bad[0].sums}")
    checks.append("check harmonic ok")
    d = global_degree(phi)
    checks.append("check degree-consistent ok")
    if target.b1 != 0:
        return fail("target is not a tree")
    checks.append("check target-tree ok")
    if gtilde.b1 != gamma.b1:
        return fail("modification changed the first Betti number")
    checks.append("check b1-preserved ok")
    prep = validate_morphism(pi)
    if not prep.ok:
        return fail(f"pi is not a morphism: {prep.problems[0]}")
    if any(em.slope > 1 for em in pi.edge_maps.values()):
        return fail("retraction stretches an edge")
    if harmonic_failures(pi):
        return fail("retraction is not harmonic")
    if global_degree(pi) != 1:
        return fail("retraction degree is not 1")
    checks.append("check retraction ok")

    lines.insert(1, f"degree {d}")
    lines.extend(checks)
    _write_cert(args, None, lines)
    for c in checks:
        _say(args, c)
    _say(args, f"verified: degree {d}")
    return 0


# -- from-witness ------------------------------------------------------------


def cmd_from_witness(args) -> int:
    gamma, _gtilde, target, pi, phi = _read_bundle(args.bundle)
    if args.point:
        div = Divisor.point(parse_point(target, args.point))
    else:
        div = Divisor.point(canonical_base_point(target))
    system = system_from_maps(gamma, pi, phi, target, div)

    out_ws = Workspace()
    out_ws.add_curve("gamma", gamma)
    out_ws.add_divisor("base", "gamma", system.base)
    fids = []
    for i, g in enumerate(system.gens):
        fid = f"f{i}"
        out_ws.add_func(fid, "gamma", g)
        fids.append(fid)
    out_ws.add_system("sys", "gamma", system, "base", fids)
    text = format_workspace(out_ws)

    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        _say(args, f"degree {system.degree}, {len(system.gens)} generators")
        _say(args, f"system written to {args.out}")
    else:
        print(text, end="")
    return 0


# -- roundtrip ---------------------------------------------------------------


def _roundtrip_bundle(args) -> int:
    gamma, _gtilde, target, pi, phi = _read_bundle(args.path)
    div = Divisor.point(canonical_base_point(target))
    system = system_from_maps(gamma, pi, phi, target, div)
    wb = construct_witness(system)

    deg_in = global_degree(phi)
    deg_ok = deg_in == wb.degree
    iso = trees_isometric(target, wb.target)
    recovered = system_from_witness(
        wb.mod, wb.phi, wb.target, Divisor.point(canonical_base_point(wb.target))
    )
    eq = same_system(wb.cert.image.cells.refined, recovered)

    if eq.ok:
        _say(args, "systems equivalent")
    else:
        _say(args, f"systems differ: {eq.reason}")
    _say(args, "targets isometric" if iso else "targets not isometric")
    _say(args, f"degree {wb.degree}" if deg_ok else f"degrees differ: {deg_in} vs {wb.degree}")
    return 0 if (eq.ok and iso and deg_ok) else 1


def _roundtrip_system_file(args) -> int:
    if not args.system:
        raise ParseError("roundtrip on a file needs a system id")
    ws = _load(args.path)
    if args.system not in ws.systems:
        raise ParseError(f"unknown system {args.system!r}")
    _cid, system, _b, _g = ws.systems[args.system]
    wb = construct_witness(system)
    recovered = system_from_witness(
        wb.mod, wb.phi, wb.target, Divisor.point(canonical_base_point(wb.target))
    )
    eq = same_system(wb.cert.image.cells.refined, recovered)
    if eq.ok:
        _say(args, "systems equivalent")
        _say(args, f"degree {wb.degree}")
        return 0
    _say(args, f"systems differ: {eq.reason}")
    return 1


def cmd_roundtrip(args) -> int:
    if os.path.isdir(args.path):
        return _roundtrip_bundle(args)
    return _roundtrip_system_file(args)


# -- entry -------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tropcurve", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--quiet", action="store_true", help="suppress reports")

    p = sub.add_parser("validate", help="parse files and report their contents")
    p.add_argument("files", nargs="+")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("div", help="print the divisor of a rational function")
    p.add_argument("file")
    p.add_argument("curve")
    p.add_argument("func")
    common(p)
    p.set_defaults(fn=cmd_div)

    p = sub.add_parser("construct", help="build a witness bundle from a system")
    p.add_argument("file")
    p.add_argument("system")
    p.add_argument("--out", required=True, help="bundle directory")
    p.add_argument("--certificate", help="also write the certificate here")
    common(p)
    p.set_defaults(fn=cmd_construct)

    p = sub.add_parser("verify", help="re-check a witness bundle from scratch")
    p.add_argument("bundle")
    p.add_argument("--certificate", help="write the certificate here")
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("from-witness", help="recover the linear system of a bundle")
    p.add_argument("bundle")
    p.add_argument("point", nargs="?", help="tree point <edge>@<off>, default canonical")
    p.add_argument("--out", help="write the system file here instead of stdout")
    common(p)
    p.set_defaults(fn=cmd_from_witness)

    p = sub.add_parser("roundtrip", help="run a round trip and compare the ends")
    p.add_argument("path", help="system file or bundle directory")
    p.add_argument("system", nargs="?", help="system id when path is a file")
    common(p)
    p.set_defaults(fn=cmd_roundtrip)

    return ap


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    try:
        return args.fn(args)
    except ParseError as e:
        print(f"error: {e}")
        return 2
    except TropError as e:
        print(f"error: {e}")
        return 1
    except OSError as e:
        print(f"error: {e}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
