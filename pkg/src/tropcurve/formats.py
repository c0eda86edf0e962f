"""Line-oriented exact text format for curves and the objects on them.

Every value is a reduced rational "p/q" (q > 0) or "inf"/"-inf", so files
round-trip byte-identically through parse + print.  Records are scoped by the
most recent `curve <id>` header; `map` blocks follow with their own `edge`
assignment lines.  Blank lines and full-line # comments are skipped.

    curve <id>
    vertex <id>
    edge <id> <from> <to> <len>
    point <id> <edge>@<off>
    func <id>
    on <edge> start <val> pieces (<slope>:<len>)+
    div <id> (<coef>*<edge>@<off>)*
    system <id> base <div> gens <func>+
    map <id> <src-curve> -> <tgt-curve>
    edge <src>-><tgt>@<off> slope <k>

The map-line slope <k> is signed: its sign is the direction of travel along
the target edge and its absolute value the stretch factor.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .curves import Curve, Edge, Point
from .divisors import Divisor
from .errors import ParseError, TropError
from .functions import EdgeFunc, PLFunction
from .morphisms import EdgeMap, Morphism
from .ratext import fmt_ext, parse_ext
from .systems import GenSystem


def addr(p: Point) -> str:
    return f"{p.edge}@{fmt_ext(p.offset)}"


def parse_point(c: Curve, tok: str) -> Point:
    """Resolve an <edge>@<off> token on a curve."""
    eid, off = _parse_addr(tok, "point")
    return c.pt(eid, off)


def _parse_addr(tok: str, where: str) -> tuple[str, object]:
    if "@" not in tok:
        raise ParseError(f"{where}: expected <edge>@<offset>, got {tok!r}")
    eid, off = tok.rsplit("@", 1)
    try:
        return eid, parse_ext(off)
    except (ValueError, TropError):
        raise ParseError(f"{where}: bad offset {off!r}") from None


@dataclass
class Workspace:
    """Named curves plus the points, functions, divisors, systems and maps
    that live on them."""

    curves: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    funcs: dict = field(default_factory=dict)
    divisors: dict = field(default_factory=dict)
    systems: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)

    def _fresh(self, kind: str, store: dict, name: str):
        if name in store:
            raise TropError(f"duplicate {kind} {name!r}")

    def add_curve(self, cid: str, c: Curve):
        self._fresh("curve", self.curves, cid)
        self.curves[cid] = c

    def add_point(self, pid: str, cid: str, p: Point):
        self._fresh("point", self.points, pid)
        self.points[pid] = (cid, p)

    def add_func(self, fid: str, cid: str, f: PLFunction):
        self._fresh("func", self.funcs, fid)
        self.funcs[fid] = (cid, f)

    def add_divisor(self, did: str, cid: str, d: Divisor):
        self._fresh("div", self.divisors, did)
        self.divisors[did] = (cid, d)

    def add_system(self, sid: str, cid: str, s: GenSystem, base_id: str, gen_ids):
        self._fresh("system", self.systems, sid)
        self.systems[sid] = (cid, s, base_id, tuple(gen_ids))

    def add_map(self, mid: str, src_id: str, dst_id: str, m: Morphism):
        self._fresh("map", self.maps, mid)
        self.maps[mid] = (src_id, dst_id, m)

    def curve_of(self, cid: str) -> Curve:
        if cid not in self.curves:
            raise ParseError(f"unknown curve {cid!r}")
        return self.curves[cid]


def parse_into(ws: Workspace, text: str, source: str = "<input>") -> None:
    """Parse one file's records into the workspace.

    Syntax problems raise ParseError; semantic problems (bad lengths, broken
    continuity, dangling references) raise the library's own errors.
    """
    pend = None  # {"id", "vertices", "edges", "built"}
    cur_map = None  # {"id", "src", "dst", "maps"}
    cur_func = None  # [fid, {edge: EdgeFunc}]

    def err(ln, msg):
        raise ParseError(f"{source}:{ln}: {msg}")

    def finalize() -> Curve:
        if not pend["built"]:
            c = Curve(pend["vertices"], pend["edges"])
            ws.add_curve(pend["id"], c)
            pend["built"] = True
        return ws.curves[pend["id"]]

    def finish_func():
        nonlocal cur_func
        if cur_func is None:
            return
        fid, per_edge = cur_func
        cur_func = None
        ws.add_func(fid, pend["id"], PLFunction(finalize(), per_edge))

    def close_curve():
        nonlocal pend
        finish_func()
        if pend is not None:
            finalize()
            pend = None

    def close_map():
        nonlocal cur_map
        if cur_map is None:
            return
        for cid in (cur_map["src"], cur_map["dst"]):
            if cid not in ws.curves:
                raise ParseError(f"{source}: map {cur_map['id']!r} references unknown curve {cid!r}")
        src = ws.curves[cur_map["src"]]
        dst = ws.curves[cur_map["dst"]]
        m = Morphism(src, dst, cur_map["maps"])
        ws.add_map(cur_map["id"], cur_map["src"], cur_map["dst"], m)
        cur_map = None

    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        kw = toks[0]

        if kw == "curve":
            if len(toks) != 2:
                err(ln, "usage: curve <id>")
            close_curve()
            close_map()
            pend = {"id": toks[1], "vertices": [], "edges": [], "built": False}

        elif kw == "map":
            if len(toks) != 5 or toks[3] != "->":
                err(ln, "usage: map <id> <src-curve> -> <tgt-curve>")
            close_curve()
            close_map()
            cur_map = {"id": toks[1], "src": toks[2], "dst": toks[4], "maps": {}}

        elif kw == "edge" and cur_map is not None:
            if len(toks) != 4 or toks[2] != "slope":
                err(ln, "usage: edge <src>-><tgt>@<off> slope <k>")
            if "->" not in toks[1]:
                err(ln, "map edge line needs <src>-><tgt>@<off>")
            src_eid, rest = toks[1].split("->", 1)
            tgt_eid, off = _parse_addr(rest, f"{source}:{ln}")
            try:
                k = int(toks[3])
            except ValueError:
                err(ln, f"bad slope {toks[3]!r}")
            if src_eid in cur_map["maps"]:
                err(ln, f"duplicate map assignment for edge {src_eid!r}")
            cur_map["maps"][src_eid] = EdgeMap(
                tgt_eid, off, 1 if k >= 0 else -1, abs(k)
            )

        elif kw == "vertex":
            if len(toks) != 2:
                err(ln, "usage: vertex <id>")
            if pend is None:
                err(ln, "vertex outside a curve block")
            if pend["built"]:
                err(ln, "vertex after the curve was already used")
            finish_func()
            pend["vertices"].append(toks[1])

        elif kw == "edge":
            if len(toks) != 5:
                err(ln, "usage: edge <id> <from> <to> <len>")
            if pend is None:
                err(ln, "edge outside a curve block")
            if pend["built"]:
                err(ln, "edge after the curve was already used")
            finish_func()
            try:
                length = parse_ext(toks[4])
            except (ValueError, TropError):
                err(ln, f"bad length {toks[4]!r}")
            pend["edges"].append(Edge(toks[1], toks[2], toks[3], length))

        elif kw == "point":
            if len(toks) != 3:
                err(ln, "usage: point <id> <edge>@<off>")
            if pend is None:
                err(ln, "point outside a curve block")
            finish_func()
            c = finalize()
            eid, off = _parse_addr(toks[2], f"{source}:{ln}")
            ws.add_point(toks[1], pend["id"], c.pt(eid, off))

        elif kw == "func":
            if len(toks) != 2:
                err(ln, "usage: func <id>")
            if pend is None:
                err(ln, "func outside a curve block")
            finish_func()
            finalize()
            cur_func = [toks[1], {}]

        elif kw == "on":
            if cur_func is None:
                err(ln, "on line outside a func block")
            if len(toks) < 6 or toks[2] != "start" or toks[4] != "pieces":
                err(ln, "usage: on <edge> start <val> pieces (<slope>:<len>)+")
            try:
                start = parse_ext(toks[3])
            except (ValueError, TropError):
                err(ln, f"bad start value {toks[3]!r}")
            pieces = []
            for tok in toks[5:]:
                if not (tok.startswith("(") and tok.endswith(")") and ":" in tok):
                    err(ln, f"bad piece {tok!r}")
                s, l = tok[1:-1].split(":", 1)
                try:
                    slope = int(s)
                    length = parse_ext(l)
                except (ValueError, TropError):
                    err(ln, f"bad piece {tok!r}")
                pieces.append((slope, length))
            if toks[1] in cur_func[1]:
                err(ln, f"duplicate on line for edge {toks[1]!r}")
            cur_func[1][toks[1]] = EdgeFunc(start, tuple(pieces))

        elif kw == "div":
            if len(toks) < 2:
                err(ln, "usage: div <id> (<coef>*<edge>@<off>)*")
            if pend is None:
                err(ln, "div outside a curve block")
            finish_func()
            c = finalize()
            acc: dict = {}
            for tok in toks[2:]:
                if "*" not in tok:
                    err(ln, f"bad divisor entry {tok!r}")
                coef, a = tok.split("*", 1)
                try:
                    k = int(coef)
                except ValueError:
                    err(ln, f"bad coefficient {coef!r}")
                eid, off = _parse_addr(a, f"{source}:{ln}")
                p = c.pt(eid, off)
                acc[p] = acc.get(p, 0) + k
            ws.add_divisor(toks[1], pend["id"], Divisor(acc))

        elif kw == "system":
            if len(toks) < 6 or toks[2] != "base" or toks[4] != "gens":
                err(ln, "usage: system <id> base <div> gens <func>+")
            if pend is None:
                err(ln, "system outside a curve block")
            finish_func()
            c = finalize()
            did = toks[3]
            if did not in ws.divisors:
                err(ln, f"unknown div {did!r}")
            dcid, base = ws.divisors[did]
            if dcid != pend["id"]:
                err(ln, f"div {did!r} lives on curve {dcid!r}")
            gens = []
            for fid in toks[5:]:
                if fid not in ws.funcs:
                    err(ln, f"unknown func {fid!r}")
                fcid, f = ws.funcs[fid]
                if fcid != pend["id"]:
                    err(ln, f"func {fid!r} lives on curve {fcid!r}")
                gens.append(f)
            ws.add_system(toks[1], pend["id"], GenSystem(c, base, gens), did, toks[5:])

        else:
            err(ln, f"unknown record {kw!r}")

    close_curve()
    close_map()


def parse_workspace(text: str, source: str = "<input>") -> Workspace:
    ws = Workspace()
    parse_into(ws, text, source)
    return ws


def load_file(ws: Workspace, path: str) -> None:
    with open(path, "r", encoding="utf-8") as fh:
        parse_into(ws, fh.read(), source=path)


def _func_lines(fid: str, f: PLFunction) -> list[str]:
    if f.is_neg_inf:
        raise TropError(f"cannot serialize the constant -inf function {fid!r}")
    out = [f"func {fid}"]
    for eid in sorted(f.per_edge):
        ef = f.per_edge[eid]
        ps = " ".join(f"({s}:{fmt_ext(ln)})" for s, ln in ef.pieces)
        out.append(f"on {eid} start {fmt_ext(ef.start)} pieces {ps}")
    return out


def format_divisor(d: Divisor) -> str:
    return " ".join(f"{k}*{addr(p)}" for p, k in d.items())


def format_workspace(ws: Workspace) -> str:
    """Canonical printing: curves, then their objects, then maps, each block
    sorted by id.  parse(format(ws)) reproduces the same bytes."""
    out = []
    for cid in sorted(ws.curves):
        c = ws.curves[cid]
        out.append(f"curve {cid}")
        for v in sorted(c.vertices):
            out.append(f"vertex {v}")
        for eid in sorted(c.edges):
            e = c.edges[eid]
            out.append(f"edge {eid} {e.src} {e.dst} {fmt_ext(e.length)}")
        for pid in sorted(ws.points):
            pcid, p = ws.points[pid]
            if pcid == cid:
                out.append(f"point {pid} {addr(p)}")
        for fid in sorted(ws.funcs):
            fcid, f = ws.funcs[fid]
            if fcid == cid:
                out.extend(_func_lines(fid, f))
        for did in sorted(ws.divisors):
            dcid, d = ws.divisors[did]
            if dcid == cid:
                entries = format_divisor(d)
                out.append(f"div {did} {entries}" if entries else f"div {did}")
        for sid in sorted(ws.systems):
            scid, _s, base_id, gen_ids = ws.systems[sid]
            if scid == cid:
                out.append(f"system {sid} base {base_id} gens " + " ".join(gen_ids))
    for mid in sorted(ws.maps):
        src_id, dst_id, m = ws.maps[mid]
        out.append(f"map {mid} {src_id} -> {dst_id}")
        for eid in sorted(m.edge_maps):
            em = m.edge_maps[eid]
            k = em.dir * em.slope
            out.append(f"edge {eid}->{em.edge}@{fmt_ext(em.start)} slope {k}")
    return "\n".join(out) + "\n"


def write_file(ws: Workspace, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_workspace(ws))
