"""Morphisms of metric graphs: edge-wise affine maps with integer slopes.

The source curve must be refined so that each of its edges maps into a single
target edge; an EdgeMap records target edge, the image of offset 0, a
direction, and the nonnegative stretch factor.  Harmonicity at a point asks
that the slope sums over source germs are the same toward every target germ;
the common value is the local degree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import Curve, Grafted, Point, graft
from .divisors import Divisor
from .errors import MorphismError, NotHarmonicError, TropError
from .functions import EdgeFunc, PLFunction
from .ratext import INF, NEG_INF, as_q, is_finite

__all__ = [
    "EdgeMap",
    "Morphism",
    "MorphReport",
    "LocalDegree",
    "validate_morphism",
    "local_degree",
    "harmonic_failures",
    "is_harmonic",
    "fiber",
    "fiber_degree",
    "global_degree",
    "push_function",
    "pull_function",
    "push_divisor",
    "pull_divisor",
    "Modification",
    "make_modification",
    "trivial_modification",
    "retraction_of",
]


@dataclass(frozen=True)
class EdgeMap:
    """Image of one source edge: offset t goes to edge @ (start + dir*slope*t)."""

    edge: str
    start: Fraction
    dir: int
    slope: int

    def __post_init__(self):
        object.__setattr__(self, "start", as_q(self.start))
        if self.dir not in (-1, 1):
            raise MorphismError(f"direction must be +-1, got {self.dir}")
        if int(self.slope) != self.slope or self.slope < 0:
            raise MorphismError(f"slope must be a nonnegative integer, got {self.slope}")
        object.__setattr__(self, "slope", int(self.slope))

    def offset(self, t):
        return self.start + self.dir * self.slope * t


class Morphism:
    """Validated continuous edge-wise affine map between curves."""

    __slots__ = ("src", "dst", "edge_maps")

    def __init__(self, src: Curve, dst: Curve, edge_maps: dict):
        self.src = src
        self.dst = dst
        if set(edge_maps) != set(src.edges):
            raise MorphismError("edge map must cover every source edge")
        self.edge_maps = dict(edge_maps)
        problems = self._problems()
        if problems:
            raise MorphismError("; ".join(problems))

    def _problems(self) -> list[str]:
        out = []
        for eid, em in self.edge_maps.items():
            e = self.src.edges[eid]
            if em.edge not in self.dst.edges:
                out.append(f"edge {eid} maps to unknown target {em.edge}")
                continue
            te = self.dst.edges[em.edge]
            if em.start < 0 or (is_finite(te.length) and em.start > te.length):
                out.append(f"edge {eid} image starts outside target {em.edge}")
                continue
            if not is_finite(e.length):
                if em.slope == 0:
                    continue
                if em.dir != 1 or is_finite(te.length):
                    out.append(
                        f"unbounded edge {eid} must map forward onto an "
                        f"unbounded edge (got {em.edge})"
                    )
                continue
            end = em.offset(e.length)
            if end < 0 or (is_finite(te.length) and end > te.length):
                out.append(f"edge {eid} image leaves target {em.edge}")
        if out:
            return out
        for v in self.src.vertices:
            imgs = []
            for eid, sign in self.src._ends[v]:
                em = self.edge_maps[eid]
                t = Fraction(0) if sign > 0 else self.src.edges[eid].length
                imgs.append(self.dst.pt(em.edge, em.offset(t)))
            if imgs and any(p != imgs[0] for p in imgs[1:]):
                out.append(f"image discontinuous at vertex {v}: {imgs}")
        return out

    def point(self, p: Point) -> Point:
        p = self.src.pt(p.edge, p.offset)
        em = self.edge_maps[p.edge]
        if not is_finite(p.offset):
            if em.slope == 0:
                return self.dst.pt(em.edge, em.start)
            return self.dst.pt(em.edge, INF)
        return self.dst.pt(em.edge, em.offset(p.offset))

    __call__ = point

    def is_finite_morphism(self) -> bool:
        return all(em.slope >= 1 for em in self.edge_maps.values())

    def __repr__(self):
        return f"Morphism({len(self.edge_maps)} edges)"


@dataclass(frozen=True)
class MorphReport:
    ok: bool
    is_morphism: bool
    is_finite: bool
    problems: tuple[str, ...] = ()


def validate_morphism(m: Morphism) -> MorphReport:
    problems = m._problems()
    return MorphReport(
        ok=not problems,
        is_morphism=not problems,
        is_finite=m.is_finite_morphism(),
        problems=tuple(problems),
    )


# -- local structure --------------------------------------------------------


@dataclass(frozen=True)
class LocalDegree:
    ok: bool
    value: int | None
    point: Point
    image: Point
    sums: tuple  # ((target edge, sign), slope sum) per target germ


def local_degree(m: Morphism, x: Point) -> LocalDegree:
    """Slope sums toward each target germ at the image of x."""
    x = m.src.pt(x.edge, x.offset)
    y = m.point(x)
    sums = {(h.edge, h.sign): 0 for h in m.dst.half_edges(y)}
    for h in m.src.half_edges(x):
        em = m.edge_maps[h.edge]
        if em.slope == 0:
            continue
        key = (em.edge, em.dir * h.sign)
        if key not in sums:
            raise MorphismError(
                f"germ {h.edge}/{h.sign} at {x} maps onto no germ at {y}"
            )
        sums[key] += em.slope
    values = set(sums.values())
    ok = len(values) <= 1
    return LocalDegree(
        ok=ok,
        value=values.pop() if ok else None,
        point=x,
        image=y,
        sums=tuple(sorted(sums.items())),
    )


def harmonic_failures(m: Morphism) -> list[LocalDegree]:
    """Failed local degree checks at vertices and edge midpoints."""
    out = []
    seen = set()
    for v in m.src.vertices:
        if not m.src._ends[v]:
            continue
        p = m.src.vertex_point(v)
        if p in seen:
            continue
        seen.add(p)
        ld = local_degree(m, p)
        if not ld.ok:
            out.append(ld)
    for eid, e in m.src.edges.items():
        mid = e.length / 2 if is_finite(e.length) else Fraction(1)
        ld = local_degree(m, m.src.pt(eid, mid))
        if not ld.ok:
            out.append(ld)
    return out


def is_harmonic(m: Morphism) -> bool:
    return not harmonic_failures(m)


def _point_reps(c: Curve, y: Point):
    """All (edge, offset) addresses of y."""
    v = c.point_vertex(y)
    if v is None:
        return [(y.edge, y.offset)]
    reps = []
    for eid, sign in c._ends[v]:
        reps.append((eid, Fraction(0) if sign > 0 else c.edges[eid].length))
    return reps


def fiber(m: Morphism, y: Point) -> list[Point]:
    """Preimages of y reachable along edges of positive slope."""
    y = m.dst.pt(y.edge, y.offset)
    reps = _point_reps(m.dst, y)
    out = set()
    for eid, e in m.src.edges.items():
        em = m.edge_maps[eid]
        if em.slope == 0:
            continue
        for redge, roff in reps:
            if redge != em.edge:
                continue
            if not is_finite(roff):
                if not is_finite(e.length):
                    out.add(m.src.pt(eid, INF))
                continue
            t = em.dir * (roff - em.start) / em.slope
            if t < 0:
                continue
            if is_finite(e.length) and t > e.length:
                continue
            out.add(m.src.pt(eid, t))
    return sorted(out)


def fiber_degree(m: Morphism, y: Point):
    """(fiber points, sum of local degrees); raises if any point fails."""
    pts = fiber(m, y)
    total = 0
    for x in pts:
        ld = local_degree(m, x)
        if not ld.ok:
            raise NotHarmonicError(f"not harmonic at {x}: sums {ld.sums}")
        total += ld.value
    return pts, total


def _generic_offsets(m: Morphism):
    """One fiber-generic interior offset per target edge."""
    crit: dict = {eid: set() for eid in m.dst.edges}
    for eid, e in m.src.edges.items():
        em = m.edge_maps[eid]
        crit[em.edge].add(em.start)
        if is_finite(e.length):
            crit[em.edge].add(em.offset(e.length))
    out = {}
    for eid, e in m.dst.edges.items():
        if is_finite(e.length):
            bounds = sorted({Fraction(0), e.length} | {
                o for o in crit[eid] if 0 <= o <= e.length
            })
            for a, b in zip(bounds, bounds[1:]):
                if a < b:
                    out[eid] = (a + b) / 2
                    break
            else:
                out[eid] = e.length / 2
        else:
            finite = [o for o in crit[eid] if is_finite(o)]
            out[eid] = (max(finite) if finite else Fraction(0)) + 1
    return out


def global_degree(m: Morphism) -> int:
    """Common fiber degree over a generic point of every target edge."""
    bad = harmonic_failures(m)
    if bad:
        f = bad[0]
        raise NotHarmonicError(f"not harmonic at {f.point}: sums {f.sums}")
    degs = {}
    for eid, off in _generic_offsets(m).items():
        _pts, d = fiber_degree(m, m.dst.pt(eid, off))
        degs[eid] = d
    values = set(degs.values())
    if len(values) > 1:
        raise NotHarmonicError(f"fiber degrees differ between target edges: {degs}")
    return values.pop()


# -- transport of functions and divisors ------------------------------------


def push_function(m: Morphism, f: PLFunction) -> PLFunction:
    """x' -> sum over the fiber of deg_x * f(x); needs a harmonic morphism."""
    if f.curve != m.src:
        raise TropError("function lives on a different curve")
    if f.is_neg_inf:
        return PLFunction.constant(m.dst, NEG_INF)
    bad = harmonic_failures(m)
    if bad:
        raise NotHarmonicError(f"not harmonic at {bad[0].point}")
    cuts: dict = {eid: set() for eid in m.dst.edges}
    for eid, e in m.src.edges.items():
        em = m.edge_maps[eid]
        cuts[em.edge].add(em.start)
        if is_finite(e.length):
            cuts[em.edge].add(em.offset(e.length))
        if em.slope:
            for b in f.per_edge[eid].breakpoints():
                cuts[em.edge].add(em.offset(b))
    per = {}
    for eid, e in m.dst.edges.items():
        interior = sorted(
            o for o in cuts[eid]
            if is_finite(o) and 0 < o < e.length
        )
        bounds = [Fraction(0)] + interior + [e.length]
        pieces = []
        starts = []
        for a, b in zip(bounds, bounds[1:]):
            mid = (a + b) / 2 if is_finite(b) else a + 1
            val = Fraction(0)
            slope = 0
            for seid, se in m.src.edges.items():
                em = m.edge_maps[seid]
                if em.slope == 0 or em.edge != eid:
                    continue
                t = em.dir * (mid - em.start) / em.slope
                if t < 0 or (is_finite(se.length) and t > se.length):
                    continue
                ef = f.per_edge[seid]
                val += em.slope * ef.value(t)
                slope += em.dir * ef.slope_right(t)
            pieces.append((slope, b - a if is_finite(b) else INF))
            starts.append(val - slope * (mid - a))
        for i in range(len(pieces) - 1):
            s, ln = pieces[i]
            if starts[i] + s * ln != starts[i + 1]:
                raise MorphismError(
                    f"push-forward discontinuous inside target edge {eid}"
                )
        per[eid] = EdgeFunc(starts[0], tuple(pieces))
    return PLFunction(m.dst, per)


def _reversed_ef(ef: EdgeFunc) -> EdgeFunc:
    return EdgeFunc(
        ef.end_value(), tuple((-s, ln) for s, ln in reversed(ef.pieces))
    )


def _stretched_ef(ef: EdgeFunc, k: int) -> EdgeFunc:
    return EdgeFunc(
        ef.start,
        tuple((s * k, ln / k if is_finite(ln) else INF) for s, ln in ef.pieces),
    )


def pull_function(m: Morphism, f: PLFunction) -> PLFunction:
    """Composition f of phi, edge by edge."""
    if f.curve != m.dst:
        raise TropError("function lives on a different curve")
    if f.is_neg_inf:
        return PLFunction.constant(m.src, NEG_INF)
    per = {}
    for eid, e in m.src.edges.items():
        em = m.edge_maps[eid]
        ef = f.per_edge[em.edge]
        if em.slope == 0:
            per[eid] = EdgeFunc(ef.value(em.start), ((0, e.length),))
            continue
        if em.dir > 0:
            hi = em.offset(e.length) if is_finite(e.length) else INF
            window = ef.slice(em.start, hi)
        else:
            window = _reversed_ef(ef.slice(em.offset(e.length), em.start))
        per[eid] = _stretched_ef(window, em.slope)
    return PLFunction(m.src, per)


def push_divisor(m: Morphism, D: Divisor) -> Divisor:
    out: dict = {}
    for p, k in D.items():
        q = m.point(p)
        out[q] = out.get(q, 0) + k
    res = Divisor(out)
    assert res.degree == D.degree
    return res


def pull_divisor(m: Morphism, D: Divisor) -> Divisor:
    deg = global_degree(m)
    out: dict = {}
    for y, k in D.items():
        for x in fiber(m, y):
            ld = local_degree(m, x)
            if ld.value:
                out[x] = out.get(x, 0) + k * ld.value
    res = Divisor(out)
    assert res.degree == deg * D.degree
    return res


# -- modifications ----------------------------------------------------------


@dataclass(frozen=True)
class Modification:
    """A curve together with grafted trees and the data to undo them."""

    original: Curve
    grafted: Grafted
    hosts: tuple[Point, ...]

    @property
    def curve(self) -> Curve:
        return self.grafted.curve


def make_modification(c: Curve, specs) -> Modification:
    specs = list(specs)
    g = graft(c, specs)
    hosts = tuple(c.pt(s.host.edge, s.host.offset) for s in specs)
    return Modification(original=c, grafted=g, hosts=hosts)


def trivial_modification(c: Curve) -> Modification:
    return make_modification(c, [])


def retraction_of(mod: Modification) -> Morphism:
    """Degree-one harmonic map contracting each grafted tree to its host."""
    maps = {}
    for orig_eid, parts in mod.grafted.embed.tiles.items():
        for sub, lo, _hi in parts:
            maps[sub] = EdgeMap(orig_eid, lo, 1, 1)
    for host, geids in zip(mod.hosts, mod.grafted.graft_edges):
        for ge in geids:
            maps[ge] = EdgeMap(host.edge, host.offset, 1, 0)
    return Morphism(mod.grafted.curve, mod.original, maps)
