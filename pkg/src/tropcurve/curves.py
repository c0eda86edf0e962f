"""Metric graphs with rational edge lengths and optional unbounded edges.

A curve is a finite connected multigraph; every edge has positive rational
length or length +inf.  The far end of an unbounded edge is a point at
infinity and must have valency 1.  Points are addressed as edge+offset and
are canonicalized eagerly: offsets 0 and len collapse to a per-vertex
canonical representative so that point equality is plain tuple equality.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction

from .errors import CurveError
from .ratext import INF, as_ext, is_finite

__all__ = [
    "Point",
    "Edge",
    "HalfEdge",
    "Curve",
    "CurveReport",
    "CurveMap",
    "GraftSpec",
    "Grafted",
    "validate_curve",
    "refine",
    "graft",
    "canonical_base_point",
]


@dataclass(frozen=True, order=True)
class Point:
    """A point on a fixed curve, canonical under Curve.pt."""

    edge: str
    offset: Fraction | float

    def __repr__(self):
        return f"{self.edge}@{self.offset}"


@dataclass(frozen=True)
class Edge:
    id: str
    src: str
    dst: str
    length: Fraction | float


@dataclass(frozen=True)
class HalfEdge:
    """An outgoing direction at a point: follow `edge` with offset step `sign`.

    reach is the distance available before the edge ends in that direction.
    """

    point: Point
    edge: str
    sign: int
    reach: Fraction | float


@dataclass(frozen=True)
class CurveReport:
    ok: bool
    problems: tuple[str, ...]
    b1: int | None = None
    leaf_ends: tuple[Point, ...] = ()
    infinite_ends: tuple[Point, ...] = ()


class Curve:
    """Validated immutable metric graph."""

    def __init__(self, vertices, edges):
        vs = list(vertices)
        es = [Edge(e.id, e.src, e.dst, as_ext(e.length)) if isinstance(e, Edge)
              else Edge(e[0], e[1], e[2], as_ext(e[3])) for e in edges]
        problems = _check(vs, es)
        if problems:
            raise CurveError("; ".join(problems))
        self.vertices: tuple[str, ...] = tuple(sorted(vs))
        self.edges: dict[str, Edge] = {e.id: e for e in sorted(es, key=lambda e: e.id)}
        self._ends: dict[str, list[tuple[str, int]]] = {v: [] for v in self.vertices}
        for e in self.edges.values():
            self._ends[e.src].append((e.id, +1))
            if is_finite(e.length):
                self._ends[e.dst].append((e.id, -1))
        for v in self._ends:
            self._ends[v].sort()
        self._vcanon: dict[str, Point] = {}
        for v, ends in self._ends.items():
            if not ends:
                continue
            eid, sign = ends[0]
            off = Fraction(0) if sign > 0 else self.edges[eid].length
            self._vcanon[v] = Point(eid, off)
        self._dist_cache: dict[str, dict[str, Fraction]] = {}

    def __eq__(self, other):
        return (
            isinstance(other, Curve)
            and self.vertices == other.vertices
            and self.edges == other.edges
        )

    __hash__ = None

    def __repr__(self):
        return f"Curve({len(self.vertices)} vertices, {len(self.edges)} edges)"

    # -- points ------------------------------------------------------------

    def pt(self, edge: str, offset) -> Point:
        """Canonical point at the given edge offset."""
        e = self.edges.get(edge)
        if e is None:
            raise CurveError(f"unknown edge {edge!r}")
        off = as_ext(offset)
        if not is_finite(off):
            if off != INF or is_finite(e.length):
                raise CurveError(f"offset {off} invalid on edge {edge}")
            return Point(edge, INF)
        if off < 0 or off > e.length:
            raise CurveError(f"offset {off} outside [0, {e.length}] on edge {edge}")
        if off == 0:
            return self._vcanon[e.src]
        if off == e.length:
            return self._vcanon[e.dst]
        return Point(edge, off)

    def vertex_point(self, v: str) -> Point:
        if v not in self._vcanon:
            raise CurveError(f"unknown or isolated vertex {v!r}")
        return self._vcanon[v]

    def point_vertex(self, p: Point) -> str | None:
        """Vertex id if p sits at a vertex, else None."""
        e = self.edges[p.edge]
        if p.offset == 0:
            return e.src
        if is_finite(p.offset) and p.offset == e.length:
            return e.dst
        return None

    def is_infinite_point(self, p: Point) -> bool:
        return not is_finite(p.offset)

    def contains(self, p: Point) -> bool:
        try:
            return self.pt(p.edge, p.offset) == p
        except CurveError:
            return False

    # -- global invariants -------------------------------------------------

    @property
    def b1(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    def is_tree(self) -> bool:
        return self.b1 == 0

    def total_finite_length(self) -> Fraction:
        return sum(
            (e.length for e in self.edges.values() if is_finite(e.length)),
            Fraction(0),
        )

    def has_unbounded_edge(self) -> bool:
        return any(not is_finite(e.length) for e in self.edges.values())

    def valency(self, v: str) -> int:
        return len(self._ends[v])

    def leaf_ends(self) -> list[Point]:
        """Valency-1 points: leaf vertices and points at infinity."""
        out = [self._vcanon[v] for v in self.vertices if len(self._ends[v]) == 1]
        out += [
            Point(e.id, INF) for e in self.edges.values() if not is_finite(e.length)
        ]
        return sorted(out)

    def infinite_ends(self) -> list[Point]:
        return sorted(
            Point(e.id, INF) for e in self.edges.values() if not is_finite(e.length)
        )

    # -- local structure ----------------------------------------------------

    def half_edges(self, p: Point) -> list[HalfEdge]:
        """Outgoing germs at p; two on edge interiors, one per end at vertices."""
        p = self.pt(p.edge, p.offset)
        if self.is_infinite_point(p):
            return [HalfEdge(p, p.edge, -1, INF)]
        v = self.point_vertex(p)
        if v is None:
            e = self.edges[p.edge]
            reach_up = e.length - p.offset if is_finite(e.length) else INF
            return [
                HalfEdge(p, p.edge, +1, reach_up),
                HalfEdge(p, p.edge, -1, p.offset),
            ]
        out = []
        for eid, sign in self._ends[v]:
            out.append(HalfEdge(p, eid, sign, self.edges[eid].length))
        return out

    def step(self, h: HalfEdge, t) -> Point:
        """The point at distance t along half-edge h (t within reach)."""
        t = as_ext(t)
        if self.is_infinite_point(h.point):
            raise CurveError("cannot step from a point at infinity")
        if h.point.edge == h.edge and self.point_vertex(h.point) is None:
            base = h.point.offset
        else:
            # at a vertex the end is identified by the sign alone
            base = Fraction(0) if h.sign > 0 else self.edges[h.edge].length
        return self.pt(h.edge, base + h.sign * t)

    # -- metric -------------------------------------------------------------

    def _vertex_dists(self, v0: str) -> dict[str, Fraction]:
        if v0 in self._dist_cache:
            return self._dist_cache[v0]
        dist = {v0: Fraction(0)}
        pq = [(Fraction(0), v0)]
        while pq:
            d, v = heapq.heappop(pq)
            if d > dist.get(v, INF):
                continue
            for eid, _sign in self._ends[v]:
                e = self.edges[eid]
                if not is_finite(e.length):
                    continue
                w = e.dst if e.src == v else e.src
                nd = d + e.length
                if nd < dist.get(w, INF):
                    dist[w] = nd
                    heapq.heappush(pq, (nd, w))
        self._dist_cache[v0] = dist
        return dist

    def _finite_ends(self, p: Point) -> list[tuple[str, Fraction]]:
        v = self.point_vertex(p)
        if v is not None:
            return [(v, Fraction(0))]
        e = self.edges[p.edge]
        out = [(e.src, p.offset)]
        if is_finite(e.length):
            out.append((e.dst, e.length - p.offset))
        return out

    def distance(self, x: Point, y: Point):
        """Shortest-path distance; +inf when exactly one end is at infinity
        or the ends are distinct points at infinity."""
        x = self.pt(x.edge, x.offset)
        y = self.pt(y.edge, y.offset)
        if x == y:
            return Fraction(0)
        if self.is_infinite_point(x) or self.is_infinite_point(y):
            return INF
        best = INF
        if x.edge == y.edge:
            best = abs(x.offset - y.offset)
        for u, du in self._finite_ends(x):
            dd = self._vertex_dists(u)
            for v, dv in self._finite_ends(y):
                if v in dd:
                    cand = du + dd[v] + dv
                    if cand < best:
                        best = cand
        assert is_finite(best), "disconnected finite part"
        return best


def _check(vertices, edges) -> list[str]:
    problems = []
    if len(set(vertices)) != len(vertices):
        problems.append("duplicate vertex ids")
    if not vertices:
        problems.append("curve has no vertices")
    vset = set(vertices)
    seen = set()
    infinite_dst = {}
    incident: dict[str, int] = {v: 0 for v in vset}
    for e in edges:
        if e.id in seen:
            problems.append(f"duplicate edge id {e.id}")
        seen.add(e.id)
        for v in (e.src, e.dst):
            if v not in vset:
                problems.append(f"edge {e.id} references unknown vertex {v}")
        if is_finite(e.length):
            if e.length <= 0:
                problems.append(f"edge {e.id} has non-positive length {e.length}")
            for v in (e.src, e.dst):
                if v in incident:
                    incident[v] += 1
        else:
            if e.length != INF:
                problems.append(f"edge {e.id} has invalid length")
            if e.src in incident:
                incident[e.src] += 1
            infinite_dst.setdefault(e.dst, []).append(e.id)
    for v, eids in infinite_dst.items():
        uses = incident.get(v, 0) + len(eids)
        if uses != 1:
            problems.append(
                f"point at infinity {v} (end of {','.join(eids)}) must have valency 1"
            )
    if problems:
        return problems
    # connectivity over all edges, infinite ones included
    adj: dict[str, set[str]] = {v: set() for v in vset}
    for e in edges:
        adj[e.src].add(e.dst)
        adj[e.dst].add(e.src)
    stack = [next(iter(vset))]
    reached = set()
    while stack:
        v = stack.pop()
        if v in reached:
            continue
        reached.add(v)
        stack.extend(adj[v] - reached)
    if reached != vset:
        problems.append("curve is disconnected")
    return problems


def validate_curve(c: Curve) -> CurveReport:
    """Report for an already constructed curve (construction validates too)."""
    return CurveReport(
        ok=True,
        problems=(),
        b1=c.b1,
        leaf_ends=tuple(c.leaf_ends()),
        infinite_ends=tuple(c.infinite_ends()),
    )


def spanning_tree_b1(c: Curve) -> int:
    """b1 recomputed as the number of non-tree edges of a DFS spanning tree."""
    seen = {c.vertices[0]}
    tree_edges = set()
    stack = [c.vertices[0]]
    while stack:
        v = stack.pop()
        for eid, _sign in c._ends[v]:
            e = c.edges[eid]
            w = e.dst if e.src == v else e.src
            if w not in seen:
                seen.add(w)
                tree_edges.add(eid)
                stack.append(w)
                stack.append(v)
    return len(c.edges) - len(tree_edges)


# -- subdivision and grafting ---------------------------------------------


@dataclass(frozen=True)
class CurveMap:
    """Forward point transport along a subdivision or inclusion.

    tiles maps each source edge to ordered ((dst_edge, lo, hi), ...) covering
    [0, len]; a source offset o in [lo, hi] lands at dst_edge @ (o - lo).
    """

    dst: Curve
    tiles: dict

    def point(self, p: Point) -> Point:
        for dst_edge, lo, hi in self.tiles[p.edge]:
            if not is_finite(p.offset):
                if not is_finite(hi):
                    return Point(dst_edge, INF)
                continue
            if lo <= p.offset <= hi:
                return self.dst.pt(dst_edge, p.offset - lo)
        raise CurveError(f"point {p} outside mapped region")


def refine(c: Curve, cuts: dict) -> tuple[Curve, CurveMap]:
    """Subdivide edges at the given interior offsets.

    cuts: edge id -> iterable of offsets; offsets at 0/len are ignored.  Edges
    without cuts keep their id, split edges become e.0, e.1, ... with fresh
    degree-2 vertices e.c0, e.c1, ...
    """
    vertices = list(c.vertices)
    edges = []
    tiles: dict = {}
    for eid, e in c.edges.items():
        offs = sorted(
            {as_ext(o) for o in cuts.get(eid, ())
             if is_finite(as_ext(o)) and 0 < as_ext(o) < e.length}
        )
        if not offs:
            edges.append(e)
            tiles[eid] = ((eid, Fraction(0), e.length),)
            continue
        bounds = [Fraction(0)] + offs + [e.length]
        names = []
        for i in range(len(offs)):
            names.append(f"{eid}.c{i}")
        vertices.extend(names)
        pieces = []
        for i in range(len(bounds) - 1):
            lo, hi = bounds[i], bounds[i + 1]
            src = e.src if i == 0 else names[i - 1]
            dst = e.dst if i == len(bounds) - 2 else names[i]
            sub = f"{eid}.{i}"
            ln = hi - lo if is_finite(hi) else INF
            edges.append(Edge(sub, src, dst, ln))
            pieces.append((sub, lo, hi))
        tiles[eid] = tuple(pieces)
    out = Curve(vertices, edges)
    return out, CurveMap(out, tiles)


@dataclass(frozen=True)
class GraftSpec:
    """One tree to attach: identify `attach` (a point of `tree`) with `host`."""

    host: Point
    tree: Curve
    attach: Point


@dataclass(frozen=True)
class Grafted:
    curve: Curve
    embed: CurveMap
    tree_embeds: tuple[CurveMap, ...]
    prefixes: tuple[str, ...]
    hosts: tuple[Point, ...]
    graft_edges: tuple[frozenset, ...]


def graft(c: Curve, specs) -> Grafted:
    """Attach trees at finite points of c; returns the enlarged curve plus
    transport maps for the base curve and each grafted tree."""
    specs = list(specs)
    for s in specs:
        if not s.tree.is_tree():
            raise CurveError("grafted component must be a tree")
        if c.is_infinite_point(c.pt(s.host.edge, s.host.offset)):
            raise CurveError("cannot graft at a point at infinity")
    cuts: dict = {}
    for s in specs:
        p = c.pt(s.host.edge, s.host.offset)
        if c.point_vertex(p) is None:
            cuts.setdefault(p.edge, set()).add(p.offset)
    base, embed = refine(c, cuts)
    vertices = list(base.vertices)
    edges = list(base.edges.values())
    tree_embeds = []
    prefixes = []
    hosts = []
    graft_edges = []
    for i, s in enumerate(specs):
        prefix = f"g{i}."
        host_new = embed.point(c.pt(s.host.edge, s.host.offset))
        host_vertex = base.point_vertex(host_new)
        assert host_vertex is not None
        tree = s.tree
        attach = tree.pt(s.attach.edge, s.attach.offset)
        tcuts: dict = {}
        if tree.point_vertex(attach) is None:
            tcuts[attach.edge] = {attach.offset}
        tref, tmap = refine(tree, tcuts)
        attach_vertex = tref.point_vertex(tmap.point(attach))
        assert attach_vertex is not None

        def rn(v):
            return host_vertex if v == attach_vertex else prefix + v

        vertices.extend(rn(v) for v in tref.vertices if v != attach_vertex)
        new_edges = []
        for e in tref.edges.values():
            new_edges.append(Edge(prefix + e.id, rn(e.src), rn(e.dst), e.length))
        edges.extend(new_edges)
        tiles = {
            eid: tuple((prefix + sub, lo, hi) for sub, lo, hi in parts)
            for eid, parts in tmap.tiles.items()
        }
        prefixes.append(prefix)
        hosts.append(host_new)
        graft_edges.append(frozenset(e.id for e in new_edges))
        tree_embeds.append((tiles,))
    out = Curve(vertices, edges)
    base_map = CurveMap(out, embed.tiles)
    tree_maps = tuple(CurveMap(out, t[0]) for t in tree_embeds)
    g = Grafted(
        curve=out,
        embed=base_map,
        tree_embeds=tree_maps,
        prefixes=tuple(prefixes),
        hosts=tuple(hosts),
        graft_edges=tuple(graft_edges),
    )
    assert out.b1 == c.b1, "grafting trees must preserve b1"
    return g


def canonical_base_point(c: Curve) -> Point:
    """Offset 0 of the lexicographically first edge."""
    eid = min(c.edges)
    return c.pt(eid, 0)
