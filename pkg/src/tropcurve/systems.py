"""Finitely generated linear systems on a metric graph.

A system is a base divisor D together with generators in L(D).  The heart of
the module is the certificate machinery: rank-one checking by scanning the
cell decomposition, and construction of the image tree of the evaluation map
into tropical projective space, with exact failure diagnostics when the image
is not a tree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .curves import Curve, CurveMap, Edge, Point, canonical_base_point, refine
from .divisors import Divisor, map_divisor
from .equivalence import linearly_equivalent
from .errors import StarViolation, TropError
from .functions import PLFunction, map_function, principal_divisor, trop_combine
from .maxplus import ProjPoint, proj_distance, tropical_segment
from .ratext import INF, NEG_INF, Q, is_finite

# pair checks on the image tree are quadratic in node count; past this many
# nodes only the per-cell direction test runs
_PAIR_CHECK_CAP = 80


class GenSystem:
    """Base divisor plus a finite generating set of functions in L(base)."""

    __slots__ = ("curve", "base", "gens")

    def __init__(self, curve: Curve, base: Divisor, gens):
        gens = tuple(gens)
        if not gens:
            raise TropError("generator list is empty")
        for p in base.support():
            if not curve.contains(p):
                raise TropError(f"base divisor point {p} is not on the curve")
        for i, g in enumerate(gens):
            if not isinstance(g, PLFunction) or g.curve != curve:
                raise TropError(f"generator {i} does not live on the curve")
            if g.is_neg_inf:
                raise TropError(f"generator {i} is identically -inf")
            if not (base + principal_divisor(g)).is_effective():
                raise TropError(f"generator {i} is not in L(base): base + div has a negative coefficient")
        self.curve = curve
        self.base = base
        self.gens = gens

    @property
    def degree(self) -> int:
        return self.base.degree

    def __repr__(self):
        return f"GenSystem(deg {self.degree}, {len(self.gens)} gens)"


def fn_inf(f: PLFunction):
    """Exact infimum of f over its curve; -inf on a negative unbounded tail."""
    if f.is_neg_inf:
        return NEG_INF
    best = None
    for ef in f.per_edge.values():
        s, ln = ef.pieces[-1]
        if not is_finite(ln) and s < 0:
            return NEG_INF
        for v in ef.critical_values():
            if best is None or v < best:
                best = v
    return best


def fn_max_critical(f: PLFunction):
    """Largest value of f at a vertex or kink (ignores +inf tails)."""
    if f.is_neg_inf:
        raise TropError("constant -inf has no critical values")
    best = None
    for ef in f.per_edge.values():
        for v in ef.critical_values():
            if best is None or v > best:
                best = v
    return best


@dataclass(frozen=True)
class MaxRep:
    """Largest coefficients with max_i(a_i + g_i) <= f; equality iff f is in
    the span of the generators."""

    coeffs: tuple
    equality: bool
    combo: PLFunction


def maximal_representation(f: PLFunction, system: GenSystem) -> MaxRep:
    if f.curve != system.curve:
        raise TropError("function and system live on different curves")
    if f.is_neg_inf:
        combo = PLFunction.constant(system.curve, NEG_INF)
        return MaxRep(tuple(NEG_INF for _ in system.gens), True, combo)
    coeffs = tuple(fn_inf(f.sub(g)) for g in system.gens)
    combo = trop_combine(coeffs, system.gens)
    return MaxRep(coeffs, combo == f, combo)


def minimize_generators(system: GenSystem) -> GenSystem:
    """Smallest generating set of the same sub-semimodule, normalized.

    Projective duplicates (functions differing by a constant) collapse first;
    a generator expressible over the remaining others is then dropped.  After
    deduplication the survivors are exactly the scalar classes no combination
    of the others can reach, so one sweep is enough and its order does not
    matter.  Survivors are shifted so their largest critical value is 0.
    """
    kept: list[PLFunction] = []
    for g in system.gens:
        if not any(g.sub(h).is_constant() for h in kept):
            kept.append(g)
    i = 0
    while i < len(kept):
        others = kept[:i] + kept[i + 1 :]
        if others:
            sub = GenSystem(system.curve, system.base, others)
            if maximal_representation(kept[i], sub).equality:
                kept.pop(i)
                continue
        i += 1
    normed = [g.shift(-fn_max_critical(g)) for g in kept]
    return GenSystem(system.curve, system.base, normed)


def phi(system: GenSystem, x: Point) -> ProjPoint:
    """Evaluation map x -> (g_0(x) : ... : g_n(x)) in tropical projective space."""
    p = system.curve.pt(x.edge, x.offset)
    return ProjPoint([g.value(p) for g in system.gens])


def divisor_at(system: GenSystem, x: Point) -> Divisor:
    """The divisor assigned to x: base + div(max_i (g_i - g_i(x)))."""
    p = system.curve.pt(x.edge, x.offset)
    vals = [g.value(p) for g in system.gens]
    coeffs = []
    for v in vals:
        if v == NEG_INF:
            raise TropError(f"divisor_at undefined: a generator is -inf at {p}")
        coeffs.append(-v if is_finite(v) else NEG_INF)
    if all(c == NEG_INF for c in coeffs):
        raise TropError(f"divisor_at undefined: every generator is +inf at {p}")
    g = trop_combine(coeffs, system.gens)
    return system.base + principal_divisor(g)


# -- cell decomposition ------------------------------------------------------


@dataclass(frozen=True)
class Cell:
    """One refined edge on which every generator is affine."""

    edge: str
    length: object
    values: tuple
    slopes: tuple

    @property
    def stretch(self) -> int:
        return max(self.slopes) - min(self.slopes)


@dataclass(frozen=True)
class CellDecomposition:
    original: GenSystem
    refined: GenSystem
    cmap: CurveMap
    cells: dict

    def to_original(self, p: Point) -> Point:
        """Address of a refined-curve point back on the original curve."""
        for src_edge, tiles in self.cmap.tiles.items():
            for dst_edge, lo, hi in tiles:
                if dst_edge == p.edge:
                    if not is_finite(p.offset):
                        return Point(src_edge, INF)
                    return self.original.curve.pt(src_edge, lo + p.offset)
        raise TropError(f"{p} is not in the refinement image")


def cell_refine(system: GenSystem, extra_cuts=None) -> CellDecomposition:
    """Subdivide the curve until every generator is affine on every edge and
    the base divisor sits on vertices.  extra_cuts adds interior offsets."""
    c = system.curve
    cuts: dict[str, set] = {}

    def add(eid, off):
        e = c.edges[eid]
        if not is_finite(off) or off <= 0:
            return
        if is_finite(e.length) and off >= e.length:
            return
        cuts.setdefault(eid, set()).add(Q(off))

    for g in system.gens:
        for eid, ef in g.per_edge.items():
            for b in ef.breakpoints():
                add(eid, b)
    for p in system.base.support():
        if c.point_vertex(p) is None and is_finite(p.offset):
            add(p.edge, p.offset)
    if extra_cuts:
        for eid, offs in extra_cuts.items():
            for off in offs:
                add(eid, off)

    rc, cmap = refine(c, {eid: sorted(s) for eid, s in cuts.items()})
    gens = tuple(map_function(cmap, g) for g in system.gens)
    base = map_divisor(cmap, system.base)
    refined = GenSystem(rc, base, gens)

    cells = {}
    for eid, e in rc.edges.items():
        values = []
        slopes = []
        for g in gens:
            ef = g.per_edge[eid]
            assert len(ef.pieces) == 1, "refinement must leave one piece per edge"
            values.append(ef.start)
            slopes.append(ef.pieces[0][0])
        cells[eid] = Cell(eid, e.length, tuple(values), tuple(slopes))
    return CellDecomposition(system, refined, cmap, cells)


# -- rank certificate --------------------------------------------------------


@dataclass(frozen=True)
class RankCert:
    """Witness that min_x D_x(x) >= 1, or the first point where it fails.

    point/value identify the failure on the original curve; minimum is the
    smallest self-multiplicity seen when the check passes.
    """

    ok: bool
    point: Point | None
    value: int | None
    minimum: int | None
    checked: int


def check_rank_one(system: GenSystem) -> RankCert:
    """Verify every point carries itself in its assigned divisor.

    Cell endpoints are scanned first in sorted order, then cell interiors,
    where D_x(x) is constant and equals the slope spread of the generators.
    """
    cd = cell_refine(system)
    rc = cd.refined.curve
    pts = {rc.pt(e.id, 0) for e in rc.edges.values()}
    pts |= {rc.pt(e.id, e.length) for e in rc.edges.values() if is_finite(e.length)}
    checked = 0
    low = None
    for p in sorted(pts):
        v = divisor_at(cd.refined, p).coeff(p)
        checked += 1
        if v < 1:
            return RankCert(False, cd.to_original(p), v, None, checked)
        low = v if low is None else min(low, v)
    for eid in sorted(cd.cells):
        cell = cd.cells[eid]
        v = cell.stretch
        checked += 1
        if v < 1:
            e = rc.edges[eid]
            mid = e.length / 2 if is_finite(e.length) else Q(1)
            return RankCert(False, cd.to_original(Point(eid, mid)), v, None, checked)
        low = v if low is None else min(low, v)
    return RankCert(True, None, None, low, checked)


# -- image tree --------------------------------------------------------------


class _Seg:
    """Straight segment in canonical coordinates, parametrized by arc length."""

    __slots__ = ("p", "d", "ln")

    def __init__(self, p, d, ln):
        self.p = p
        self.d = d
        self.ln = ln

    @property
    def q(self):
        return tuple(pi + self.ln * di for pi, di in zip(self.p, self.d))


def _param_on(seg: _Seg, x) -> Fraction | None:
    """Arc parameter t in [0, ln] with seg(t) == x, else None."""
    t = None
    for pi, di, xi in zip(seg.p, seg.d, x):
        if di != 0:
            t = (xi - pi) / di
            break
    if t is None:
        return None
    if t < 0 or t > seg.ln:
        return None
    for pi, di, xi in zip(seg.p, seg.d, x):
        if pi + t * di != xi:
            return None
    return t


def _crossing(a: _Seg, b: _Seg):
    """Transversal intersection point of two segments, or None.

    Parallel segments return None; collinear overlap is resolved by splitting
    each segment at the other's endpoints instead.
    """
    n = len(a.p)
    for i in range(n):
        for j in range(i + 1, n):
            det = a.d[i] * (-b.d[j]) + b.d[i] * a.d[j]
            if det == 0:
                continue
            r1 = b.p[i] - a.p[i]
            r2 = b.p[j] - a.p[j]
            t = (r1 * (-b.d[j]) + b.d[i] * r2) / det
            s = (a.d[i] * r2 - a.d[j] * r1) / det
            if t < 0 or t > a.ln or s < 0 or s > b.ln:
                return None
            x = tuple(pi + t * di for pi, di in zip(a.p, a.d))
            y = tuple(pi + s * di for pi, di in zip(b.p, b.d))
            return x if x == y else None
    return None


@dataclass(frozen=True)
class ImageTree:
    """The image of the evaluation map, certified to be a metric tree.

    Nodes are named n0, n1, ... in coordinate order and edges t0, t1, ... by
    endpoint order; edge lengths equal the projective distance between the
    endpoint coordinates.  cells is a decomposition of the source aligned so
    that each refined edge maps onto exactly one tree edge (or a node), and
    assignments records that map as (tree edge, start, dir, stretch) tuples.
    """

    tree: Curve
    coords: dict
    cells: CellDecomposition
    assignments: dict


def _cell_coords(cd: CellDecomposition, eid: str):
    cell = cd.cells[eid]
    p = ProjPoint(cell.values).coords
    lam = cell.stretch
    if lam == 0:
        return p, None, Q(0)
    s0 = cell.slopes[0]
    d = tuple(Q(s - s0, lam) for s in cell.slopes)
    return p, d, lam * cell.length


def build_image_tree(system: GenSystem) -> ImageTree:
    """Construct the image tree of the evaluation map, or raise StarViolation.

    Only compact curves are supported: coordinates at points at infinity are
    not in tropical projective space in general.
    """
    if system.curve.has_unbounded_edge():
        raise TropError("image tree construction needs a compact curve")
    cd = cell_refine(system)

    # each cell must trace a tropical line segment: its direction takes at
    # most two values (pinning the first coordinate puts 0 among them)
    for eid in sorted(cd.cells):
        cell = cd.cells[eid]
        if len(set(cell.slopes)) > 2:
            raise StarViolation(
                "nonconvex",
                f"cell {eid} moves in direction {cell.slopes}, "
                "which is not a tropical segment direction",
                detail=cell,
            )

    segs = {}
    for eid in sorted(cd.cells):
        p, d, ln = _cell_coords(cd, eid)
        if d is not None:
            segs[eid] = _Seg(p, d, ln)
    if not segs:
        raise StarViolation("geomdim0", "the image is a single point")

    nodes = set()
    for seg in segs.values():
        nodes.add(seg.p)
        nodes.add(seg.q)
    seg_list = list(segs.values())
    for a, b in combinations(seg_list, 2):
        x = _crossing(a, b)
        if x is not None:
            nodes.add(x)

    # split every segment at every node sitting on it; identical sub-segments
    # (straight, equal endpoints) coincide and collapse in the pair set
    splits = {}
    pairs = {}
    for eid, seg in segs.items():
        ts = {Q(0), seg.ln}
        for x in nodes:
            t = _param_on(seg, x)
            if t is not None:
                ts.add(t)
        splits[eid] = sorted(ts)
        for t1, t2 in zip(splits[eid], splits[eid][1:]):
            a = tuple(pi + t1 * di for pi, di in zip(seg.p, seg.d))
            b = tuple(pi + t2 * di for pi, di in zip(seg.p, seg.d))
            key = (min(a, b), max(a, b))
            pairs[key] = t2 - t1

    node_list = sorted(nodes)
    name = {x: f"n{i}" for i, x in enumerate(node_list)}
    edge_defs = []
    for (a, b), ln in sorted(pairs.items()):
        edge_defs.append((name[a], name[b], ln, a, b))
    edge_defs.sort(key=lambda r: (int(r[0][1:]), int(r[1][1:])))

    edges = []
    edge_ends = {}
    for k, (na, nb, ln, a, b) in enumerate(edge_defs):
        tid = f"t{k}"
        assert proj_distance(ProjPoint(a), ProjPoint(b)) == ln
        edges.append(Edge(tid, na, nb, ln))
        edge_ends[tid] = (a, b)
    tree = Curve(list(name.values()), edges)
    if tree.b1 != 0:
        raise StarViolation(
            "cycle", f"the image has first Betti number {tree.b1}", detail=tree
        )

    # tropical convexity of the image: the tropical segment between any two
    # nodes must stay on the tree
    final_segs = [
        _Seg(a, tuple((bi - ai) / ln for ai, bi in zip(a, b)), ln)
        for (a, b), ln in pairs.items()
    ]
    if len(node_list) <= _PAIR_CHECK_CAP:
        for a, b in combinations(node_list, 2):
            for z in tropical_segment(ProjPoint(a), ProjPoint(b)):
                zc = z.coords
                if not any(_param_on(s, zc) is not None for s in final_segs):
                    raise StarViolation(
                        "nonconvex",
                        f"the tropical segment between {ProjPoint(a)} and "
                        f"{ProjPoint(b)} leaves the image at {z}",
                        detail=(a, b, zc),
                    )

    # align the source with the tree: cut each cell at the preimages of the
    # split points, so every final cell maps onto one tree edge
    extra: dict[str, set] = {}
    for eid, seg in segs.items():
        cell = cd.cells[eid]
        lam = cell.stretch
        interior = [t for t in splits[eid] if 0 < t < seg.ln]
        if not interior:
            continue
        for orig_edge, lo, _hi in _tile_of(cd.cmap, eid):
            for t in interior:
                extra.setdefault(orig_edge, set()).add(lo + t / lam)
            break
    aligned = cell_refine(system, extra_cuts=extra)

    pair_edge = {}
    for tid, (a, b) in edge_ends.items():
        pair_edge[(min(a, b), max(a, b))] = tid
    node_incident = {}
    for tid, (a, b) in sorted(edge_ends.items()):
        node_incident.setdefault(a, (tid, Q(0)))
        e = tree.edges[tid]
        node_incident.setdefault(b, (tid, e.length))

    assignments = {}
    for eid in sorted(aligned.cells):
        p, d, ln = _cell_coords(aligned, eid)
        lam = aligned.cells[eid].stretch
        if d is None:
            tid, off = node_incident[p]
            assignments[eid] = (tid, off, 1, 0)
            continue
        q = tuple(pi + ln * di for pi, di in zip(p, d))
        key = (min(p, q), max(p, q))
        tid = pair_edge.get(key)
        if tid is None:
            raise TropError(f"aligned cell {eid} does not map onto a tree edge")
        a, _b = edge_ends[tid]
        if p == a:
            assignments[eid] = (tid, Q(0), 1, lam)
        else:
            assignments[eid] = (tid, tree.edges[tid].length, -1, lam)

    coords = {name[x]: ProjPoint(x) for x in node_list}
    return ImageTree(tree, coords, aligned, assignments)


def _tile_of(cmap: CurveMap, dst_edge: str):
    """The (src_edge, lo, hi) tile a refined edge came from; occurs once."""
    for src_edge, tiles in cmap.tiles.items():
        for de, lo, hi in tiles:
            if de == dst_edge:
                yield (src_edge, lo, hi)


# -- the full certificate ----------------------------------------------------


@dataclass(frozen=True)
class StarCert:
    """Certificate that a system has rank one and a one-dimensional image."""

    system: GenSystem
    rank: RankCert
    image: ImageTree
    algdim: int
    geomdim: int


def certify_star(system: GenSystem) -> StarCert:
    """Minimize, then check rank one, then build the image tree.

    Raises StarViolation with kind "rank", "geomdim0", "cycle" or "nonconvex"
    when the system is not a star; the exception carries the failing point or
    structure in .detail.
    """
    sm = minimize_generators(system)
    rank = check_rank_one(sm)
    if not rank.ok:
        where = sm.curve.point_vertex(rank.point) or rank.point
        raise StarViolation(
            "rank",
            f"rank certificate fails at {where}: multiplicity {rank.value}",
            detail=rank,
        )
    image = build_image_tree(sm)
    return StarCert(sm, rank, image, len(sm.gens) - 1, 1)


# -- linear systems on trees -------------------------------------------------


def tree_linear_system(tree: Curve, div: Divisor) -> GenSystem:
    """Generators of the full linear system of a degree-1 divisor on a tree.

    The system is spanned by one function per leaf direction: the function
    that decreases at unit speed along the path toward that leaf.  All of them
    are transported from the canonical base point back to div by the
    equivalence witness, then minimized.
    """
    if tree.b1 != 0:
        raise TropError("linear system construction needs a tree")
    if div.degree != 1:
        raise TropError(f"divisor must have degree 1, got {div.degree}")
    q = canonical_base_point(tree)
    ok, w = linearly_equivalent(tree, div, Divisor.point(q))
    if not ok:
        raise TropError("degree-1 divisor not equivalent to a point on a tree")
    gens = [w]
    for y in tree.leaf_ends():
        if y == q:
            continue
        gens.append(_leaf_function(tree, q, y).add(w))
    return minimize_generators(GenSystem(tree, div, gens))


def _leaf_function(tree: Curve, q: Point, y: Point) -> PLFunction:
    """Minus the overlap length of the paths q->t and q->y, as a function of t.

    Affine on every edge with slope in {-1, 0, 1}: slope -1 exactly on the
    path from q to y.  In L((q)) with divisor (y) - (q).
    """
    from .functions import EdgeFunc

    c = tree
    infinite_leg = c.is_infinite_point(y)
    anchor = c.pt(y.edge, 0) if infinite_leg else y
    dqy = c.distance(q, anchor)
    vals = {}
    for v in c.vertices:
        if c.valency(v) == 0:
            continue
        pv = c.vertex_point(v)
        vals[v] = -(c.distance(q, pv) + dqy - c.distance(pv, anchor)) / 2
    per_edge = {}
    for eid, e in c.edges.items():
        start = vals[e.src]
        if not is_finite(e.length):
            slope = -1 if (infinite_leg and eid == y.edge) else 0
            per_edge[eid] = EdgeFunc(start, ((slope, INF),))
            continue
        num = vals[e.dst] - start
        slope = num / e.length
        assert slope.denominator == 1 and abs(slope) <= 1
        per_edge[eid] = EdgeFunc(start, ((int(slope), e.length),))
    return PLFunction(c, per_edge)
