"""From a certified linear system to a finite harmonic morphism and back.

The forward direction finds the indeterminacy points of the evaluation map,
grafts the missing subtrees onto the curve, and extends the evaluation map to
a finite harmonic morphism onto the image tree, certifying every step.  The
inverse direction pulls the full linear system of a point on the tree back
through the morphism and pushes it down the retraction.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

from .curves import Curve, Edge, GraftSpec, Point, canonical_base_point, refine
from .divisors import Divisor, map_divisor
from .equivalence import linearly_equivalent
from .errors import MorphismError, NotHarmonicError, TropError
from .functions import map_function
from .morphisms import (
    EdgeMap,
    Modification,
    Morphism,
    global_degree,
    harmonic_failures,
    local_degree,
    make_modification,
    pull_divisor,
    pull_function,
    push_divisor,
    push_function,
    retraction_of,
    validate_morphism,
)
from .ratext import Q, is_finite
from .systems import (
    GenSystem,
    StarCert,
    certify_star,
    divisor_at,
    maximal_representation,
    minimize_generators,
    tree_linear_system,
)


def phi_morphism(cert: StarCert) -> Morphism:
    """The evaluation map as a morphism from the aligned curve to its image."""
    maps = {
        eid: EdgeMap(te, start, d, lam)
        for eid, (te, start, d, lam) in cert.image.assignments.items()
    }
    return Morphism(cert.image.cells.refined.curve, cert.image.tree, maps)


# -- indeterminacy -----------------------------------------------------------


def _aligned_vertices(cert: StarCert) -> list[Point]:
    rc = cert.image.cells.refined.curve
    pts = {rc.pt(e.id, 0) for e in rc.edges.values()}
    pts |= {rc.pt(e.id, e.length) for e in rc.edges.values() if is_finite(e.length)}
    return sorted(pts)


def _indeterminacy(cert: StarCert) -> list[tuple[Point, int]]:
    """(p, D_p(p)) for ambiguous points p, in aligned-curve coordinates.

    Every cell endpoint is scanned; leaf-end preimages are among them because
    the cell decomposition is aligned with the image tree.
    """
    refined = cert.image.cells.refined
    scan = {y: divisor_at(refined, y) for y in _aligned_vertices(cert)}
    cand = set()
    for d in scan.values():
        cand.update(d.support())
    out = []
    for p in sorted(cand):
        dp = divisor_at(refined, p)
        if any(d.coeff(p) >= 1 and d != dp for d in scan.values()):
            out.append((p, dp.coeff(p)))
    return out


def indeterminacy_set(system: GenSystem) -> list[tuple[Point, int]]:
    """Points whose assigned divisor depends on the sample point, with their
    self-multiplicities, in original-curve coordinates."""
    cert = certify_star(system)
    cells = cert.image.cells
    return [(cells.to_original(p), m) for p, m in _indeterminacy(cert)]


# -- grafted subtrees --------------------------------------------------------


@dataclass(frozen=True)
class PlannedGraft:
    """T_{p,n}: the image of the region where p keeps multiplicity >= n.

    tree is None for a singleton region (nothing to graft).  edge_origin maps
    each subtree edge id to (image tree edge, image offset of its 0 end).
    """

    host: Point
    host_aligned: Point
    level: int
    tree: Curve | None
    attach: Point | None
    edge_origin: dict | None


def _p_refined(cert: StarCert, p: Point):
    """Refine the aligned curve so x -> D_x(p) is constant on open cells.

    Cuts where some difference g_i - g_j crosses its value at p; within the
    resulting cells the set of generators active at p is constant.
    """
    refined = cert.image.cells.refined
    rc = refined.curve
    pvals = [g.value(p) for g in refined.gens]
    n = len(refined.gens)
    cuts: dict[str, set] = {}
    for eid, e in rc.edges.items():
        vals = [g.per_edge[eid].start for g in refined.gens]
        slopes = [g.per_edge[eid].pieces[0][0] for g in refined.gens]
        for i in range(n):
            for j in range(i + 1, n):
                ds = slopes[i] - slopes[j]
                if ds == 0:
                    continue
                t = (pvals[i] - pvals[j] - vals[i] + vals[j]) / ds
                if 0 < t < e.length:
                    cuts.setdefault(eid, set()).add(t)
    rc2, cmap2 = refine(rc, {k: sorted(v) for k, v in cuts.items()})
    gens2 = tuple(map_function(cmap2, g) for g in refined.gens)
    base2 = map_divisor(cmap2, refined.base)
    return GenSystem(rc2, base2, gens2), cmap2


def _image_location(cert: StarCert, p: Point):
    """(tree edge, offset) address of the image of an aligned-curve point."""
    rc = cert.image.cells.refined.curve
    p = rc.pt(p.edge, p.offset)
    if rc.point_vertex(p) is None:
        te, start, d, lam = cert.image.assignments[p.edge]
        return te, start + d * lam * p.offset
    h = rc.half_edges(p)[0]
    te, start, d, lam = cert.image.assignments[h.edge]
    t = Q(0) if h.sign > 0 else rc.edges[h.edge].length
    return te, start + d * lam * t


def _subtree_curve(tree: Curve, merged: dict, attach_te: str, attach_off):
    """Assemble the region image as its own curve and locate the attach point.

    merged: image tree edge -> list of disjoint (a, b) offset intervals.
    Interval endpoints at tree nodes share the node's name, so pieces on
    different edges join up exactly where the image tree joins them.
    """

    def vname(te, off):
        e = tree.edges[te]
        if off == 0:
            return e.src
        if off == e.length:
            return e.dst
        return f"{te}:{off}"

    pieces = []
    verts = set()
    for te in sorted(merged):
        full = len(merged[te]) == 1 and merged[te][0] == (0, tree.edges[te].length)
        for k, (a, b) in enumerate(merged[te]):
            eid = te if full else f"{te}.{k}"
            na, nb = vname(te, a), vname(te, b)
            pieces.append((eid, te, a, b, na, nb))
            verts.update((na, nb))
    curve = Curve(sorted(verts), [Edge(eid, na, nb, b - a) for eid, _te, a, b, na, nb in pieces])

    tp = tree.pt(attach_te, attach_off)
    v = tree.point_vertex(tp)
    attach = None
    for eid, te, a, b, na, nb in pieces:
        if v is not None:
            if vname(te, a) == v:
                attach = curve.pt(eid, 0)
                break
            if vname(te, b) == v:
                attach = curve.pt(eid, b - a)
                break
        elif te == tp.edge and a <= tp.offset <= b:
            attach = curve.pt(eid, tp.offset - a)
            break
    if attach is None:
        raise TropError("region image does not contain the image of its own point")
    origin = {eid: (te, a) for eid, te, a, _b, _na, _nb in pieces}
    return curve, attach, origin


def _graft_plan(cert: StarCert) -> list[PlannedGraft]:
    plan = []
    cells = cert.image.cells
    for p, mult in _indeterminacy(cert):
        sys2, cmap2 = _p_refined(cert, p)
        rc2 = sys2.curve
        p2 = cmap2.point(p)
        parent = {}
        for src_eid, tiles in cmap2.tiles.items():
            for sub, lo, hi in tiles:
                parent[sub] = (src_eid, lo, hi)
        # constant multiplicity of p in D_x for x inside each cell
        dval = {}
        for eid, e in rc2.edges.items():
            mid = Point(eid, e.length / 2)
            dval[eid] = divisor_at(sys2, mid).coeff(p2)
        attach_te, attach_off = _image_location(cert, p)
        for n in range(1, mult + 1):
            spans: dict[str, list] = {}
            for eid in sorted(dval):
                if dval[eid] < n:
                    continue
                src_eid, lo, hi = parent[eid]
                te, start, d, lam = cert.image.assignments[src_eid]
                o1 = start + d * lam * lo
                o2 = start + d * lam * hi
                spans.setdefault(te, []).append((min(o1, o2), max(o1, o2)))
            merged = {}
            for te, ivs in spans.items():
                ivs.sort()
                acc = [list(ivs[0])]
                for a, b in ivs[1:]:
                    if a <= acc[-1][1]:
                        acc[-1][1] = max(acc[-1][1], b)
                    else:
                        acc.append([a, b])
                merged[te] = [(a, b) for a, b in acc]
            host = cells.to_original(p)
            if not merged:
                plan.append(PlannedGraft(host, p, n, None, None, None))
                continue
            tree, attach, origin = _subtree_curve(
                cert.image.tree, merged, attach_te, attach_off
            )
            plan.append(PlannedGraft(host, p, n, tree, attach, origin))
    return plan


def build_graft_trees(system: GenSystem) -> list[GraftSpec]:
    """The non-singleton trees T_{p,n}, hosted at original-curve points."""
    cert = certify_star(system)
    return [
        GraftSpec(pg.host, pg.tree, pg.attach)
        for pg in _graft_plan(cert)
        if pg.tree is not None
    ]


# -- the witness morphism ----------------------------------------------------


@dataclass(frozen=True)
class WitnessBundle:
    """Everything the forward construction produces, ready to verify.

    curve is the modification (aligned curve plus grafted trees), phi the
    finite harmonic morphism onto target, retraction the degree-one map back
    to the aligned curve.  certificate holds the verified facts.
    """

    system: GenSystem
    cert: StarCert
    indeterminacy: tuple
    plan: tuple
    mod: Modification
    curve: Curve
    retraction: Morphism
    target: Curve
    phi: Morphism
    degree: int
    certificate: dict


def construct_witness(system: GenSystem) -> WitnessBundle:
    """Certify the system, graft the indeterminacy subtrees, and extend the
    evaluation map to a finite harmonic morphism of degree deg(base)."""
    cert = certify_star(system)
    plan = _graft_plan(cert)
    cells = cert.image.cells
    indet = [(cells.to_original(p), m) for p, m in _indeterminacy(cert)]

    rc = cells.refined.curve
    planned = [pg for pg in plan if pg.tree is not None]
    specs = [GraftSpec(pg.host_aligned, pg.tree, pg.attach) for pg in planned]
    mod = make_modification(rc, specs)
    gcurve = mod.curve

    maps = {}
    for eid, (te, start, d, lam) in cert.image.assignments.items():
        for sub, lo, _hi in mod.grafted.embed.tiles[eid]:
            maps[sub] = EdgeMap(te, start + d * lam * lo, d, lam)
    for pg, prefix, geids in zip(planned, mod.grafted.prefixes, mod.grafted.graft_edges):
        for ge in sorted(geids):
            local = ge[len(prefix) :]
            te, a = pg.edge_origin[local]
            maps[ge] = EdgeMap(te, a, 1, 1)
    phi_t = Morphism(gcurve, cert.image.tree, maps)
    pi = retraction_of(mod)

    record: dict = {}
    rep = validate_morphism(phi_t)
    if not rep.ok:
        raise TropError(f"witness map is not a morphism: {rep.problems[0]}")
    if not rep.is_finite:
        raise TropError("witness map is not finite")
    record["finite_morphism"] = True
    bad = harmonic_failures(phi_t)
    if bad:
        f = bad[0]
        raise TropError(f"witness map not harmonic at {f.point}: sums {f.sums}")
    record["harmonic"] = True
    at_indet = []
    for p, m in indet:
        pa = next(pg.host_aligned for pg in plan if pg.host == p)
        ptilde = mod.grafted.embed.point(pa)
        ld = local_degree(phi_t, ptilde)
        if not ld.ok or ld.value != m:
            raise TropError(
                f"local degree at indeterminacy point {p} is {ld.value}, expected {m}"
            )
        at_indet.append((p, ld.value))
    record["indeterminacy_degrees"] = tuple(at_indet)
    d = global_degree(phi_t)
    if d != system.degree:
        raise TropError(f"witness degree {d} != system degree {system.degree}")
    record["degree"] = d
    if gcurve.b1 != system.curve.b1:
        raise TropError("grafting changed the first Betti number")
    record["b1_preserved"] = True

    return WitnessBundle(
        system=cert.system,
        cert=cert,
        indeterminacy=tuple(indet),
        plan=tuple(plan),
        mod=mod,
        curve=gcurve,
        retraction=pi,
        target=cert.image.tree,
        phi=phi_t,
        degree=d,
        certificate=record,
    )


# -- the inverse construction ------------------------------------------------


def system_from_maps(
    original: Curve, pi: Morphism, phi_t: Morphism, tree: Curve, div: Divisor
) -> GenSystem:
    """Push the pulled-back linear system of a degree-1 tree divisor down the
    retraction pi; the result is a certified system of degree deg(phi)."""
    if tree.b1 != 0:
        raise TropError("target must be a tree")
    if div.degree != 1:
        raise TropError(f"tree divisor must have degree 1, got {div.degree}")
    if phi_t.dst != tree:
        raise TropError("morphism target differs from the given tree")
    if pi.src != phi_t.src:
        raise TropError("retraction and morphism have different sources")
    if pi.dst != original:
        raise TropError("retraction target differs from the base curve")
    if not phi_t.is_finite_morphism():
        raise MorphismError("witness morphism must be finite")
    bad = harmonic_failures(phi_t)
    if bad:
        raise NotHarmonicError(f"witness morphism not harmonic at {bad[0].point}")
    if global_degree(pi) != 1:
        raise MorphismError("retraction must have degree 1")
    span = tree_linear_system(tree, div)
    base = push_divisor(pi, pull_divisor(phi_t, div))
    gens = [push_function(pi, pull_function(phi_t, g)) for g in span.gens]
    out = minimize_generators(GenSystem(original, base, gens))
    d = global_degree(phi_t)
    assert out.degree == d, "pushed base degree must equal the morphism degree"
    certify_star(out)
    return out


def system_from_witness(
    mod: Modification, phi_t: Morphism, tree: Curve, div: Divisor
) -> GenSystem:
    """system_from_maps with the retraction derived from the modification."""
    if phi_t.src != mod.curve:
        raise TropError("morphism source differs from the modification")
    return system_from_maps(mod.original, retraction_of(mod), phi_t, tree, div)


# -- round trips -------------------------------------------------------------


@dataclass(frozen=True)
class SameSystemReport:
    ok: bool
    reason: str | None = None


def same_system(s1: GenSystem, s2: GenSystem) -> SameSystemReport:
    """Do the systems generate the same subsemimodule, after moving along the
    equivalence witness between their bases?"""
    if s1.curve != s2.curve:
        return SameSystemReport(False, "different curves")
    if s1.degree != s2.degree:
        return SameSystemReport(False, f"degrees differ: {s1.degree} vs {s2.degree}")
    ok, w = linearly_equivalent(s1.curve, s1.base, s2.base)
    if not ok:
        return SameSystemReport(False, "base divisors are not equivalent")
    for i, g in enumerate(s2.gens):
        if not maximal_representation(g.add(w), s1).equality:
            return SameSystemReport(False, f"generator {i} of the second system escapes the first")
    for i, g in enumerate(s1.gens):
        if not maximal_representation(g.sub(w), s2).equality:
            return SameSystemReport(False, f"generator {i} of the first system escapes the second")
    return SameSystemReport(True)


def trees_isometric(t1: Curve, t2: Curve) -> bool:
    """Isometry of compact metric trees via leaf distance matrices."""
    for t in (t1, t2):
        if t.b1 != 0:
            raise TropError("isometry test expects trees")
        if t.has_unbounded_edge():
            raise TropError("isometry test expects compact trees")
    l1 = t1.leaf_ends()
    l2 = t2.leaf_ends()
    if len(l1) != len(l2):
        return False
    if t1.total_finite_length() != t2.total_finite_length():
        return False
    d1 = [[t1.distance(a, b) for b in l1] for a in l1]
    d2 = [[t2.distance(a, b) for b in l2] for a in l2]
    n = len(l1)
    for perm in permutations(range(n)):
        if all(d1[i][j] == d2[perm[i]][perm[j]] for i in range(n) for j in range(n)):
            return True
    return False


@dataclass(frozen=True)
class RoundTrip:
    ok: bool
    direction: str
    degree: int
    detail: object


def roundtrip_system(system: GenSystem) -> RoundTrip:
    """system -> witness -> system; compares semimodules on the aligned curve."""
    wb = construct_witness(system)
    div = Divisor.point(canonical_base_point(wb.target))
    recovered = system_from_witness(wb.mod, wb.phi, wb.target, div)
    transported = wb.cert.image.cells.refined
    same = same_system(transported, recovered)
    return RoundTrip(same.ok, "system", wb.degree, same)


def roundtrip_maps(
    original: Curve,
    pi: Morphism,
    phi_t: Morphism,
    tree: Curve,
    div: Divisor | None = None,
) -> RoundTrip:
    """witness -> system -> witness; degrees match and targets are isometric."""
    if div is None:
        div = Divisor.point(canonical_base_point(tree))
    system = system_from_maps(original, pi, phi_t, tree, div)
    wb = construct_witness(system)
    d1 = global_degree(phi_t)
    iso = trees_isometric(tree, wb.target)
    ok = d1 == wb.degree and iso
    return RoundTrip(ok, "witness", wb.degree, {"degrees": (d1, wb.degree), "isometric": iso})


def roundtrip_witness(
    mod: Modification, phi_t: Morphism, tree: Curve, div: Divisor | None = None
) -> RoundTrip:
    if phi_t.src != mod.curve:
        raise TropError("morphism source differs from the modification")
    return roundtrip_maps(mod.original, retraction_of(mod), phi_t, tree, div)


def roundtrip_check(obj, *args) -> RoundTrip:
    """Dispatch: a GenSystem runs the system direction, a WitnessBundle (or an
    explicit (mod, phi, tree) triple) the witness direction."""
    if isinstance(obj, GenSystem):
        return roundtrip_system(obj)
    if isinstance(obj, WitnessBundle):
        return roundtrip_witness(obj.mod, obj.phi, obj.target)
    if isinstance(obj, Modification) and len(args) == 2:
        return roundtrip_witness(obj, args[0], args[1])
    raise TropError("expected a GenSystem, a WitnessBundle, or (mod, phi, tree)")
