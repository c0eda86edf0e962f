"""Linear equivalence of divisors via reduced forms.

Two divisors are equivalent iff their difference is principal.  We compute
q-reduced representatives by chip firing on a common refinement lattice: with
N the lcm of all denominators in play, every witness function may be taken
linear between lattice points (its breakpoints lie in supp(div f) and at
vertices), so the metric problem collapses to the combinatorial one.  Firing
counts divided by N give back the witness as a PLFunction.

Chips on unbounded edges are first slid to the ray base with explicit
witnesses; a witness that is constant on every ray always suffices once that
is done.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm

from .curves import Curve, Point, canonical_base_point
from .divisors import Divisor
from .errors import TropError
from .functions import INF, EdgeFunc, PLFunction, principal_divisor
from .ratext import is_finite

__all__ = ["reduced_divisor", "linearly_equivalent"]

MAX_LATTICE = 500_000


def _slide_rays(c: Curve, D: Divisor):
    """Move chips off unbounded edges to their base vertices.

    Returns (D', g) with D + div(g) = D'; g is c * min(t, u) per chip.
    """
    g = PLFunction.constant(c, 0)
    entries = []
    moved = False
    for p, k in D.items():
        e = c.edges[p.edge]
        if is_finite(e.length) or c.point_vertex(p) is not None:
            entries.append((p, k))
            continue
        moved = True
        base = c.pt(p.edge, 0)
        entries.append((base, k))
        if is_finite(p.offset):
            pieces = ((k, p.offset), (0, INF))
        else:
            pieces = ((k, INF),)
        per = {
            eid: EdgeFunc(Fraction(0), pieces if eid == p.edge else ((0, ee.length),))
            for eid, ee in c.edges.items()
        }
        g = g.add(PLFunction(c, per))
    if not moved:
        return D, g
    out: dict = {}
    for p, k in entries:
        out[p] = out.get(p, 0) + k
    return Divisor(out), g


class _Lattice:
    """Common refinement of the finite part with unit segments of length 1/N."""

    def __init__(self, c: Curve, divisors):
        self.c = c
        dens = [1]
        for e in c.edges.values():
            if is_finite(e.length):
                dens.append(e.length.denominator)
        for D in divisors:
            for p, _k in D.items():
                if is_finite(p.offset):
                    dens.append(p.offset.denominator)
        self.N = lcm(*dens)
        total = sum(
            int(e.length * self.N)
            for e in c.edges.values()
            if is_finite(e.length)
        )
        if total > MAX_LATTICE:
            raise TropError(
                f"refusing equivalence lattice with {total} segments; "
                "denominators too fine"
            )
        self.adj: dict = {}
        finite_vs = [v for v in c.vertices if c._ends[v]]
        for v in finite_vs:
            self.adj[v] = []
        self.segments: dict = {}
        for eid, e in c.edges.items():
            if not is_finite(e.length):
                continue
            n = int(e.length * self.N)
            nodes = [e.src] + [(eid, k) for k in range(1, n)] + [e.dst]
            self.segments[eid] = nodes
            for a, b in zip(nodes, nodes[1:]):
                self.adj.setdefault(a, []).append(b)
                self.adj.setdefault(b, []).append(a)

    def node_of(self, p: Point):
        v = self.c.point_vertex(p)
        if v is not None:
            return v
        k = p.offset * self.N
        assert k.denominator == 1
        return (p.edge, int(k))

    def point_of(self, node) -> Point:
        if isinstance(node, tuple):
            eid, k = node
            return self.c.pt(eid, Fraction(k, self.N))
        return self.c.vertex_point(node)

    def chips(self, D: Divisor) -> dict:
        out = {n: 0 for n in self.adj}
        for p, k in D.items():
            out[self.node_of(p)] += k
        return out

    def bfs_order(self, q):
        dist = {q: 0}
        order = [q]
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            for w in self.adj[v]:
                if w not in dist:
                    dist[w] = dist[v] + 1
                    order.append(w)
        assert len(order) == len(self.adj), "finite part disconnected"
        return dist, order

    def function_from(self, sigma: dict) -> PLFunction:
        per = {}
        for eid, e in self.c.edges.items():
            if not is_finite(e.length):
                src_val = Fraction(sigma.get(e.src, 0), self.N)
                per[eid] = EdgeFunc(src_val, ((0, INF),))
                continue
            nodes = self.segments[eid]
            start = Fraction(sigma.get(nodes[0], 0), self.N)
            pieces = tuple(
                (sigma.get(b, 0) - sigma.get(a, 0), Fraction(1, self.N))
                for a, b in zip(nodes, nodes[1:])
            )
            per[eid] = EdgeFunc(start, pieces)
        return PLFunction(self.c, per)


def _reduce_on_lattice(lat: _Lattice, chips: dict, q):
    """Dhar reduction; returns (reduced chips, firing counts sigma)."""
    D = dict(chips)
    sigma = {n: 0 for n in D}
    dist, _order = lat.bfs_order(q)

    # clear debt: walk nodes far to near, firing the ball of closer nodes
    for v in sorted((v for v in D if v != q), key=lambda v: -dist[v]):
        if D[v] >= 0:
            continue
        ball = {w for w in D if dist[w] < dist[v]}
        into = sum(1 for w in lat.adj[v] if w in ball)
        k = (-D[v] + into - 1) // into
        for u in ball:
            sigma[u] += k
            for w in lat.adj[u]:
                if w not in ball:
                    D[u] -= k
                    D[w] += k

    # burning loop
    guard = 0
    while True:
        guard += 1
        assert guard < 10_000_000, "burning loop failed to terminate"
        burnt = {q}
        threat = {n: 0 for n in D}
        stack = [q]
        while stack:
            u = stack.pop()
            for w in lat.adj[u]:
                if w in burnt:
                    continue
                threat[w] += 1
                if threat[w] > D[w]:
                    burnt.add(w)
                    stack.append(w)
        if len(burnt) == len(D):
            return D, sigma
        unburnt = [v for v in D if v not in burnt]
        for u in unburnt:
            sigma[u] += 1
            for w in lat.adj[u]:
                if w in burnt:
                    D[u] -= 1
                    D[w] += 1


def reduced_divisor(c: Curve, D: Divisor, q: Point | None = None):
    """The q-reduced representative R of D's class, with witness w such that
    D + div(w) = R (w constant on unbounded edges, w(q) = 0)."""
    if q is None:
        q = canonical_base_point(c)
    q = c.pt(q.edge, q.offset)
    if not is_finite(q.offset) or (
        not is_finite(c.edges[q.edge].length) and c.point_vertex(q) is None
    ):
        raise TropError("base point must lie in the finite part")
    D1, g = _slide_rays(c, D)
    lat = _Lattice(c, [D1, Divisor.point(q)])
    qn = lat.node_of(q)
    red, sigma = _reduce_on_lattice(lat, lat.chips(D1), qn)
    w = g.add(lat.function_from(sigma))
    w = w.shift(-w.value(q))
    R = Divisor([(lat.point_of(n), k) for n, k in red.items() if k])
    assert D + principal_divisor(w) == R
    return R, w


def linearly_equivalent(c: Curve, D1: Divisor, D2: Divisor):
    """Decide D1 ~ D2; on success also return w with D1 + div(w) = D2.

    A degree mismatch is a plain False, not an error.
    """
    if D1.degree != D2.degree:
        return False, None
    if D1 == D2:
        return True, PLFunction.constant(c, 0)
    q = canonical_base_point(c)
    A1, g1 = _slide_rays(c, D1)
    A2, g2 = _slide_rays(c, D2)
    lat = _Lattice(c, [A1, A2])
    qn = lat.node_of(q)
    r1, s1 = _reduce_on_lattice(lat, lat.chips(A1), qn)
    r2, s2 = _reduce_on_lattice(lat, lat.chips(A2), qn)
    if r1 != r2:
        return False, None
    w = g1.add(lat.function_from(s1)).sub(lat.function_from(s2)).sub(g2)
    w = w.shift(-w.value(q))
    assert D1 + principal_divisor(w) == D2
    return True, w
