"""Rational functions on tropical curves: continuous piecewise linear with
integer slopes, plus the distinguished constant -inf.

Per edge a function is (value at offset 0, ((slope, length), ...)) with the
lengths summing to the edge length; on an unbounded edge the final piece has
length +inf and its slope determines the limit at infinity.  Values at points
at infinity may be +-inf; everywhere else they are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .curves import Curve, CurveMap, HalfEdge, Point
from .divisors import Divisor
from .errors import ContinuityError, TropError
from .ratext import INF, NEG_INF, as_ext, as_q, is_finite

__all__ = [
    "EdgeFunc",
    "PLFunction",
    "evaluate",
    "order_at",
    "principal_divisor",
    "trop_combine",
    "truncate_below",
    "nonconstant_locus",
    "map_function",
]


@dataclass(frozen=True)
class EdgeFunc:
    """Restriction of a function to one edge, in start-value + pieces form."""

    start: Fraction
    pieces: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", as_q(self.start))
        ps = []
        for s, ln in self.pieces:
            if int(s) != s:
                raise TropError(f"non-integer slope {s}")
            ln = as_ext(ln)
            if is_finite(ln) and ln <= 0:
                raise TropError(f"non-positive piece length {ln}")
            if ps and ps[-1][0] == int(s):
                prev = ps.pop()
                merged = prev[1] + ln if is_finite(prev[1]) and is_finite(ln) else INF
                ps.append((int(s), merged))
            else:
                ps.append((int(s), ln))
        if not ps:
            raise TropError("edge function needs at least one piece")
        for s, ln in ps[:-1]:
            if not is_finite(ln):
                raise TropError("only the final piece may be infinite")
        object.__setattr__(self, "pieces", tuple(ps))

    @property
    def total(self):
        t = Fraction(0)
        for _s, ln in self.pieces:
            if not is_finite(ln):
                return INF
            t += ln
        return t

    def value(self, off):
        off = as_ext(off)
        if not is_finite(off):
            return self.limit()
        v = self.start
        rem = off
        for s, ln in self.pieces:
            if not is_finite(ln) or rem <= ln:
                return v + s * rem
            v += s * ln
            rem -= ln
        if rem == 0:
            return v
        raise TropError(f"offset {off} beyond edge")

    def end_value(self):
        """Value at the far end; only valid on finite edges."""
        v = self.start
        for s, ln in self.pieces:
            v += s * ln
        return v

    def limit(self):
        """Value at the point at infinity of an unbounded edge."""
        s = self.pieces[-1][0]
        if s > 0:
            return INF
        if s < 0:
            return NEG_INF
        v = self.start
        for sl, ln in self.pieces[:-1]:
            v += sl * ln
        return v

    def breakpoints(self):
        """Interior offsets where the slope changes."""
        out = []
        cum = Fraction(0)
        for _s, ln in self.pieces[:-1]:
            cum += ln
            out.append(cum)
        return out

    def slope_right(self, off):
        """Slope on [off, off+eps); off must be < total length."""
        cum = Fraction(0)
        for s, ln in self.pieces:
            hi = cum + ln if is_finite(ln) else INF
            if cum <= off < hi:
                return s
            cum = hi
        raise TropError(f"no right slope at {off}")

    def slope_left(self, off):
        """Slope on (off-eps, off]; off may be inf on unbounded edges."""
        cum = Fraction(0)
        for s, ln in self.pieces:
            hi = cum + ln if is_finite(ln) else INF
            if cum < off <= hi:
                return s
            cum = hi
        raise TropError(f"no left slope at {off}")

    def critical_values(self):
        """Values at offset 0 and after each finite piece."""
        out = [self.start]
        v = self.start
        for s, ln in self.pieces:
            if not is_finite(ln):
                break
            v += s * ln
            out.append(v)
        return out

    def slice(self, lo, hi) -> "EdgeFunc":
        """Restriction to [lo, hi] re-anchored at lo; hi may be inf."""
        lo = as_q(lo)
        hi = as_ext(hi)
        pieces = []
        cum = Fraction(0)
        for s, ln in self.pieces:
            nxt = cum + ln if is_finite(ln) else INF
            a = max(cum, lo)
            b = nxt if not is_finite(hi) else min(nxt, hi)
            if not is_finite(b) or a < b:
                ln2 = b - a if is_finite(b) else INF
                pieces.append((s, ln2))
            cum = nxt
            if is_finite(hi) and is_finite(cum) and cum >= hi:
                break
            if not is_finite(nxt):
                break
        return EdgeFunc(self.value(lo), tuple(pieces))


class PLFunction:
    """A rational function on a curve, or the constant -inf."""

    __slots__ = ("curve", "per_edge", "is_neg_inf")

    def __init__(self, curve: Curve, per_edge: dict, is_neg_inf: bool = False):
        self.curve = curve
        self.is_neg_inf = is_neg_inf
        if is_neg_inf:
            self.per_edge = {}
            return
        if set(per_edge) != set(curve.edges):
            raise TropError("function must cover every edge")
        for eid, ef in per_edge.items():
            if ef.total != curve.edges[eid].length:
                raise TropError(
                    f"pieces on edge {eid} cover {ef.total}, expected "
                    f"{curve.edges[eid].length}"
                )
        self.per_edge = dict(per_edge)
        self._check_continuity()

    def _check_continuity(self):
        for v in self.curve.vertices:
            vals = []
            for eid, sign in self.curve._ends[v]:
                ef = self.per_edge[eid]
                vals.append(ef.start if sign > 0 else ef.end_value())
            if vals and any(x != vals[0] for x in vals[1:]):
                raise ContinuityError(
                    f"values disagree at vertex {v}: "
                    + ", ".join(str(x) for x in vals)
                )

    @classmethod
    def constant(cls, curve: Curve, value) -> "PLFunction":
        if value == NEG_INF:
            return cls(curve, {}, is_neg_inf=True)
        value = as_q(value)
        return cls(
            curve,
            {eid: EdgeFunc(value, ((0, e.length),)) for eid, e in curve.edges.items()},
        )

    def value(self, p: Point):
        if self.is_neg_inf:
            return NEG_INF
        p = self.curve.pt(p.edge, p.offset)
        return self.per_edge[p.edge].value(p.offset)

    __call__ = value

    def germ_slope(self, h: HalfEdge) -> int:
        """Outgoing slope along a half-edge at its base point."""
        ef = self.per_edge[h.edge]
        base = _germ_base(self.curve, h)
        return ef.slope_right(base) if h.sign > 0 else -ef.slope_left(base)

    def breakpoint_points(self) -> list[Point]:
        out = set()
        for eid, ef in self.per_edge.items():
            for off in ef.breakpoints():
                out.add(self.curve.pt(eid, off))
        return sorted(out)

    def is_constant(self) -> bool:
        if self.is_neg_inf:
            return True
        return all(s == 0 for ef in self.per_edge.values() for s, _ in ef.pieces)

    # ordinary linear operations, used for witnesses and differences

    def add(self, other: "PLFunction") -> "PLFunction":
        return _linear(self, other, 1, 1)

    def sub(self, other: "PLFunction") -> "PLFunction":
        return _linear(self, other, 1, -1)

    def neg(self) -> "PLFunction":
        return self.scale(-1)

    def scale(self, k: int) -> "PLFunction":
        if self.is_neg_inf:
            raise TropError("cannot scale the constant -inf")
        return PLFunction(
            self.curve,
            {
                eid: EdgeFunc(k * ef.start, tuple((k * s, ln) for s, ln in ef.pieces))
                for eid, ef in self.per_edge.items()
            },
        )

    def shift(self, c) -> "PLFunction":
        if self.is_neg_inf:
            return self
        c = as_q(c)
        return PLFunction(
            self.curve,
            {eid: EdgeFunc(ef.start + c, ef.pieces) for eid, ef in self.per_edge.items()},
        )

    def __eq__(self, other):
        if not isinstance(other, PLFunction):
            return NotImplemented
        if self.is_neg_inf or other.is_neg_inf:
            return self.is_neg_inf and other.is_neg_inf
        return self.curve == other.curve and self.per_edge == other.per_edge

    __hash__ = None

    def __repr__(self):
        if self.is_neg_inf:
            return "PLFunction(-inf)"
        return f"PLFunction({len(self.per_edge)} edges)"


def _germ_base(curve: Curve, h: HalfEdge):
    if h.point.edge == h.edge and curve.point_vertex(h.point) is None:
        return h.point.offset
    return Fraction(0) if h.sign > 0 else curve.edges[h.edge].length


def _linear(f: PLFunction, g: PLFunction, kf: int, kg: int) -> PLFunction:
    if f.is_neg_inf or g.is_neg_inf:
        raise TropError("linear combination with the constant -inf")
    if f.curve != g.curve:
        raise TropError("functions on different curves")
    per = {}
    for eid in f.per_edge:
        a, b = f.per_edge[eid], g.per_edge[eid]
        per[eid] = _ef_linear(a, b, kf, kg)
    return PLFunction(f.curve, per)


def _ef_linear(a: EdgeFunc, b: EdgeFunc, ka: int, kb: int) -> EdgeFunc:
    pieces = []
    ia = ib = 0
    rema = a.pieces[0][1]
    remb = b.pieces[0][1]
    while True:
        sa = a.pieces[ia][0]
        sb = b.pieces[ib][0]
        slope = ka * sa + kb * sb
        if not is_finite(rema) and not is_finite(remb):
            pieces.append((slope, INF))
            break
        take = min(rema, remb)
        pieces.append((slope, take))
        rema = rema - take if is_finite(rema) else INF
        remb = remb - take if is_finite(remb) else INF
        if rema == 0:
            ia += 1
            if ia == len(a.pieces):
                break
            rema = a.pieces[ia][1]
        if remb == 0:
            ib += 1
            if ib == len(b.pieces):
                break
            remb = b.pieces[ib][1]
    return EdgeFunc(ka * a.start + kb * b.start, tuple(pieces))


# -- pointwise evaluation API ----------------------------------------------


def evaluate(f: PLFunction, p: Point):
    return f.value(p)


def order_at(f: PLFunction, p: Point) -> int:
    """Sum of outgoing slopes at p (at infinity: minus the eventual slope)."""
    if f.is_neg_inf:
        raise TropError("order of the constant -inf is undefined")
    return sum(f.germ_slope(h) for h in f.curve.half_edges(p))


def principal_divisor(f: PLFunction) -> Divisor:
    """div(f), supported on vertices, breakpoints and points at infinity."""
    if f.is_neg_inf:
        raise TropError("div of the constant -inf is undefined")
    c = f.curve
    candidates = set()
    for v in c.vertices:
        if v in c._vcanon:
            candidates.add(c.vertex_point(v))
    candidates.update(f.breakpoint_points())
    candidates.update(c.infinite_ends())
    entries = []
    for p in candidates:
        o = order_at(f, p)
        if o:
            entries.append((p, o))
    d = Divisor(entries)
    assert d.degree == 0, f"principal divisor has degree {d.degree}"
    return d


# -- tropical operations ----------------------------------------------------


def trop_combine(coeffs, fns) -> PLFunction:
    """Pointwise max of a_i + f_i; -inf coefficients drop their term."""
    fns = list(fns)
    coeffs = [as_ext(a) for a in coeffs]
    if len(coeffs) != len(fns):
        raise TropError("coefficient/function count mismatch")
    if not fns:
        raise TropError("empty combination")
    if all(a == NEG_INF for a in coeffs):
        raise TropError("all coefficients are -inf")
    curve = fns[0].curve
    for f in fns:
        if f.curve != curve:
            raise TropError("functions on different curves")
    terms = [
        (a, f) for a, f in zip(coeffs, fns) if a != NEG_INF and not f.is_neg_inf
    ]
    if not terms:
        return PLFunction.constant(curve, NEG_INF)
    per = {}
    for eid, e in curve.edges.items():
        per[eid] = _envelope([(a, f.per_edge[eid]) for a, f in terms], e.length)
    return PLFunction(curve, per)


def _envelope(terms, length) -> EdgeFunc:
    """Upper envelope of finitely many shifted edge functions on one edge."""
    cuts = set()
    for _a, ef in terms:
        cuts.update(ef.breakpoints())
    bounds = [Fraction(0)] + sorted(cuts) + [length]
    refined = [Fraction(0)]
    for i in range(len(bounds) - 1):
        u1, u2 = bounds[i], bounds[i + 1]
        lines = [
            (a + ef.value(u1), ef.slope_right(u1)) for a, ef in terms
        ]
        inner = set()
        for j in range(len(lines)):
            vj, sj = lines[j]
            for k in range(j + 1, len(lines)):
                vk, sk = lines[k]
                if sj == sk:
                    continue
                t = u1 + Fraction(vk - vj, sj - sk)
                if t > u1 and (not is_finite(u2) or t < u2):
                    inner.add(t)
        refined.extend(sorted(inner))
        refined.append(u2)
    pieces = []
    for i in range(len(refined) - 1):
        u1, u2 = refined[i], refined[i + 1]
        mid = (u1 + u2) / 2 if is_finite(u2) else u1 + 1
        best_v = None
        best_s = None
        for a, ef in terms:
            v = a + ef.value(mid)
            s = ef.slope_right(mid)
            if best_v is None or v > best_v or (v == best_v and s > best_s):
                best_v, best_s = v, s
        ln = u2 - u1 if is_finite(u2) else INF
        pieces.append((best_s, ln))
    start = max(a + ef.value(Fraction(0)) for a, ef in terms)
    out = EdgeFunc(start, tuple(pieces))
    # the envelope of continuous pieces must be continuous; verify at cuts
    for u in refined[1:-1] if is_finite(length) else refined[1:]:
        if is_finite(u):
            want = max(a + ef.value(u) for a, ef in terms)
            got = out.value(u)
            assert got == want, f"envelope discontinuity at {u}"
    return out


def truncate_below(f: PLFunction, a) -> PLFunction:
    """max(f, a); a = +inf gives the constant 0, a = -inf gives f back."""
    a = as_ext(a)
    if a == INF:
        return PLFunction.constant(f.curve, 0)
    if a == NEG_INF:
        return f
    return trop_combine([Fraction(0), a], [f, PLFunction.constant(f.curve, 0)])


def nonconstant_locus(f: PLFunction) -> list[tuple]:
    """Closed spans (edge, lo, hi) where f has nonzero slope."""
    if f.is_neg_inf:
        return []
    out = []
    for eid in sorted(f.per_edge):
        cur = None
        cum = Fraction(0)
        for s, ln in f.per_edge[eid].pieces:
            hi = cum + ln if is_finite(ln) else INF
            if s != 0:
                if cur is not None and cur[1] == cum:
                    cur = (cur[0], hi)
                else:
                    if cur is not None:
                        out.append((eid, cur[0], cur[1]))
                    cur = (cum, hi)
            cum = hi
        if cur is not None:
            out.append((eid, cur[0], cur[1]))
    return out


def map_function(m: CurveMap, f: PLFunction) -> PLFunction:
    """Transport f along a subdivision map (isometric on each tile)."""
    if f.is_neg_inf:
        return PLFunction.constant(m.dst, NEG_INF)
    per = {}
    for eid, ef in f.per_edge.items():
        for dst_edge, lo, hi in m.tiles[eid]:
            per[dst_edge] = ef.slice(lo, hi)
    return PLFunction(m.dst, per)
