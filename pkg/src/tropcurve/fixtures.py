"""Shared example curves, systems and morphisms.

Every function returns fresh objects so tests can mutate nothing shared.
SEG2 is a segment of length 2, CIRC4 a circle of circumference 4, THETA two
vertices joined by three unit edges, STAR3 a 3-leg star with legs 1/2, and
TAIL a circle of circumference 2 with a unit tail hanging at the halfway
point.  Circle fixtures come with a parametrization helper measuring arc
length from the base vertex.
"""

from __future__ import annotations

from .curves import Curve, Edge, Point, refine
from .divisors import Divisor
from .functions import EdgeFunc, PLFunction
from .morphisms import EdgeMap, Modification, Morphism, trivial_modification
from .ratext import Q
from .systems import GenSystem


# -- SEG2 --------------------------------------------------------------------


def seg2() -> Curve:
    return Curve(["A", "B"], [Edge("e1", "A", "B", 2)])


def seg2_system() -> GenSystem:
    """Base (A), generators {0, -t}: the degree-1 system of a segment."""
    c = seg2()
    neg_t = PLFunction(c, {"e1": EdgeFunc(0, ((-1, Q(2)),))})
    return GenSystem(c, Divisor.point(c.pt("e1", 0)), [PLFunction.constant(c, 0), neg_t])


def seg2_degenerate() -> GenSystem:
    """Base (A), single generator {0}; fails the rank check at B."""
    c = seg2()
    return GenSystem(c, Divisor.point(c.pt("e1", 0)), [PLFunction.constant(c, 0)])


def seg2_double() -> GenSystem:
    """Base 2(A), generators {0, -t}: one point of multiplicity two."""
    c = seg2()
    neg_t = PLFunction(c, {"e1": EdgeFunc(0, ((-1, Q(2)),))})
    return GenSystem(
        c, Divisor.point(c.pt("e1", 0), 2), [PLFunction.constant(c, 0), neg_t]
    )


# -- CIRC4 -------------------------------------------------------------------


def circ4() -> Curve:
    return Curve(["v0", "v2"], [Edge("a", "v0", "v2", 2), Edge("b", "v2", "v0", 2)])


def circ4_point(c: Curve, x) -> Point:
    """Point at arc length x from v0, walking a then b."""
    x = Q(x) % 4
    return c.pt("a", x) if x <= 2 else c.pt("b", x - 2)


def circ4_fold_system() -> GenSystem:
    """Base 2(v0), generators {0, -min(x, 4-x)}: the fold onto a segment."""
    c = circ4()
    f1 = PLFunction(
        c,
        {
            "a": EdgeFunc(0, ((-1, Q(2)),)),
            "b": EdgeFunc(-2, ((1, Q(2)),)),
        },
    )
    return GenSystem(
        c, Divisor.point(c.pt("a", 0), 2), [PLFunction.constant(c, 0), f1]
    )


def circ4_fold() -> tuple[Modification, Morphism, Curve]:
    """The 2-to-1 fold of CIRC4 onto a segment of length 2."""
    mod = trivial_modification(circ4())
    target = Curve(["T0", "T2"], [Edge("s", "T0", "T2", 2)])
    fold = Morphism(
        mod.curve,
        target,
        {"a": EdgeMap("s", 0, 1, 1), "b": EdgeMap("s", 2, -1, 1)},
    )
    return mod, fold, target


# -- THETA and STAR3 ---------------------------------------------------------


def theta() -> Curve:
    return Curve(
        ["u", "v"],
        [Edge("p1", "u", "v", 1), Edge("p2", "u", "v", 1), Edge("p3", "u", "v", 1)],
    )


def star3() -> Curve:
    return Curve(
        ["c", "w1", "w2", "w3"],
        [
            Edge("l1", "c", "w1", Q(1, 2)),
            Edge("l2", "c", "w2", Q(1, 2)),
            Edge("l3", "c", "w3", Q(1, 2)),
        ],
    )


def theta_quotient() -> tuple[Modification, Morphism, Curve]:
    """The degree-2 quotient of THETA onto STAR3, folding each edge at its
    midpoint onto the corresponding leg."""
    c = theta()
    half = Q(1, 2)
    rc, _cmap = refine(c, {"p1": [half], "p2": [half], "p3": [half]})
    mod = trivial_modification(rc)
    target = star3()
    maps = {}
    for i in (1, 2, 3):
        maps[f"p{i}.0"] = EdgeMap(f"l{i}", 0, 1, 1)
        maps[f"p{i}.1"] = EdgeMap(f"l{i}", half, -1, 1)
    quot = Morphism(mod.curve, target, maps)
    return mod, quot, target


# -- TAIL --------------------------------------------------------------------


def tail() -> Curve:
    return Curve(
        ["A", "M", "tip"],
        [
            Edge("e0", "A", "M", Q(1, 2)),
            Edge("e1", "M", "A", Q(3, 2)),
            Edge("et", "M", "tip", 1),
        ],
    )


def tail_point(c: Curve, x) -> Point:
    """Circle point at arc length x from A; the tail hangs at x = 1/2."""
    x = Q(x) % 2
    return c.pt("e0", x) if x <= Q(1, 2) else c.pt("e1", x - Q(1, 2))


def tail_system() -> GenSystem:
    """Base 2(A) with the three extremal generators of the degree-2 system.

    g1 folds the circle (kink over the point opposite A); gt pulls the tail
    in (kink at the tail image and the tip).  Their divisors:
    div g1 = 2(x=1) - 2(A), div gt = (x=3/2) + (tip) - 2(A).
    """
    c = tail()
    g0 = PLFunction.constant(c, 0)
    g1 = PLFunction(
        c,
        {
            "e0": EdgeFunc(0, ((-1, Q(1, 2)),)),
            "e1": EdgeFunc(Q(-1, 2), ((-1, Q(1, 2)), (1, Q(1)))),
            "et": EdgeFunc(Q(-1, 2), ((0, Q(1)),)),
        },
    )
    gt = PLFunction(
        c,
        {
            "e0": EdgeFunc(0, ((-1, Q(1, 2)),)),
            "e1": EdgeFunc(Q(-1, 2), ((0, Q(1)), (1, Q(1, 2)))),
            "et": EdgeFunc(Q(-1, 2), ((-1, Q(1)),)),
        },
    )
    return GenSystem(c, Divisor.point(c.pt("e0", 0), 2), [g0, g1, gt])
