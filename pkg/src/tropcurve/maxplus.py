"""Max-plus arithmetic and tropical projective points.

Scalars live in (Q union {-inf}, max, +); -inf is the additive identity and
absorbs under multiplication.  Points of tropical projective n-space are
coordinate tuples modulo a global additive shift, canonicalized so that the
first finite coordinate equals 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ratext import NEG_INF, as_ext, is_finite

TROP_ZERO = NEG_INF
TROP_ONE = Fraction(0)


def trop_add(a, b):
    """Tropical sum, i.e. max."""
    return max(a, b)


def trop_mul(a, b):
    """Tropical product, i.e. ordinary sum with -inf absorbing."""
    if a == NEG_INF or b == NEG_INF:
        return NEG_INF
    return a + b


@dataclass(frozen=True)
class ProjPoint:
    """A point of tropical projective space in canonical form.

    Coordinates are Fractions or -inf, not all -inf; construction shifts all
    finite coordinates so the first finite one becomes 0.  Equality and
    hashing therefore mean projective equality.
    """

    coords: tuple

    def __init__(self, coords):
        coords = tuple(as_ext(c) for c in coords)
        if not coords:
            raise ValueError("projective point needs at least one coordinate")
        pivot = next((c for c in coords if is_finite(c)), None)
        if pivot is None:
            raise ValueError("all coordinates are -inf")
        if any(c == float("inf") for c in coords):
            raise ValueError("+inf is not a projective coordinate")
        object.__setattr__(
            self, "coords", tuple(c - pivot if is_finite(c) else NEG_INF for c in coords)
        )

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __repr__(self):
        return "(" + " : ".join(str(c) for c in self.coords) + ")"


def proj_equal(x: ProjPoint, y: ProjPoint) -> bool:
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    return x.coords == y.coords


def trop_combine_points(coeffs, points):
    """Coordinatewise max of shifted coordinate lists: (+) of a_i (.) p_i.

    Takes raw coordinate lists, not necessarily canonical, and returns a raw
    list; at least one coefficient must be finite and all lists equal length.
    """
    coeffs = [as_ext(a) for a in coeffs]
    pts = [[as_ext(c) for c in p] for p in points]
    if len(coeffs) != len(pts):
        raise ValueError("coefficient/point count mismatch")
    if not pts:
        raise ValueError("empty combination")
    n = len(pts[0])
    if any(len(p) != n for p in pts):
        raise ValueError("points of different lengths")
    if all(a == NEG_INF for a in coeffs):
        raise ValueError("all coefficients are -inf")
    return [
        max(trop_mul(a, p[i]) for a, p in zip(coeffs, pts)) for i in range(n)
    ]


def _finite_pair(x: ProjPoint, y: ProjPoint):
    if x.dim != y.dim:
        raise ValueError("dimension mismatch")
    if not all(is_finite(c) for c in x.coords + y.coords):
        raise ValueError("segment endpoints must be finite")
    return x.coords, y.coords


def tropical_segment(x: ProjPoint, y: ProjPoint) -> list[ProjPoint]:
    """Breakpoints of the tropical line segment from x to y, inclusive.

    Sweeps (lam (.) x) (+) y over the critical values lam = y_i - x_i; the
    result is a concatenation of at most dim(x) ordinary segments.
    """
    xc, yc = _finite_pair(x, y)
    if x == y:
        return [x]
    levels = sorted({yi - xi for xi, yi in zip(xc, yc)})
    pts: list[ProjPoint] = []
    for lam in levels:
        p = ProjPoint([max(lam + xi, yi) for xi, yi in zip(xc, yc)])
        if not pts or pts[-1] != p:
            pts.append(p)
    pts.reverse()
    assert pts[0] == x and pts[-1] == y
    return pts


def proj_distance(x: ProjPoint, y: ProjPoint) -> Fraction:
    """Projective metric: max over coordinate pairs i < j of |d_i - d_j|."""
    xc, yc = _finite_pair(x, y)
    diffs = [xi - yi for xi, yi in zip(xc, yc)]
    return max(diffs) - min(diffs)
