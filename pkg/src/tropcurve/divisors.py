"""Divisors: finite formal sums of curve points with integer coefficients."""

from __future__ import annotations

from .curves import CurveMap, Point

__all__ = ["Divisor", "map_divisor"]


class Divisor:
    """Immutable point -> nonzero int map; points must be canonical."""

    __slots__ = ("_d",)

    def __init__(self, entries=()):
        d = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for p, c in items:
            if not isinstance(p, Point):
                raise TypeError(f"divisor key {p!r} is not a Point")
            c = int(c)
            if c:
                d[p] = d.get(p, 0) + c
                if not d[p]:
                    del d[p]
        self._d = d

    @classmethod
    def point(cls, p: Point, c: int = 1) -> "Divisor":
        return cls([(p, c)])

    def coeff(self, p: Point) -> int:
        return self._d.get(p, 0)

    def items(self):
        return sorted(self._d.items())

    def support(self) -> list[Point]:
        return sorted(self._d)

    @property
    def degree(self) -> int:
        return sum(self._d.values())

    def is_effective(self) -> bool:
        return all(c > 0 for c in self._d.values())

    def is_zero(self) -> bool:
        return not self._d

    def __add__(self, other: "Divisor") -> "Divisor":
        out = dict(self._d)
        for p, c in other._d.items():
            out[p] = out.get(p, 0) + c
            if not out[p]:
                del out[p]
        return Divisor(out)

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __neg__(self) -> "Divisor":
        return Divisor({p: -c for p, c in self._d.items()})

    def __rmul__(self, k: int) -> "Divisor":
        return Divisor({p: k * c for p, c in self._d.items()})

    def __eq__(self, other):
        return isinstance(other, Divisor) and self._d == other._d

    def __hash__(self):
        return hash(tuple(self.items()))

    def __bool__(self):
        return bool(self._d)

    def __repr__(self):
        if not self._d:
            return "0"
        parts = [f"{c:+d}*{p}" for p, c in self.items()]
        return " ".join(parts)


def map_divisor(m: CurveMap, d: Divisor) -> Divisor:
    """Transport a divisor along a subdivision or inclusion map."""
    return Divisor([(m.point(p), c) for p, c in d.items()])
