"""Exact scalars: rationals plus the two infinities.

Finite values are always Fraction; the infinities are the float sentinels
INF and NEG_INF.  Comparisons between Fraction and the sentinels are exact,
so ordering, max and min never round.  Arithmetic goes through the helpers
below, which refuse the undefined combinations instead of producing NaN.
"""

from __future__ import annotations

from fractions import Fraction

INF = float("inf")
NEG_INF = float("-inf")

Q = Fraction


def as_q(v) -> Fraction:
    """Coerce an int, Fraction or "p/q" string to Fraction; floats are rejected."""
    if isinstance(v, float):
        raise TypeError(f"refusing float {v!r}; use Fraction or the inf sentinels")
    return Fraction(v)


def as_ext(v):
    """Like as_q but lets the two infinity sentinels through unchanged."""
    if isinstance(v, float):
        if v == INF or v == NEG_INF:
            return v
        raise TypeError(f"refusing non-infinite float {v!r}")
    return Fraction(v)


def is_finite(v) -> bool:
    return not isinstance(v, float)


def ext_add(a, b):
    if is_finite(a) and is_finite(b):
        return a + b
    if a == INF and b == NEG_INF or a == NEG_INF and b == INF:
        raise ArithmeticError("inf + -inf is undefined")
    return a if not is_finite(a) else b


def ext_neg(a):
    if is_finite(a):
        return -a
    return NEG_INF if a == INF else INF


def ext_sub(a, b):
    return ext_add(a, ext_neg(b))


def ext_mul_int(k: int, a):
    """k * a for integer k; k = 0 times an infinity is refused."""
    if is_finite(a):
        return k * a
    if k == 0:
        raise ArithmeticError("0 * inf is undefined")
    return a if k > 0 else ext_neg(a)


def fmt_ext(v) -> str:
    """Canonical text form: reduced "p/q" with q > 0, or "inf" / "-inf"."""
    if not is_finite(v):
        return "inf" if v == INF else "-inf"
    f = Fraction(v)
    return f"{f.numerator}/{f.denominator}"


def parse_ext(tok: str):
    """Inverse of fmt_ext; also accepts bare integers like "3" or "-2"."""
    if tok == "inf":
        return INF
    if tok == "-inf":
        return NEG_INF
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad rational {tok!r}") from exc
