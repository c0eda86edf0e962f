"""Error types shared across the library and the command line tools."""


class TropError(Exception):
    """Base class for all semantic errors raised by this package."""


class ParseError(TropError):
    """Malformed input text (bad token, unknown record, broken reference)."""


class CurveError(TropError):
    """Structurally invalid curve data."""


class ContinuityError(TropError):
    """Piecewise data that does not glue to a continuous function."""


class MorphismError(TropError):
    """Edge map data that does not define a morphism of curves."""


class NotHarmonicError(TropError):
    """A harmonic-morphism precondition failed at some point."""


class StarViolation(TropError):
    """A linear system failed the rank-1 / one-dimensional-image certificate.

    kind is one of "geomdim0", "rank", "cycle", "nonconvex"; detail carries
    the failing point or a short description.
    """

    def __init__(self, kind: str, message: str, detail=None):
        super().__init__(message)
        self.kind = kind
        self.detail = detail
