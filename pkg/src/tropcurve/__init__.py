"""Exact divisor calculus on metric graphs, with the constructive equivalence
between finitely generated rank-1 linear systems and finite harmonic maps to
trees."""

from .errors import (
    ContinuityError,
    CurveError,
    MorphismError,
    NotHarmonicError,
    ParseError,
    StarViolation,
    TropError,
)
from .ratext import INF, NEG_INF, Q, as_ext, as_q, fmt_ext, is_finite, parse_ext
from .maxplus import (
    ProjPoint,
    proj_distance,
    proj_equal,
    trop_add,
    trop_combine_points,
    trop_mul,
    tropical_segment,
)
from .curves import (
    Curve,
    CurveMap,
    Edge,
    GraftSpec,
    HalfEdge,
    Point,
    canonical_base_point,
    graft,
    refine,
    spanning_tree_b1,
    validate_curve,
)
from .divisors import Divisor, map_divisor
from .functions import (
    EdgeFunc,
    PLFunction,
    evaluate,
    map_function,
    nonconstant_locus,
    order_at,
    principal_divisor,
    trop_combine,
    truncate_below,
)
from .equivalence import linearly_equivalent, reduced_divisor
from .morphisms import (
    EdgeMap,
    Modification,
    Morphism,
    fiber,
    fiber_degree,
    global_degree,
    harmonic_failures,
    is_harmonic,
    local_degree,
    make_modification,
    pull_divisor,
    pull_function,
    push_divisor,
    push_function,
    retraction_of,
    trivial_modification,
    validate_morphism,
)
from .systems import (
    CellDecomposition,
    GenSystem,
    ImageTree,
    MaxRep,
    RankCert,
    StarCert,
    build_image_tree,
    cell_refine,
    certify_star,
    check_rank_one,
    divisor_at,
    fn_inf,
    fn_max_critical,
    maximal_representation,
    minimize_generators,
    phi,
    tree_linear_system,
)
from .gonality import (
    RoundTrip,
    SameSystemReport,
    WitnessBundle,
    build_graft_trees,
    construct_witness,
    indeterminacy_set,
    phi_morphism,
    roundtrip_check,
    roundtrip_maps,
    roundtrip_system,
    roundtrip_witness,
    same_system,
    system_from_maps,
    system_from_witness,
    trees_isometric,
)
from .formats import (
    Workspace,
    format_workspace,
    load_file,
    parse_into,
    parse_point,
    parse_workspace,
    write_file,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
