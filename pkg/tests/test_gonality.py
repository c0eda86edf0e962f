"""The two constructions and their round trips: system to witness map and
back, witness map to system and back."""

import pytest

from tropcurve import (
    Curve,
    Divisor,
    Edge,
    EdgeFunc,
    GenSystem,
    PLFunction,
    Q,
    TropError,
    canonical_base_point,
    construct_witness,
    fixtures,
    global_degree,
    indeterminacy_set,
    is_harmonic,
    retraction_of,
    roundtrip_check,
    roundtrip_system,
    roundtrip_witness,
    same_system,
    system_from_maps,
    system_from_witness,
    trees_isometric,
    validate_morphism,
)


def test_indeterminacy_of_tailed_circle():
    pts = indeterminacy_set(fixtures.tail_system())
    c = fixtures.tail()
    assert pts == [(c.pt("e1", 1), 1)]


def test_indeterminacy_of_double_point():
    pts = indeterminacy_set(fixtures.seg2_double())
    c = fixtures.seg2()
    assert pts == [(c.pt("e1", 0), 2)]


def test_indeterminacy_empty_on_fold():
    assert indeterminacy_set(fixtures.circ4_fold_system()) == []


def test_witness_for_tailed_circle():
    wb = construct_witness(fixtures.tail_system())
    assert wb.degree == 2
    assert wb.certificate["finite_morphism"]
    assert wb.certificate["harmonic"]
    assert wb.certificate["b1_preserved"]
    assert validate_morphism(wb.phi).is_finite
    assert is_harmonic(wb.phi)
    assert global_degree(wb.phi) == 2
    # exactly one grafted tree, of total length one
    trees = [pg for pg in wb.plan if pg.tree is not None]
    assert len(trees) == 1
    assert trees[0].tree.total_finite_length() == 1
    assert wb.curve.b1 == fixtures.tail().b1
    # the retraction contracts the graft and nothing else
    assert global_degree(wb.retraction) == 1
    assert wb.curve.total_finite_length() == fixtures.tail().total_finite_length() + 1


def test_witness_without_grafts():
    wb = construct_witness(fixtures.circ4_fold_system())
    assert wb.degree == 2
    assert all(pg.tree is None for pg in wb.plan)
    assert wb.curve.total_finite_length() == fixtures.circ4().total_finite_length()
    assert trees_isometric(wb.target, Curve(["a", "b"], [Edge("s", "a", "b", 2)]))


def test_witness_for_double_point():
    wb = construct_witness(fixtures.seg2_double())
    assert wb.degree == 2
    assert dict(wb.indeterminacy) == {fixtures.seg2().pt("e1", 0): 2}
    assert is_harmonic(wb.phi)


def test_roundtrip_system_direction():
    for make in (
        fixtures.tail_system,
        fixtures.circ4_fold_system,
        fixtures.seg2_system,
        fixtures.seg2_double,
    ):
        rt = roundtrip_system(make())
        assert rt.ok, (make.__name__, rt.detail)
        assert rt.direction == "system"


def test_roundtrip_witness_direction():
    mod, quot, target = fixtures.theta_quotient()
    rt = roundtrip_witness(mod, quot, target)
    assert rt.ok
    assert rt.degree == 2
    assert rt.detail["isometric"]


def test_roundtrip_witness_fold():
    mod, m, target = fixtures.circ4_fold()
    rt = roundtrip_witness(mod, m, target)
    assert rt.ok and rt.degree == 2


def test_system_from_witness_recovers_theta_gonality():
    mod, quot, target = fixtures.theta_quotient()
    div = Divisor.point(canonical_base_point(target))
    sm = system_from_witness(mod, quot, target, div)
    assert sm.degree == 2
    assert sm.curve == mod.original
    wb = construct_witness(sm)
    assert wb.degree == 2
    assert trees_isometric(wb.target, fixtures.star3())


def test_system_from_maps_guards():
    mod, quot, target = fixtures.theta_quotient()
    div = Divisor.point(canonical_base_point(target))
    pi = retraction_of(mod)
    with pytest.raises(TropError, match="tree"):
        system_from_maps(fixtures.circ4(), pi, quot, fixtures.circ4(), div)
    with pytest.raises(TropError, match="degree 1"):
        system_from_maps(mod.original, pi, quot, target, 2 * div)
    with pytest.raises(TropError, match="base curve"):
        system_from_maps(fixtures.seg2(), pi, quot, target, div)


def test_same_system_detects_difference():
    s1 = fixtures.seg2_system()
    c = s1.curve
    # drop the sliding generator: strictly smaller semimodule, same base
    s2 = GenSystem(c, s1.base, [PLFunction.constant(c, 0)])
    rep = same_system(s1, s2)
    assert not rep.ok
    assert "escapes" in rep.reason
    rep = same_system(s1, fixtures.seg2_system())
    assert rep.ok


def test_same_system_moves_along_base_witness():
    # same semimodule written over an equivalent base elsewhere on a tree
    c = fixtures.seg2()
    neg_t = PLFunction(c, {"e1": EdgeFunc(0, ((-1, 2),))})
    at_a = GenSystem(c, Divisor.point(c.pt("e1", 0)), [PLFunction.constant(c, 0), neg_t])
    t_minus_2 = PLFunction(c, {"e1": EdgeFunc(-2, ((1, 2),))})
    at_b = GenSystem(c, Divisor.point(c.pt("e1", 2)), [PLFunction.constant(c, 0), t_minus_2])
    assert same_system(at_a, at_b).ok


def test_trees_isometric():
    star = fixtures.star3()
    assert trees_isometric(star, fixtures.star3())
    # same total length, different leaf pattern
    path = Curve(
        ["a", "b", "c", "d"],
        [
            Edge("x", "a", "b", Q(1, 2)),
            Edge("y", "b", "c", Q(1, 2)),
            Edge("z", "c", "d", Q(1, 2)),
        ],
    )
    assert not trees_isometric(star, path)
    with pytest.raises(TropError):
        trees_isometric(star, fixtures.circ4())


def test_roundtrip_check_dispatch():
    rt = roundtrip_check(fixtures.seg2_system())
    assert rt.direction == "system" and rt.ok
    mod, quot, target = fixtures.theta_quotient()
    rt = roundtrip_check(mod, quot, target)
    assert rt.direction == "witness" and rt.ok
    wb = construct_witness(fixtures.tail_system())
    rt = roundtrip_check(wb)
    assert rt.direction == "witness" and rt.ok
    with pytest.raises(TropError):
        roundtrip_check("nonsense")
