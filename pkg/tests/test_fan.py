import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import A1, P1, RAY, SL2, affine_part, random_proper_divisor, six_item_fan, sl2_trivial_fan, sl3_fan, torus_fan
from horosphere.fan import (
    GENERIC,
    DivisorialFan,
    FanError,
    decolor,
    decolor_germ,
    enumerate_germs,
    fan_rays,
    fan_vertices,
    germ_vertex,
    is_complete,
    resolve,
    saturate,
    toroidal_cover,
    validate_fan,
)
from horosphere.pdiv import ColoredPolyhedralDivisor, CurveWithOpen, Vertex, interval
from horosphere.polyhedra import Cone, Polyhedron, is_regular_cone
from horosphere.rootdata import colors

half = Fraction(1, 2)
NEG = Cone.from_generators([(-1,)], 1)


def complete_line_fan():
    """A complete rank-one fan over P^1 with a nontrivial coefficient at 0."""
    items = [
        ColoredPolyhedralDivisor(A1, RAY, {"0": interval(half)}),
        ColoredPolyhedralDivisor(A1, NEG, {"0": Polyhedron([(half,)], NEG)}),
        ColoredPolyhedralDivisor(CurveWithOpen.projective_line(["0"]), RAY),
        ColoredPolyhedralDivisor(CurveWithOpen.projective_line(["0"]), NEG),
    ]
    return saturate(DivisorialFan(items, SL2))


def test_singleton_is_valid():
    assert validate_fan(sl3_fan())


def test_six_item_fan_closure():
    six = six_item_fan()
    strict = validate_fan(six)
    assert not strict and "intersection" in strict.reason
    assert validate_fan(six, require_closure=False)
    closed = saturate(six)
    assert validate_fan(closed) and len(closed) == 9
    assert saturate(closed) == closed


def test_overlapping_tails_rejected():
    a = ColoredPolyhedralDivisor(A1, Cone.orthant(2))
    b = ColoredPolyhedralDivisor(A1, Cone.from_generators([(1, 1), (-1, 1)], 2))
    check = validate_fan(DivisorialFan([a, b], None), require_closure=False)
    assert not check and check.pair == (0, 1)


def test_color_mismatch_rejected():
    a = ColoredPolyhedralDivisor(A1, RAY, {}, colors(SL2))
    b = ColoredPolyhedralDivisor(A1, RAY)
    assert not validate_fan(DivisorialFan([a, b], SL2), require_closure=False)


def test_completeness():
    assert is_complete(six_item_fan())
    assert not is_complete(sl3_fan())
    symmetric = ColoredPolyhedralDivisor(P1, RAY, {"0": interval(half), "inf": interval(half)})
    assert not is_complete(DivisorialFan([symmetric], SL2))
    assert is_complete(complete_line_fan())


def test_completeness_requires_valid_fan():
    a = ColoredPolyhedralDivisor(A1, Cone.orthant(2))
    b = ColoredPolyhedralDivisor(A1, Cone.from_generators([(1, 1), (-1, 1)], 2))
    with pytest.raises(FanError):
        is_complete(DivisorialFan([a, b], None))


def germ_table(fan):
    return {(g.kind, g.point, g.cone.rays, g.is_divisorial) for g in enumerate_germs(fan)}


def test_germs_of_sl3_example():
    table = germ_table(sl3_fan())
    assert ("horizontal", None, ((1,),), True) in table
    assert ("vertical", "0", ((1, 2),), True) in table
    assert ("vertical", "0", ((1, 0), (1, 2)), False) in table
    assert ("vertical", GENERIC, ((0, 1),), True) in table
    assert ("vertical", GENERIC, ((0, 1), (1, 0)), False) in table
    assert len(table) == 5


def test_germs_of_trivial_item():
    table = germ_table(sl2_trivial_fan())
    assert table == {
        ("horizontal", None, ((1,),), True),
        ("vertical", GENERIC, ((0, 1),), True),
        ("vertical", GENERIC, ((0, 1), (1, 0)), False),
    }


def test_colored_ray_germ_is_not_divisorial():
    germs = enumerate_germs(sl2_trivial_fan(colored=True))
    (ray,) = [g for g in germs if g.kind == "horizontal"]
    assert ray.colors == {"alpha1"} and not ray.is_divisorial
    plain = decolor_germ(ray)
    assert plain.colors == frozenset() and plain.is_divisorial


def test_projective_item_has_hyper_germ():
    D = ColoredPolyhedralDivisor(P1, RAY, {"0": interval(half), "inf": interval(half)})
    germs = enumerate_germs(DivisorialFan([D], SL2))
    assert any(g.kind == "hyper" for g in germs)
    (ray,) = [g for g in germs if g.kind == "horizontal"]
    assert not ray.is_divisorial and "ambiguous-case-B" in ray.flags


def test_germs_reject_improper_items():
    with pytest.raises(FanError):
        enumerate_germs(DivisorialFan([ColoredPolyhedralDivisor(P1, RAY)], SL2))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_divisorial_germs_match_vertices_and_rays(seed, affine):
    D = random_proper_divisor(random.Random(seed))
    if affine:
        D = affine_part(D)
    fan = torus_fan(D)
    germs = [g for g in enumerate_germs(fan) if g.is_divisorial]
    verts = {germ_vertex(g) for g in germs if g.kind == "vertical" and g.point != GENERIC}
    rays = {g.cone.rays[0] for g in germs if g.kind == "horizontal"}
    assert verts == set(fan_vertices(fan))
    assert rays == set(fan_rays(fan))


def test_decolor():
    plain = sl3_fan()
    assert decolor(plain) == plain
    colored = sl2_trivial_fan(colored=True)
    out = decolor(colored)
    assert out.items[0].colors == frozenset()
    assert out.items[0].coeffs == colored.items[0].coeffs
    assert decolor(decolor(colored)) == decolor(colored)


def test_toroidal_cover_splits_projective_items():
    D = ColoredPolyhedralDivisor(P1, RAY, {"0": interval(half), "inf": interval(half)})
    tor = toroidal_cover(DivisorialFan([D], SL2))
    assert validate_fan(tor)
    assert all(item.base.is_affine for item in tor.items)


def test_resolve_sl3_example():
    res = resolve(sl3_fan())
    assert res.exceptional_vertices == (Vertex("0", (Fraction(1),)),)
    assert res.exceptional_rays == ()
    assert validate_fan(res.fan)
    slices = {res.fan.slice(i, "0") for i in range(len(res.fan))}
    assert Cone.from_generators([(1, 0), (1, 1)], 2) in slices
    assert Cone.from_generators([(1, 1), (1, 2)], 2) in slices


def test_resolve_keeps_smooth_fans():
    fan = sl2_trivial_fan()
    res = resolve(fan)
    assert res.fan == fan
    assert res.exceptional_rays == () and res.exceptional_vertices == ()


def test_resolve_only_decolors_regular_colored_fans():
    fan = sl2_trivial_fan(colored=True)
    res = resolve(fan)
    assert res.fan == decolor(fan)
    # the color removed the ray from Ray(Sigma); decoloring blows up the origin of A^2
    assert res.exceptional_rays == ((1,),) and res.exceptional_vertices == ()
    assert any(a.colors and not b.colors for a, b in res.decolored_germs)


def test_resolve_improper_rejected():
    with pytest.raises(FanError):
        resolve(DivisorialFan([ColoredPolyhedralDivisor(P1, RAY)], SL2))


def test_resolve_preserves_completeness():
    fan = complete_line_fan()
    res = resolve(fan)
    assert is_complete(res.fan)
    # cone((1,0),(1,2)) splits at (1,1) and cone((-1,0),(1,2)) at (0,1)
    assert res.exceptional_vertices == (Vertex("0", (Fraction(0),)), Vertex("0", (Fraction(1),)))


def all_slices_regular(fan):
    pts = fan.relevant_points + (GENERIC,)
    return all(is_regular_cone(fan.slice(i, z)) for i in range(len(fan)) for z in pts if fan.contains(i, z))


@settings(max_examples=12, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_resolution_is_regular_and_idempotent(seed, affine):
    D = random_proper_divisor(random.Random(seed))
    if affine:
        D = affine_part(D)
    res = resolve(torus_fan(D))
    assert all_slices_regular(res.fan)
    assert set(resolve(res.fan).fan.items) == set(res.fan.items)
