import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from horosphere.polyhedra import (
    NEG_INF,
    Cone,
    Polyhedron,
    dual_cone,
    face_of,
    faces,
    intersect_cones,
    is_regular_cone,
    is_strongly_convex,
    minkowski_sum,
    normal_quasifan,
    regularize,
    support_value,
)

Q2 = Cone.orthant(2)
RAY = Cone.from_generators([(1,)], 1)


def cone(*gens, d=None):
    return Cone.from_generators(gens, d or len(gens[0]))


def test_dual_examples():
    assert dual_cone(Q2) == Q2
    assert dual_cone(Cone.zero(2)) == Cone.whole(2)
    assert dual_cone(cone((2, -1), (0, 1))) == cone((1, 2), (1, 0))


def test_strong_convexity():
    assert is_strongly_convex(Q2)
    assert not is_strongly_convex(cone((1, 0), (-1, 0), (0, 1)))
    assert is_strongly_convex(cone((1, 2), (1, -2)))


def test_faces():
    assert len(faces(Q2)) == 4
    assert len(faces(RAY)) == 2
    got = set(faces(cone((1, 0), (1, 2))))
    assert got == {Cone.zero(2), cone((1, 0)), cone((1, 2)), cone((1, 0), (1, 2))}
    with pytest.raises(ValueError):
        faces(Cone.whole(2))


def test_rays_are_primitive_and_irredundant():
    c = cone((2, 0), (0, 3), (1, 1))
    assert set(c.rays) == {(1, 0), (0, 1)}


def test_support_value_and_face():
    P = Polyhedron([(Fraction(1, 2),)], RAY)
    assert support_value(P, (2,)) == 1
    assert support_value(P, (0,)) == 0
    assert support_value(P, (-1,)) is NEG_INF
    Q = Polyhedron([(0, 0), (1, -1)], Q2)
    assert support_value(Q, (1, 1)) == 0
    assert face_of(P, (1,)) == Polyhedron([(Fraction(1, 2),)], Cone.zero(1))
    assert face_of(P, (0,)) == P
    square = Polyhedron([(0, 0), (1, 0), (0, 1), (1, 1)], Cone.zero(2))
    assert face_of(square, (1, 0)) == Polyhedron([(0, 0), (0, 1)], Cone.zero(2))
    with pytest.raises(ValueError):
        face_of(P, (-1,))


def test_polyhedron_drops_non_vertices():
    P = Polyhedron([(0, 0), (1, 1), (Fraction(1, 2), Fraction(1, 2))], Q2)
    assert P.vertices == ((0, 0),)


def test_minkowski_sum():
    half = Polyhedron([(Fraction(1, 2),)], RAY)
    assert minkowski_sum(half, half) == Polyhedron([(1,)], RAY)
    assert half + Polyhedron.trivial(RAY) == half
    zero = Cone.zero(2)
    e1 = Polyhedron([(0, 0), (1, 0)], zero)
    e2 = Polyhedron([(0, 0), (0, 1)], zero)
    assert set((e1 + e2).vertices) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    with pytest.raises(ValueError):
        half + Polyhedron([(0,)], Cone.zero(1))


def test_regular_cones():
    assert is_regular_cone(Q2)
    assert not is_regular_cone(cone((1, 0), (1, 2)))
    assert is_regular_cone(cone((1, 0), (1, 1)))


def test_regularize_examples():
    assert regularize(Q2) == [Q2]
    assert set(regularize(cone((1, 0), (1, 2)))) == {cone((1, 0), (1, 1)), cone((1, 1), (1, 2))}
    got = set(regularize(cone((1, 0), (1, 3))))
    assert got == {cone((1, 0), (1, 1)), cone((1, 1), (1, 2)), cone((1, 2), (1, 3))}


def test_normal_quasifan():
    assert normal_quasifan(Polyhedron.trivial(Q2)).cones == (Q2,)
    assert normal_quasifan(Polyhedron([(Fraction(1, 2),)], RAY)).cones == (RAY,)
    qf = normal_quasifan(Polyhedron([(0, 0), (1, -1)], Q2))
    assert len(qf) == 2
    a, b = qf.cones
    wall = intersect_cones(a, b)
    assert wall == cone((1, 1))


def test_intersections():
    c = cone((1, 0), (1, 2))
    assert intersect_cones(c, c) == c
    lower = Cone.from_hrep([(-1, 0)], (), 2)
    assert intersect_cones(Q2, lower) == cone((0, 1))
    assert intersect_cones(c, cone((1, 1), (0, 1))) == cone((1, 1), (1, 2))


def test_hrep_roundtrip():
    c = cone((1, 0, 0), (0, 1, 0), (1, 1, 2))
    assert all(c.contains(r) for r in c.rays)
    assert not c.contains((-1, 0, 0))
    assert Cone.from_hrep(dual_cone(c).rays, (), 3) == c


# Randomized properties ----------------------------------------------------

@st.composite
def pointed_cones(draw, max_rank=3):
    d = draw(st.integers(1, max_rank))
    vec = st.tuples(*[st.integers(-9, 9)] * d).filter(any)
    gens = draw(st.lists(vec, min_size=1, max_size=5))
    c = Cone.from_generators(gens, d)
    if not c.is_pointed():
        c = Cone.from_generators(gens[:1], d)
    return c


@settings(max_examples=80, deadline=None)
@given(pointed_cones())
def test_dual_involution(c):
    assert dual_cone(dual_cone(c)) == c


@settings(max_examples=40, deadline=None)
@given(pointed_cones(max_rank=2), st.data())
def test_support_value_is_vertex_min(tail, data):
    d = tail.ambient_rank
    pts = data.draw(st.lists(st.tuples(*[st.fractions(-5, 5, max_denominator=6)] * d), min_size=1, max_size=4))
    P = Polyhedron(pts, tail)
    for w in dual_cone(tail).rays:
        val = support_value(P, w)
        assert val == min(sum(a * b for a, b in zip(w, v)) for v in pts)
        assert set(face_of(P, w).vertices) == {v for v in P.vertices if sum(a * b for a, b in zip(w, v)) == val}


@settings(max_examples=40, deadline=None)
@given(pointed_cones(max_rank=2), st.data())
def test_minkowski_support_is_additive(tail, data):
    d = tail.ambient_rank
    pt = st.tuples(*[st.fractions(-5, 5, max_denominator=6)] * d)
    P = Polyhedron(data.draw(st.lists(pt, min_size=1, max_size=3)), tail)
    Q = Polyhedron(data.draw(st.lists(pt, min_size=1, max_size=3)), tail)
    for w in list(dual_cone(tail).rays) + [tuple(data.draw(st.integers(-4, 4)) for _ in range(d))]:
        a, b, s = support_value(P, w), support_value(Q, w), support_value(P + Q, w)
        if a is NEG_INF or b is NEG_INF:
            assert s is NEG_INF
        else:
            assert s == a + b


def _interior_samples(c, rng, n=30):
    for _ in range(n):
        coeffs = [Fraction(rng.randint(1, 30), rng.randint(1, 7)) for _ in c.rays]
        yield tuple(sum(l * r[i] for l, r in zip(coeffs, c.rays)) for i in range(c.ambient_rank))


@settings(max_examples=40, deadline=None)
@given(pointed_cones(max_rank=3), st.randoms(use_true_random=False))
def test_regularize_tiles_the_cone(c, rng):
    pieces = regularize(c)
    assert all(is_regular_cone(p) for p in pieces)
    new_rays = {r for p in pieces for r in p.rays}
    assert set(c.rays) <= new_rays
    assert all(c.contains_cone(p) for p in pieces)
    full = [p for p in pieces if p.dim == c.dim]
    for v in _interior_samples(c, rng):
        inside = [p for p in full if p.in_relative_interior(v)]
        # a generic point lies in exactly one maximal piece
        if inside:
            assert len(inside) == 1
        assert any(p.contains(v) for p in pieces)
    for p in pieces:
        for q in pieces:
            meet = intersect_cones(p, q)
            assert meet.is_face_of(p) and meet.is_face_of(q)


def test_regularize_rank3_example():
    rng = random.Random(0)
    c = cone((1, 0, 0), (0, 1, 0), (1, 1, 3))
    pieces = regularize(c)
    assert all(is_regular_cone(p) for p in pieces)
    for v in _interior_samples(c, rng):
        assert any(p.contains(v) for p in pieces)
