import itertools

import pytest

from builders import SL2, SL3, reflection_group_order
from horosphere.rootdata import (
    Color,
    DatumError,
    HorosphericalDatum,
    RootDatum,
    a_alpha,
    colors,
    levi_subset,
    validate_datum,
    weyl_dim,
    weyl_order,
)

SIMPLE_TYPES_UP_TO_4 = [("A", n) for n in range(1, 5)] + [("B", n) for n in (2, 3, 4)] + \
    [("C", n) for n in (3, 4)] + [("D", 4), ("F", 4), ("G", 2)]


def root_systems_up_to_rank(k):
    """All products of simple types with total rank at most ``k``."""
    singles = SIMPLE_TYPES_UP_TO_4
    out = []
    for size in range(1, k + 1):
        for combo in itertools.combinations_with_replacement(singles, size):
            if sum(r for _, r in combo) <= k:
                out.append(combo)
    return out


def datum(types, I=(), M=None, torus=0):
    rd = RootDatum(tuple(types), torus)
    if M is None:
        M = tuple(tuple(int(i == j) for j in range(rd.character_rank)) for i in range(rd.character_rank)
                  if f"alpha{i + 1}" not in I)
    return HorosphericalDatum(rd, M, frozenset(I))


def test_validate_datum_examples():
    assert validate_datum(SL3)
    assert validate_datum(SL2)
    assert not validate_datum(HorosphericalDatum(RootDatum((("A", 1),)), ((1,),), {"alpha1"}))


def test_malformed_datum_rejected():
    with pytest.raises(DatumError):
        HorosphericalDatum(RootDatum((("A", 2),)), ((1, 0, 0),))
    with pytest.raises(DatumError):
        HorosphericalDatum(RootDatum((("A", 2),)), ((1, 0), (2, 0)))
    with pytest.raises(DatumError):
        RootDatum((("E", 5),))


def test_colors_examples():
    assert colors(SL3) == [Color("alpha1", (1,))]
    assert colors(SL2) == [Color("alpha1", (1,))]
    parabolic = HorosphericalDatum(RootDatum((("A", 2),)), (), {"alpha2"})
    assert all(c.image == () or not any(c.image) for c in colors(parabolic))


def test_colors_image_recomputed_from_basis():
    d = HorosphericalDatum(RootDatum((("A", 3),), 1), ((1, 0, 1, 0), (0, 0, 0, 1)), {"alpha2"})
    for c in colors(d):
        i = int(c.alpha[5:]) - 1
        assert c.image == tuple(row[i] for row in d.M_basis)


def test_a_alpha_examples():
    assert a_alpha(SL2, "alpha1") == 2
    assert a_alpha(SL3, "alpha1") == 3
    assert a_alpha(datum([("A", 2)]), "alpha1") == 2
    with pytest.raises(DatumError):
        a_alpha(SL3, "alpha2")


def test_a_alpha_full_flag_is_two():
    # with I empty the sum of positive roots is twice the Weyl vector
    for types in root_systems_up_to_rank(4):
        d = datum(types)
        assert all(a_alpha(d, a) == 2 for a in d.simple_roots)


def test_a_alpha_at_least_two_exhaustive():
    count = 0
    for types in root_systems_up_to_rank(4):
        rd = RootDatum(tuple(types))
        S = rd.simple_roots
        for k in range(len(S)):
            for I in itertools.combinations(S, k):
                d = datum(types, I)
                for a in d.color_roots:
                    assert a_alpha(d, a) >= 2
                    count += 1
    assert count > 500


def test_positive_root_counts():
    expected = {"A": lambda n: n * (n + 1) // 2, "B": lambda n: n * n, "C": lambda n: n * n,
                "D": lambda n: n * (n - 1)}
    for t, n in SIMPLE_TYPES_UP_TO_4 + [("D", 5), ("B", 5)]:
        rd = RootDatum(((t, n),))
        if t in expected:
            assert len(rd.positive_roots) == expected[t](n)
    assert len(RootDatum((("G", 2),)).positive_roots) == 6
    assert len(RootDatum((("F", 4),)).positive_roots) == 24
    assert len(RootDatum((("E", 6),)).positive_roots) == 36
    assert len(RootDatum((("E", 8),)).positive_roots) == 120


def test_cartan_diagonal_is_two():
    for t, n in SIMPLE_TYPES_UP_TO_4 + [("E", 7)]:
        A = RootDatum(((t, n),)).cartan
        assert all(A[i, i] == 2 for i in range(n))


def test_weyl_order_examples():
    assert weyl_order(SL3, []) == 1
    assert weyl_order(datum([("A", 2)]), ["alpha1", "alpha2"]) == 6
    b3 = RootDatum((("B", 3),))
    assert weyl_order(b3, b3.simple_roots) == 48
    for t, n, order in [("E", 6, 51840), ("F", 4, 1152), ("G", 2, 12), ("D", 4, 192), ("C", 3, 48)]:
        rd = RootDatum(((t, n),))
        assert weyl_order(rd, rd.simple_roots) == order


def test_weyl_order_matches_reflection_group():
    for types in root_systems_up_to_rank(3):
        rd = RootDatum(tuple(types))
        S = rd.simple_roots
        A = rd.cartan
        for k in range(len(S) + 1):
            for J in itertools.combinations(range(len(S)), k):
                sub = [[A[i, j] for j in J] for i in J]
                assert weyl_order(rd, [S[i] for i in J]) == reflection_group_order(sub)


def test_weyl_order_multiplicative_on_disjoint_unions():
    rd = RootDatum((("A", 2), ("B", 2)))
    J1, J2 = ["alpha1", "alpha2"], ["alpha3", "alpha4"]
    assert weyl_order(rd, J1 + J2) == weyl_order(rd, J1) * weyl_order(rd, J2)
    a4 = RootDatum((("A", 4),))
    assert weyl_order(a4, ["alpha1", "alpha3"]) == 4


def test_weyl_dim_examples():
    assert weyl_dim(SL2, (0,)) == 1
    for d in range(6):
        assert weyl_dim(SL2, (d,)) == d + 1
    assert weyl_dim(SL3, (1,)) == 3
    with pytest.raises(DatumError):
        weyl_dim(SL2, (-1,))


def test_weyl_dim_known_representations():
    cases = [
        ("B", 2, 0, 5), ("B", 2, 1, 4), ("G", 2, 0, 7), ("G", 2, 1, 14),
        ("A", 3, 1, 6), ("F", 4, 3, 26), ("C", 3, 0, 6), ("D", 4, 0, 8),
    ]
    for t, n, i, dim in cases:
        rd = RootDatum(((t, n),))
        d = HorosphericalDatum(rd, tuple(tuple(int(a == b) for b in range(n)) for a in range(n)))
        m = tuple(int(j == i) for j in range(n))
        assert weyl_dim(d, m) == dim


def test_weyl_dim_for_levi():
    d = datum([("A", 2)])
    assert weyl_dim(d, (1, 0), levi=["alpha1"]) == 2
    assert weyl_dim(d, (1, 0), levi=[]) == 1


def test_levi_subset():
    assert levi_subset(SL3, []) == {"alpha2"}
    assert levi_subset(SL3, colors(SL3)) == {"alpha1", "alpha2"}
    assert levi_subset(SL2, ["alpha1"]) == {"alpha1"}
    with pytest.raises(DatumError):
        levi_subset(SL3, ["alpha2"])
