"""Acceptance criteria 1-8.

Each criterion is a function returning ``(ok, detail)``.  Under pytest every
criterion is one test that prints a single ``PASS``/``FAIL`` line; running
this file directly prints the eight lines and exits nonzero on any failure.
"""

import itertools
import random
import sys
import time
from fractions import Fraction

import pytest

from builders import (
    A1,
    P1,
    RAY,
    SL2,
    TORUS,
    affine_part,
    invariant_factors_oracle,
    random_proper_divisor,
    reflection_group_order,
    six_item_fan,
    sl2_trivial_fan,
    torus_fan,
)
from horosphere.cli import run
from horosphere.fan import DivisorialFan, is_complete, resolve, saturate, validate_fan
from horosphere.geometry import (
    BStableDivisor,
    Verdict,
    check_colored_cone_smooth,
    class_group,
    class_group_tvariety,
    discrepancies,
    has_rational_singularities,
    is_cartier,
    is_log_terminal,
    is_q_gorenstein,
    is_smooth,
    pl_to_divisor,
    principal_divisor,
    rational_singularities_bruteforce,
)
from horosphere.lattice import IntMatrix, cokernel, smith_normal_form
from horosphere.pdiv import BEigenfunction, ColoredPolyhedralDivisor, Vertex, evaluate, interval
from horosphere.polyhedra import Cone, dual_cone
from horosphere.problem import bundled, parse_text
from horosphere.rootdata import HorosphericalDatum, RootDatum, a_alpha, colors, weyl_order

SIMPLE_TYPES = [("A", n) for n in range(1, 5)] + [("B", n) for n in (2, 3, 4)] + \
    [("C", n) for n in (3, 4)] + [("D", 4), ("F", 4), ("G", 2)]


def _root_systems(max_rank):
    for size in range(1, max_rank + 1):
        for combo in itertools.combinations_with_replacement(SIMPLE_TYPES, size):
            if sum(r for _, r in combo) <= max_rank:
                yield combo


def _elapsed(t0):
    return time.perf_counter() - t0


# 1 ---------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    problem = parse_text(bundled("sl3_example.json"))
    r = run(problem, "analyze").results
    got = (r["class_group"], r["rational"], r["smooth"], r["log_terminal"], r["gorenstein_index"],
           r["canonical_divisor"])
    want = ("Z + Z/2", True, False, True, 1, "D_(0,1/2) - D_rho(1) - 3*D_alpha1")
    dt = _elapsed(t0)
    return got == want and dt < 1, f"Cl={got[0]}, rational={got[1]}, smooth={got[2]}, " \
        f"log_terminal={got[3]}, index={got[4]}, K={got[5]}, {dt:.2f}s (< 1s)"


# 2 ---------------------------------------------------------------------------

def criterion_2():
    t0 = time.perf_counter()
    fan = sl2_trivial_fan()
    cl, cy, sm = str(class_group(fan)), str(class_group_tvariety(fan)), is_smooth(fan).verdict
    dt = _elapsed(t0)
    ok = (cl, cy, sm) == ("Z", "0", Verdict.TRUE) and dt < 1
    return ok, f"Cl(X)={cl}, Cl(Y)={cy}, smooth={sm.value}, {dt:.2f}s (< 1s)"


# 3 ---------------------------------------------------------------------------

def criterion_3(n=100, seed=2024):
    t0 = time.perf_counter()
    rng = random.Random(seed)
    agree = rational = 0
    for _ in range(n):
        D = random_proper_divisor(rng)
        a = has_rational_singularities(D).rational
        b = rational_singularities_bruteforce(D, bound=50)
        agree += a == b
        rational += b
    dt = _elapsed(t0)
    return agree == n and dt < 60, \
        f"{agree}/{n} agree with brute force (bound 50; {rational} rational, {n - rational} not), {dt:.1f}s (< 60s)"


# 4 ---------------------------------------------------------------------------

def criterion_4(n=50, seed=7):
    t0 = time.perf_counter()
    flag = HorosphericalDatum(RootDatum((("A", 2),)), (), {"alpha2"})
    table = [
        check_colored_cone_smooth(flag, Cone.zero(0), []) is True,
        check_colored_cone_smooth(SL2, RAY, colors(SL2)) is True,
        check_colored_cone_smooth(TORUS[2], Cone.from_generators([(1, 0), (1, 2)], 2), []) is False,
    ]
    rng = random.Random(seed)
    smooth = 0
    for k in range(n):
        D = random_proper_divisor(rng)
        if k % 2:
            D = affine_part(D)
        smooth += is_smooth(resolve(torus_fan(D)).fan).verdict is Verdict.TRUE
    dt = _elapsed(t0)
    return all(table) and smooth == n and dt < 60, \
        f"table {sum(table)}/3, resolve smooth {smooth}/{n}, {dt:.1f}s (< 60s)"


# 5 ---------------------------------------------------------------------------

def criterion_5(n=50, seed=3):
    rng = random.Random(seed)
    sl3 = DivisorialFan([ColoredPolyhedralDivisor(A1, RAY, {"0": interval(Fraction(1, 2))})],
                        parse_text(bundled("sl3_example.json")).datum)
    fans = [sl3, sl2_trivial_fan()]
    for _ in range(4):
        D = random_proper_divisor(rng)
        fans += [torus_fan(D), torus_fan(affine_part(D))]
    fans.append(resolve(fans[3]).fan)
    ok_pairs = 0
    for k in range(n):
        fan = fans[k % len(fans)]
        m = tuple(rng.randint(-5, 5) for _ in range(fan.rank))
        a, b = rng.sample(["0", "1", "2", "inf", "7"], 2)
        c = rng.randint(-3, 3)
        P = principal_divisor(fan, BEigenfunction(m, {a: c, b: -c}))
        res = is_cartier(fan, P)
        ok_pairs += bool(res.cartier and pl_to_divisor(fan, res.theta) == P and class_group(fan).is_zero(P))
    rejected = not is_cartier(sl3, BStableDivisor({Vertex("0", (Fraction(1, 2),)): 1})).cartier
    return ok_pairs == n and rejected, \
        f"{ok_pairs}/{n} principal pairs Cartier with class 0 and round trip; D_(0,1/2) rejected={rejected}"


# 6 ---------------------------------------------------------------------------

def criterion_6():
    checked = low = 0
    for types in _root_systems(4):
        rd = RootDatum(tuple(types))
        S = rd.simple_roots
        for k in range(len(S)):
            for I in itertools.combinations(S, k):
                M = tuple(tuple(int(i == j) for j in range(len(S))) for i in range(len(S)) if S[i] not in I)
                d = HorosphericalDatum(rd, M, frozenset(I))
                for a in d.color_roots:
                    checked += 1
                    low += a_alpha(d, a) < 2
    return low == 0, f"{checked} triples (type, I, alpha) over rank <= 4, {low} with a_alpha < 2"


# 7 ---------------------------------------------------------------------------

def _pattern(mus):
    pts = ["0", "1", "2", "3"]
    return ColoredPolyhedralDivisor(P1, RAY, {z: interval(Fraction(1, m) if m > 1 else 1) for z, m in zip(pts, mus)})


def criterion_7(seed=11, n=20):
    a = is_log_terminal(_pattern((2, 3, 5)), TORUS[1])
    b = is_log_terminal(_pattern((2, 3, 7)), TORUS[1])
    c = is_log_terminal(_pattern((1, 1, 1)), TORUS[1])
    patterns = (a.log_terminal, a.mu_sum, b.log_terminal, b.mu_sum, c.log_terminal)
    want = (True, Fraction(59, 30), False, Fraction(85, 42), True)
    rng = random.Random(seed)
    affine = gorenstein = 0
    for _ in range(n):
        fan = torus_fan(affine_part(random_proper_divisor(rng)))
        if is_q_gorenstein(fan) is None:
            continue
        gorenstein += 1
        affine += is_log_terminal(fan).log_terminal and all(x > -1 for _, x in discrepancies(fan))
    ok = patterns == want and affine == gorenstein > 0
    return ok, f"(2,3,5): {a.mu_sum} -> {a.log_terminal}; (2,3,7): {b.mu_sum} -> {b.log_terminal}; " \
        f"all-1 -> {c.log_terminal}; affine Q-Gorenstein log-terminal {affine}/{gorenstein}"


# 8 ---------------------------------------------------------------------------

def _random_cone(rng):
    d = rng.randint(1, 3)
    gens = [tuple(rng.randint(-9, 9) for _ in range(d)) for _ in range(rng.randint(1, 5))]
    gens = [g for g in gens if any(g)] or [(1,) * d]
    c = Cone.from_generators(gens, d)
    return c if c.is_pointed() else Cone.from_generators(gens[:1], d)


def _random_unimodular(rng, n):
    M = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(3 * n):
        i, j = rng.randrange(n), rng.randrange(n)
        if i != j:
            q = rng.randint(-3, 3)
            M[i] = [x + q * y for x, y in zip(M[i], M[j])]
    return IntMatrix.from_rows(M)


def criterion_8(seed=5):
    t0 = time.perf_counter()
    rng = random.Random(seed)
    parts = {}
    cones = [_random_cone(rng) for _ in range(200)]
    parts["dual involution"] = all(dual_cone(dual_cone(c)) == c for c in cones)
    snf_ok = True
    for _ in range(150):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        A = IntMatrix.from_rows([[rng.randint(-9, 9) for _ in range(c)] for _ in range(r)])
        U, S, V = smith_normal_form(A)
        B = _random_unimodular(rng, r) @ A @ _random_unimodular(rng, c)
        g, h = cokernel(A, [""] * c), cokernel(B, [""] * c)
        snf_ok &= U @ A @ V == S and (g.free_rank, g.invariant_factors) == (h.free_rank, h.invariant_factors)
        if r <= 4 and c <= 4:
            snf_ok &= [x for x in S.diagonal() if x] == invariant_factors_oracle(A.tolist(), c)
    parts["SNF unimodular invariance"] = snf_ok
    sup_ok = True
    for _ in range(60):
        D = random_proper_divisor(rng)
        dual = dual_cone(D.tail)
        pts = [m for m in itertools.product(range(-4, 5), repeat=D.rank) if dual.contains(m)]
        for m, k in itertools.combinations(rng.sample(pts, min(6, len(pts))), 2):
            s = tuple(x + y for x, y in zip(m, k))
            sup_ok &= evaluate(D, m) + evaluate(D, k) <= evaluate(D, s)
    parts["superadditivity"] = sup_ok
    weyl_ok = True
    for types in _root_systems(3):
        rd = RootDatum(tuple(types))
        A = rd.cartan
        n = rd.semisimple_rank
        for k in range(n + 1):
            for J in itertools.combinations(range(n), k):
                sub = [[A[i, j] for j in J] for i in J]
                weyl_ok &= weyl_order(rd, [rd.simple_roots[i] for i in J]) == reflection_group_order(sub)
    parts["Weyl orders"] = weyl_ok
    six = six_item_fan()
    parts["six-item completeness"] = (is_complete(six) and bool(validate_fan(six, require_closure=False))
                                      and bool(validate_fan(saturate(six))))
    dt = _elapsed(t0)
    ok = all(parts.values()) and dt < 120
    return ok, ", ".join(f"{k} {'ok' if v else 'FAILED'}" for k, v in parts.items()) + f", {dt:.1f}s (< 120s)"


CRITERIA = {
    1: ("SL3 example end to end", criterion_1),
    2: ("SL2 remark", criterion_2),
    3: ("rationality vs brute force", criterion_3),
    4: ("smoothness kernel", criterion_4),
    5: ("Cartier exactness", criterion_5),
    6: ("canonical bound a_alpha >= 2", criterion_6),
    7: ("log-terminal arithmetic", criterion_7),
    8: ("structural invariants", criterion_8),
}


def _line(k, ok, detail):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {CRITERIA[k][0]} -- {detail}"


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k][1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k, (_, fn) in sorted(CRITERIA.items()):
        ok, detail = fn()
        failed += not ok
        print(_line(k, ok, detail), flush=True)
    sys.exit(1 if failed else 0)
