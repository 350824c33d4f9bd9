"""Platonic triples and log-terminality of three-point divisors on P^1."""

from fractions import Fraction

from horosphere import ColoredPolyhedralDivisor, CurveWithOpen, interval, is_log_terminal
from horosphere.polyhedra import Cone
from horosphere.rootdata import HorosphericalDatum, RootDatum

torus = HorosphericalDatum(RootDatum((), 1), ((1,),), frozenset())
ray = Cone.from_generators([(1,)], 1)
P1 = CurveWithOpen.projective_line()

for triple in [(1, 1, 1), (2, 2, 7), (2, 3, 3), (2, 3, 4), (2, 3, 5), (2, 3, 6), (2, 3, 7), (3, 3, 3)]:
    coeffs = {z: interval(Fraction(1, m)) for z, m in zip(["0", "1", "2"], triple)}
    r = is_log_terminal(ColoredPolyhedralDivisor(P1, ray, coeffs), torus)
    print(triple, "sum of 1 - 1/mu =", r.mu_sum, "log terminal" if r.log_terminal else "not log terminal")
