"""How often is a random rank-one divisor over P^1 rational?

D = sum [a_z, oo) [z] with tail Q_+; it is proper once sum a_z > 0.  Small
positive degree is where rationality fails, so the draws are pushed there.  The
criterion is compared with a brute force check of the defining cohomology
vanishing on a box of degrees.
"""

import random
from collections import Counter
from fractions import Fraction

from horosphere import ColoredPolyhedralDivisor, CurveWithOpen, has_rational_singularities, interval
from horosphere.geometry import rational_singularities_bruteforce
from horosphere.polyhedra import Cone

rng = random.Random(1)
ray = Cone.from_generators([(1,)], 1)
P1 = CurveWithOpen.projective_line()


def random_divisor():
    a = [Fraction(-rng.randint(1, 6), rng.randint(2, 7)) for _ in range(rng.randint(2, 3))]
    a.append(-sum(a) + Fraction(1, rng.randint(1, 12)))
    return ColoredPolyhedralDivisor(P1, ray, {str(i): interval(x) for i, x in enumerate(a)})


tally = Counter()
for _ in range(60):
    D = random_divisor()
    fast = has_rational_singularities(D)
    slow = rational_singularities_bruteforce(D, bound=30)
    tally[fast.rational, slow] += 1
    if not fast.rational:
        print("not rational:", {z: str(D.coefficient(z).vertices[0][0]) for z in D.special_points}, "|", fast.reason)

print(dict(tally))
assert all(a == b for a, b in tally)
