"""SL3 acting on A^3 minus the origin, read as a one-item colored fan."""

from fractions import Fraction

from horosphere import (
    BStableDivisor, DivisorialFan, Vertex, canonical_divisor, class_group,
    enumerate_germs, has_rational_singularities, is_cartier, is_q_gorenstein,
    is_smooth, resolve,
)
from horosphere.problem import bundled, parse_text

# the bundled problem file carries the datum and the fan
problem = parse_text(bundled("sl3_example.json"))
fan = problem.fan
D = fan.items[0]
print("tail", D.tail.rays, "coefficient at 0", D.coefficient("0").vertices)

# germs: one horizontal ray, the vertex 1/2 over 0, and the generic slice
for g in enumerate_germs(fan):
    print(g.kind, g.point, g.cone.rays, "divisorial" if g.is_divisorial else "")

print("Cl(X) =", class_group(fan))             # Z + Z/2
print("rational:", has_rational_singularities(D).rational)
print("smooth:", is_smooth(fan).verdict.value)  # the vertex 1/2 has mu = 2

K = canonical_divisor(fan)
print("K_X =", K.divisor)
g = is_q_gorenstein(fan)
print("Gorenstein index", g.index)

# the vertex divisor alone is only Q-Cartier
v = BStableDivisor({Vertex("0", (Fraction(1, 2),)): 1})
print(is_cartier(fan, v).reason)

# resolving inserts the vertex 1 over 0
res = resolve(fan)
print("exceptional:", [x.label() for x in res.exceptional_vertices])
print("resolved smooth:", is_smooth(res.fan).verdict.value)
assert isinstance(res.fan, DivisorialFan)
