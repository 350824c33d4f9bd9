"""Horospherical varieties of complexity one.

Exact combinatorics of colored divisorial fans over a curve: integer lattice
algebra, cones and polyhedra, root data of reductive groups, colored
polyhedral divisors, fans with resolution, and the geometric criteria built
on them (rational singularities, smoothness, class groups, Cartier and
canonical divisors, Q-Gorenstein index, log-terminality).
"""

__version__ = "0.1.0"

from .lattice import (
    AbelianGroupPresentation,
    IntMatrix,
    cokernel,
    hermite_normal_form,
    integer_kernel,
    min_integral_multiple,
    smith_normal_form,
    solve_integer,
    solve_rational,
)
from .polyhedra import Cone, Polyhedron, dual_cone, faces, intersect_cones, is_regular_cone, regularize
from .rootdata import Color, HorosphericalDatum, RootDatum, a_alpha, colors, levi_subset, validate_datum, weyl_dim, weyl_order
from .pdiv import (
    INFINITY,
    BEigenfunction,
    ColoredPolyhedralDivisor,
    CurveQDivisor,
    CurveWithOpen,
    GValuation,
    Vertex,
    degree_polytope,
    evaluate,
    interval,
    is_proper,
    localize,
    vertices_and_rays,
)
from .fan import (
    GENERIC,
    DivisorialFan,
    decolor,
    enumerate_germs,
    is_complete,
    resolve,
    saturate,
    toroidal_cover,
    validate_fan,
)
from .geometry import (
    BStableDivisor,
    PLFunction,
    Verdict,
    canonical_divisor,
    check_colored_cone_smooth,
    class_group,
    class_group_tvariety,
    discrepancies,
    has_rational_singularities,
    is_cartier,
    is_factorial,
    is_log_terminal,
    is_q_gorenstein,
    is_smooth,
    pl_to_divisor,
    principal_divisor,
)
