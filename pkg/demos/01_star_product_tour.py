"""A first tour: exact star products on flat and curved charts.

The engine builds a graded fiberwise algebra over a chart, solves a
connection recursion, lifts observables to flat sections, and multiplies
them.  Everything below is exact rational arithmetic; no floats appear
anywhere in the pipeline.
"""

from fedosov_lab import (Geometry, Polynomial, StarEngine, WeylCurvatureSpec,
                         parse_poly)

# ---------------------------------------------------------------------------
# A flat plane chart.  The structure matrix defaults to the block form
# [[0, 1], [-1, 0]], so {x1, x2} = -1 with the conventions used here.
# ---------------------------------------------------------------------------

geom = Geometry(2)
spec = WeylCurvatureSpec(geom)
engine = StarEngine(spec, order=4)

x1 = Polynomial.variable(2, 0)
x2 = Polynomial.variable(2, 1)

print("coordinate product x1 * x2 on the flat plane:")
print(engine.star(x1, x2))
print()

# The unit is strictly neutral at every order.
one = Polynomial.one(2)
f = parse_poly("x1^2*x2 - 3*x2", 2)
res = engine.star(one, f)
assert res.coeff(0) == f and all(res.coeff(n).is_zero() for n in range(1, 5))
print("1 * f returns f with no corrections at any order.")
print()

# A cubic pair: the expansion terminates once the derivatives are exhausted,
# and the coefficients alternate between real and imaginary parts.
g = parse_poly("x1*x2^2", 2)
print("f =", f)
print("g =", g)
print("f * g:")
print(engine.star(f, g))
print()

# ---------------------------------------------------------------------------
# A curved chart: a polynomial connection with nonzero curvature.  The
# solver finds the unique normalized connection form, and products pick up
# curvature corrections while staying associative and unital.
# ---------------------------------------------------------------------------

curved = Geometry(2, gamma={(0, 0, 0): x2})
assert not curved.is_flat()
cengine = StarEngine(WeylCurvatureSpec(curved), order=3)

print("the same coordinate product on a curved chart:")
print(cengine.star(x1, x2))
print()
print("f * g on the curved chart:")
print(cengine.star(f, g))
print()

# The first-order antisymmetric part is the Poisson bracket on both charts:
# the curvature only enters at higher orders.
flat_comm = engine.star(x1, x2).coeff(1) - engine.star(x2, x1).coeff(1)
curved_comm = cengine.star(x1, x2).coeff(1) - cengine.star(x2, x1).coeff(1)
assert flat_comm == curved_comm
print("first-order commutators agree on both charts:", flat_comm)
