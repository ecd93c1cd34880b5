"""The minimal-cap function v, floating bodies, and wet parts.

v(z) is the smallest area cut off the container by a line through z. The
floating body {v >= delta} is what remains after wetting the boundary layer
{v < delta}. For the unit square v has the closed form 2*min of the corner
coordinate products, which makes the wet-part area exactly

    area{v < delta} = 2 delta (1 + log(1/(2 delta)))

a handy desk check for the Monte Carlo estimator. Note the leading constant
is ell/2 = 2 per unit delta*log(1/delta); the often-quoted reference value
with ell/4 is half of the truth (see the README's expected-outcome notes).
"""
import math

from hulllab.floating_body import v_value, v_values, wet_part_area
from hulllab.geometry import unit_square
from hulllab.sampling import RandomStream

square = unit_square()

print("v at a few points of the unit square (scan+polish evaluator):")
for z in ((0.5, 0.5), (0.25, 0.25), (0.1, 0.2), (0.5, 0.001)):
    closed = 2 * min(
        z[0] * z[1], z[0] * (1 - z[1]), (1 - z[0]) * z[1], (1 - z[0]) * (1 - z[1])
    )
    print(f"  v{z} = {v_value(square, z):.6f}   closed form {closed:.6f}")

print()
print("wet-part areas by Monte Carlo (2e6 points each):")
print(f"{'delta':>8} {'estimate':>10} {'stderr':>9} {'exact':>10} {'(l/4)dlog(1/d)':>14}")
for run, delta in enumerate((1e-2, 1e-3, 1e-4)):
    est, se = wet_part_area(square, delta, RandomStream(5, run), 2_000_000)
    exact = 2 * delta * (1 + math.log(1 / (2 * delta)))
    quarter = delta * math.log(1 / delta)
    print(f"{delta:>8.0e} {est:>10.6f} {se:>9.2g} {exact:>10.6f} {quarter:>14.6f}")

print()
print("bulk evaluator agrees with the scan evaluator:")
pts = [(0.3, 0.4), (0.05, 0.8), (0.5, 0.25)]
bulk = v_values(square, pts)
for z, vb in zip(pts, bulk):
    print(f"  {z}: bulk {vb:.9f}  scan {v_value(square, z):.9f}")
