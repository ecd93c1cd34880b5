"""Hull vertex counts in polygonal containers vs closed-form expansions.

For n uniform points in a convex polygon with ell vertices and corner
triangle areas F_i, the vertex count of their hull satisfies

    E f0   = (2 ell/3) log n + (2/3) sum log(F_i/area) + 2 gamma ell/3 + ...
    Var f0 = (10 ell/27) log n + (10/27) sum log(F_i/area)
             + (10 gamma - 2 pi^2) ell/27 + ...

Runs the binomial and Poissonized models on a few containers and compares.
"""
from hulllab.experiments import ExperimentConfig, predicted_moments, run_experiment
from hulllab.geometry import regular_polygon, unit_area_triangle, unit_square

REPS = 4000

print(f"{'container':>12} {'model':>9} {'n':>7} {'mc mean':>8} {'pred':>8}"
      f" {'mc var':>8} {'pred':>8} {'ks':>7}")
for name, poly in (
    ("triangle", unit_area_triangle()),
    ("square", unit_square()),
    ("regular-6", regular_polygon(6)),
):
    for model in ("binomial", "poisson"):
        for n in (1000, 10_000):
            cfg = ExperimentConfig(
                container=poly, model=model, n=n, reps=REPS, root_seed=7
            )
            s = run_experiment(cfg)
            p = predicted_moments(poly, n, model)
            print(
                f"{name:>12} {model:>9} {n:>7} {s.mean:>8.3f} {p.mean:>8.3f}"
                f" {s.variance:>8.3f} {p.variance:>8.3f} {s.ks:>7.4f}"
            )

print()
print("the remainders decay like (log n)^2 n^(-1/4) (mean) and")
print("(log n)^4 n^(-1/4) (variance), so desk-scale n shows small offsets;")
print("both models share the same leading expansion.")
