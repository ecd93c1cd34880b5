"""Exact moment identities for the hull area and the Poisson-binomial
coupling bounds.

Efron:  E area(hull_n)/area = 1 - E f0(hull_{n+1})/(n+1)
Buchta: Var area(hull_n)/area^2 = (Var f0_{n+2} + A_n - B_n)/((n+1)(n+2))

Both are exact, so two independent Monte Carlo sides should differ by pure
noise. The coupling bounds control sum_m m^k |Poisson(np) - Binomial(n,p)|
pmf differences; the k=2 case is summed exactly here, where the printed
bound 2np^2(1+np) turns out to be too small at small np (its own derivation
gives 3np^2 + 2n^2p^3, which always holds).
"""
from hulllab.experiments import buchta_check, efron_check, vervaat_values
from hulllab.geometry import unit_square
from hulllab.sampling import RandomStream

square = unit_square()
reps = 100_000

print(f"identity checks on the square, {reps} replications per side:")
print(f"{'identity':>9} {'n':>3} {'lhs':>10} {'rhs':>10} {'diff/se':>8}")
for n in (1, 2, 5, 10):
    e = efron_check(square, n, reps, RandomStream(21, n))
    ze = e.diff / e.combined_stderr if e.combined_stderr else 0.0
    print(f"{'efron':>9} {n:>3} {e.lhs:>10.6f} {e.rhs:>10.6f} {ze:>+8.2f}")
for n in (1, 2, 5, 10):
    b = buchta_check(square, n, reps, RandomStream(22, n))
    zb = b.diff / b.combined_stderr if b.combined_stderr else 0.0
    print(f"{'buchta':>9} {n:>3} {b.lhs:>10.6f} {b.rhs:>10.6f} {zb:>+8.2f}")

print()
print("coupling bounds, exact sums (x marks a violated printed bound):")
print(f"{'n':>5} {'p':>6} {'k':>2} {'sum':>12} {'printed bound':>13} {'proof bound':>12}")
for n in (10, 1000):
    for p in (1e-3, 1e-1):
        for k in (0, 1, 2):
            v = vervaat_values(n, p, k)
            proof = {
                0: 2 * p,
                1: 2 * n * p * p,
                2: 3 * n * p * p + 2 * (n * p) ** 2 * p,
            }[k]
            mark = " " if v.holds else "x"
            print(
                f"{n:>5} {p:>6g} {k:>2} {v.total:>12.4g} {v.bound:>12.4g}{mark}"
                f" {proof:>12.4g}"
            )
