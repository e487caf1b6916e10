"""
Almost primes among traces
==========================

The trace of a matrix in SL_2(Z) as a polynomial on the group: how many
points of bounded height have trace with few prime factors, how well
the congruence densities rho(d)/d describe the counts, and how soon a
prescribed residue class mod q shows up with an almost-prime trace.
"""

# %%
import math

from homocount.enumeration import enumerate_sl2
from homocount.geometry import PolynomialMap, SpecialLinear
from homocount.sift import almost_prime_count, linnik_search, rho_trace_sl2, sieve_axiom_check, w_product

SL2 = SpecialLinear(2)
trace = PolynomialMap.trace(2)
res = enumerate_sl2(500)

apc = almost_prime_count(res, trace)
print("points:", apc.total, " zero trace:", apc.excluded_zero)
for r in range(1, 7):
    print(f"Omega(trace) <= {r}: {apc.at_most(r)}")

# %%
ax = sieve_axiom_check(SL2, trace, 500, 13, res, tau=0.6)
print("   d   actual      main          R")
for row in ax.rows[:12]:
    print(f"{row.d:4d} {row.actual:8d} {float(row.main):10.1f} {float(row.R):10.1f}")
print("gap at p=3:", round(ax.relative_gap(3), 4), " p=5:", round(ax.relative_gap(5), 4))

# %%
for p in (2, 3, 5, 7, 11, 13):
    print(p, rho_trace_sl2(p))
for z in (50, 100, 200):
    w = w_product(trace, SL2, z, rho=rho_trace_sl2)
    print(f"W({z}) * log z = {float(w) * math.log(z):.3f}")

# %%
for q in (23, 29, 31):
    r = linnik_search(res, trace, 5, q, 3.0, 6, SL2)
    print(f"q={q}: {r.found.flat()}  height={r.height:.1f}  sigma={r.sigma_emp:.3f}  Omega={r.omega_value}")
