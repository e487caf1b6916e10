"""
Points on proper subvarieties
=============================

Matrices with a zero lower-left entry are a codimension-one slice of
SL_2, and they hold far fewer integral points: about T against T^2.
"""

# %%
from homocount.enumeration import geometric_grid
from homocount.exponents import preset_params, subvariety_exponent
from homocount.restrict import generic_count, lower_left_zero, nonconcentration_report

Y = lower_left_zero()
rep = nonconcentration_report(Y, geometric_grid(100, 1600, 6))
for T, ny, ng in rep.grid:
    print(f"T={T:7.1f}  N_T(Y)={ny:7d}  N_T(G)={ng:9d}")
print("exponent on Y:", round(rep.exponent_Y, 3), " on G:", round(rep.exponent_G, 3))
print("upper bound from the spectral parameters:", round(rep.theorem_exponent_bound, 4))

# %%
P = preset_params("sl2")
for dim_Y in range(P.dim):
    print("dim Y =", dim_Y, " multiplier", subvariety_exponent(P, dim_Y))

# %%
# generic matrices (nonzero entries and minors, distinct eigen- and singular values) take over
for T in (10, 50, 100, 200, 400):
    N, Ng = generic_count(2, T)
    print(f"T={T:4d}  N={N:7d}  generic={Ng:7d}  ratio={Ng / N:.3f}")
