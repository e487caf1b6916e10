"""
Counting integral points by height
==================================

SL_2(Z) against the Pell conic x^2 - 2y^2 = 1: polynomial versus
logarithmic growth.  Run with ``python notebooks/01_counting_and_growth.py``.
"""

# %%
import math

from homocount.enumeration import count_sl2, enumerate_exhaustive, enumerate_pell, enumerate_sl2, fit_growth
from homocount.geometry import GroupVariety, SpecialLinear

# the fast path and the brute-force oracle agree point for point
V = GroupVariety(SpecialLinear(2))
fast, slow = enumerate_sl2(20), enumerate_exhaustive(V, 20)
print("points of height <= 20:", len(fast), "oracle agrees:", (fast.points == slow.points).all())
print("first few, sorted by height:")
print(fast.matrices()[:6])

# %%
# N_T grows like T^2 (n^2 - n with n = 2)
grid = [100, 200, 400, 800, 1600, 3000]
counts = [(T, count_sl2(T)) for T in grid]
for T, c in counts:
    print(f"T={T:5d}  N_T={c:9d}  N_T/T^2={c / T**2:.4f}")
print("fitted exponent:", round(fit_growth(counts).alpha_hat, 4))

# %%
# the Pell conic only has the powers of 3 + 2 sqrt 2, so N_T ~ log T
pell = [(T, len(enumerate_pell(2, T))) for T in (1e2, 1e3, 1e4, 1e5, 1e6)]
for T, c in pell:
    print(f"T={T:9.0f}  N_T={c:3d}  N_T/log T={c / math.log(T):.3f}")
print("fitted exponent:", round(fit_growth(pell).alpha_hat, 4))
