"""
Lifting residue classes
=======================

How tall is the shortest integral matrix reducing to a given class of
SL_2(Z/q)?  And why the same question has no polynomial answer for a
Pell conic.
"""

# %%
from homocount.enumeration import enumerate_sl2
from homocount.geometry import GroupVariety, PellNormForm, SpecialLinear
from homocount.lift import fiber_balance, lift_report, lifting_exponent_profile, min_lift
from homocount.modular import ResiduePoint, group_order

SL2 = SpecialLinear(2)
res = enumerate_sl2(200)

print(" q  |SL_2(Z/q)|  hit  worst height  sigma_emp")
for q in (2, 3, 5, 7, 11, 13, 16, 23):
    rep = lift_report(res, q, group_order(SL2, q))
    print(f"{q:3d} {rep.classes_total:10d} {rep.classes_hit:5d} {rep.worst_height:12.2f} {rep.sigma_emp:9.3f}")

# %%
# one class and its minimal lift (ties broken by the 0, 1, -1, 2, -2 ... entry order)
xbar = ResiduePoint(7, ((3, 0), (0, 5)))
print(xbar, "->", min_lift(xbar, GroupVariety(SL2), 60))

# %%
# the Pell conic: lifts are powers of the fundamental unit, so the
# exponent grows with the order of 3 + 2 sqrt 2 mod q
for rep in lifting_exponent_profile(PellNormForm(2), [3, 5, 7, 11, 13, 17, 19, 23, 29, 31]):
    print(f"q={rep.q:3d}  classes={rep.classes_total:3d}  sigma_emp={rep.sigma_emp:6.3f}")

# %%
# fibres of reduction mod 3 fill up evenly
for T in (50, 100, 200, 400):
    fb = fiber_balance(SL2, 3, T, res if T <= 200 else None)
    print(f"T={T:4d}  total={fb.total:7d}  max relative deviation={fb.deviation:.4f}")
