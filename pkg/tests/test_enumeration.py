from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homocount import enumeration
from homocount.enumeration import (
    count_sl2,
    enumerate_exhaustive,
    enumerate_pell,
    enumerate_sl2,
    feasible_T,
    fit_growth,
    geometric_grid,
    growth_exponent,
    merge_results,
    orbit_bfs,
    pell_fundamental,
    sort_points,
    sq_bound,
    zigzag,
)
from homocount.exponents import split_form
from homocount.geometry import (
    GroupVariety,
    OrbitVariety,
    PellNormForm,
    QuadraticForm,
    QuadricRepresentation,
    SpecialLinear,
    is_on_variety,
)
from homocount.modular import ResourceError
from homocount.numeric import DomainError

SL2 = GroupVariety(SpecialLinear(2))


@given(st.fractions(min_value=0, max_value=10**6, max_denominator=1000))
def test_sq_bound_exact(T):
    B = sq_bound(T)
    assert B <= T * T < B + 1


def test_sq_bound_float_edge():
    assert sq_bound(5) == 25
    assert sq_bound(Fraction(1, 2)) == 0
    assert sq_bound(2**0.5) == 2


def test_zigzag_order():
    assert zigzag(np.array([0, 1, -1, 2, -2])).tolist() == [0, 1, 2, 3, 4]


@given(st.lists(st.lists(st.integers(-5, 5), min_size=3, max_size=3), min_size=1, max_size=40))
def test_sort_points_is_canonical(rows):
    pts = np.array(rows, dtype=np.int64)
    a = sort_points(pts)
    b = sort_points(pts[::-1].copy())
    assert np.array_equal(a, b)
    h = (a * a).sum(axis=1)
    assert (np.diff(h) >= 0).all()
    obj = sort_points(pts.astype(object))
    assert np.array_equal(obj.astype(np.int64), a)


@pytest.mark.parametrize("T", [0.5, 1, 1.5, 2, 5, 10.3, 20])
def test_sl2_fast_path_matches_exhaustive(T):
    fast = enumerate_sl2(T)
    slow = enumerate_exhaustive(SL2, T)
    assert np.array_equal(fast.points, slow.points)
    assert count_sl2(T) == len(slow)


def test_sl2_small_counts():
    assert len(enumerate_sl2(1.5)) == 4
    assert len(enumerate_sl2(1)) == 0


@given(st.floats(1, 40))
def test_enumeration_invariants(T):
    res = enumerate_sl2(T)
    assert res.complete
    assert len(res.point_set()) == len(res)
    assert (res.norm_values() <= sq_bound(T)).all()
    for m in res.matrices()[:: max(1, len(res) // 20)]:
        assert is_on_variety(m, SL2)


@given(st.floats(2, 60), st.floats(2, 60))
def test_counts_monotone(T1, T2):
    lo, hi = sorted((T1, T2))
    assert count_sl2(lo) <= count_sl2(hi)


def test_restrict_matches_fresh():
    big = enumerate_sl2(30)
    assert np.array_equal(big.restrict(12).points, enumerate_sl2(12).points)
    with pytest.raises(DomainError):
        big.restrict(31)


@pytest.mark.parametrize("k", [1, 2, 4])
def test_shard_merge_deterministic(k):
    parts = [enumerate_sl2(40, k, i) for i in range(k)]
    assert all(not p.complete for p in parts) or k == 1
    merged = merge_results(parts, complete=True)
    assert np.array_equal(merged.points, enumerate_sl2(40).points)


def test_merge_rejects_overlap():
    a = enumerate_sl2(10)
    with pytest.raises(DomainError):
        merge_results([a, a])


def test_exhaustive_sl3_small():
    res = enumerate_exhaustive(GroupVariety(SpecialLinear(3)), 2)
    assert all(is_on_variety(m, res.variety) for m in res.matrices())
    assert len(res) == len(res.point_set())


def test_exhaustive_budget(monkeypatch):
    with pytest.raises(ResourceError):
        enumerate_exhaustive(GroupVariety(SpecialLinear(3)), 50, budget=10**4)
    monkeypatch.setattr(enumeration, "EXHAUSTIVE_BUDGET", 10)
    with pytest.raises(ResourceError):
        enumerate_exhaustive(SL2, 20)
    assert feasible_T(SL2) >= 0


def test_exhaustive_quadric_representation():
    V = QuadricRepresentation(split_form(3), QuadraticForm(((1,),)))
    res = enumerate_exhaustive(V, 6)
    assert len(res) > 0 and all(is_on_variety(m, V) for m in res.matrices())


def test_pell_fundamental():
    assert pell_fundamental(2) == (3, 2)
    assert pell_fundamental(61) == (1766319049, 226153980)


@pytest.mark.parametrize("D", [2, 3, 5, 7])
def test_pell_matches_exhaustive(D):
    fast = enumerate_pell(D, 300)
    slow = enumerate_exhaustive(PellNormForm(D), 300)
    assert np.array_equal(fast.points, slow.points)


def test_pell_big_heights_exact():
    res = enumerate_pell(2, 1e30)
    assert all(int(x) ** 2 - 2 * int(y) ** 2 == 1 for x, y in res.points)


def test_orbit_bfs_validates():
    O = OrbitVariety(SpecialLinear(2), (1, 0))
    res = orbit_bfs(O, 8, slack=3.0, validate=True)
    assert res.complete
    assert len(res) == len(enumerate_exhaustive(O, 8))


def test_fit_growth_exact_power():
    grid = [(T, int(7 * T**2)) for T in geometric_grid(10, 1000, 6)]
    assert fit_growth(grid).alpha_hat == pytest.approx(2.0, abs=1e-3)


def test_fit_growth_errors():
    with pytest.raises(DomainError):
        fit_growth([(1, 1), (2, 2), (3, 3)])
    with pytest.raises(DomainError):
        fit_growth([(1, 3), (2, 2), (3, 3), (4, 4)])
    with pytest.raises(DomainError, match="first usable T"):
        growth_exponent(SL2, [1, 2, 3, 4])


def test_growth_sl2_small():
    est = growth_exponent(SL2, geometric_grid(50, 400, 6))
    assert abs(est.alpha_hat - 2) < 0.15
