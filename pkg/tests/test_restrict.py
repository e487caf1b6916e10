import numpy as np
import pytest
from hypothesis import given, strategies as st

from homocount.enumeration import enumerate_exhaustive, enumerate_sl2, geometric_grid
from homocount.geometry import GroupVariety, SpecialLinear
from homocount.numeric import DomainError
from homocount.restrict import (
    SubvarietySpec,
    count_subvariety,
    distinct_eigenvalues,
    generic_count,
    generic_mask,
    grid_counts,
    lower_left_zero,
    nonconcentration_report,
    union_count,
)

SL2 = SpecialLinear(2)


def test_subvariety_validation():
    with pytest.raises(DomainError):
        SubvarietySpec(SL2, (), 1)
    with pytest.raises(DomainError):
        SubvarietySpec(SL2, ("x2",), 3)
    with pytest.raises(DomainError):
        SubvarietySpec(SL2, ("x2",), 1, declared_deg=0)


def test_lower_left_counts():
    Y = lower_left_zero()
    assert Y.declared_dim == 2
    assert count_subvariety(Y, 10) == 38
    brute = sum(1 for m in enumerate_sl2(10).matrices() if m[1, 0] == 0)
    assert brute == 38


def test_degenerate_subvarieties():
    ident = SubvarietySpec(SL2, ("x0 - 1", "x1", "x2", "x3 - 1"), 0)
    assert count_subvariety(ident, 50) == 1
    far = SubvarietySpec(SL2, ("x0 + x3 - 1000000",), 2)
    assert count_subvariety(far, 50) == 0


@given(st.lists(st.floats(2, 80), min_size=1, max_size=5))
def test_subvariety_counts_bounded(grid):
    Y = lower_left_zero()
    nG, nY = grid_counts([Y], grid)
    for T, g, y in zip(grid, nG, nY[0]):
        assert y <= g
        assert g == len(enumerate_sl2(T))
        assert y == count_subvariety(Y, T)


def test_grid_counts_with_result():
    res = enumerate_sl2(60)
    a = grid_counts([lower_left_zero()], [10, 30, 60], res)
    b = grid_counts([lower_left_zero()], [10, 30, 60])
    assert a == b
    with pytest.raises(DomainError):
        grid_counts([lower_left_zero()], [61], res)


def test_union_and_intersection():
    A = lower_left_zero()
    B = SubvarietySpec(SL2, ("x1",), 2, name="upper-right=0")
    union, total = union_count([A, B], 40)
    both = count_subvariety(A.intersect(B), 40)
    assert union == total - both
    assert both == 2


def test_nonconcentration_report():
    rep = nonconcentration_report(lower_left_zero(), geometric_grid(50, 400, 6))
    assert rep.exponent_Y < 1.2 and rep.exponent_G > 1.9
    assert all(ny <= ng for _, ny, ng in rep.grid)
    with pytest.raises(DomainError):
        nonconcentration_report(lower_left_zero(), [10, 20, 30])


def test_distinct_eigenvalues():
    mats = np.array([[[1, 0], [0, 1]], [[2, 1], [1, 1]], [[1, 1], [0, 1]], [[3, 0], [0, 2]]])
    assert distinct_eigenvalues(mats).tolist() == [False, True, False, True]


def test_distinct_eigenvalues_3x3():
    mats = np.array([np.eye(3, dtype=np.int64), np.diag([1, 2, 3]), [[2, 1, 0], [0, 2, 0], [0, 0, 1]]],
                    dtype=object)
    assert distinct_eigenvalues(mats).tolist() == [False, True, False]


def _disc2(m):
    return int(np.trace(m)) ** 2 - 4 * int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4))
def test_generic_mask_2x2(entries):
    m = np.array(entries, dtype=np.int64).reshape(2, 2)
    det = int(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
    expect = bool((m != 0).all()) and det != 0 and _disc2(m) != 0 and _disc2(m.T @ m) != 0
    assert generic_mask(m.reshape(1, 4), 2)[0] == expect


def test_generic_counts():
    assert generic_count(2, 1.5) == (4, 0)
    total, gen = generic_count(2, 200)
    assert gen / total > 0.9


def test_generic_sl3_small():
    # at T = 3 every nonzero-entry point would be a +-1 matrix, whose determinant is even
    res = enumerate_exhaustive(GroupVariety(SpecialLinear(3)), 4.5)
    assert generic_count(3, 3, res)[1] == 0
    total, gen = generic_count(3, 4.5, res)
    assert total == len(res) and 0 < gen < total
