import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from homocount.geometry import (
    ADJOINT_FORM,
    GroupVariety,
    LatticePoint,
    OrbitVariety,
    PellNormForm,
    Polynomial,
    PolynomialMap,
    QuadraticForm,
    QuadricGroup,
    QuadricRepresentation,
    SpecialLinear,
    SpectralParams,
    adjoint_sl2,
    apply_group,
    default_spectral_params,
    height,
    int_det,
    is_on_variety,
    sl_generators,
)
from homocount.exponents import lorentz_form, split_form
from homocount.numeric import DomainError

small = st.integers(-20, 20)


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_int_det_matches_numpy(rows):
    assert int_det(rows) == round(np.linalg.det(np.array(rows, dtype=float)))


def test_dimensions():
    assert SpecialLinear(3).dim_alg == 8
    assert QuadricGroup(split_form(5)).dim_alg == 10


def test_quadratic_form_validation():
    with pytest.raises(DomainError):
        QuadraticForm(((1, 2), (0, 1)))
    with pytest.raises(DomainError):
        QuadraticForm(((1, 1), (1, 1)))
    with pytest.raises(DomainError):
        QuadraticForm(((1, 0), (0, -1)), signature=(2, 0))
    assert lorentz_form(4).signature == (3, 1)
    assert split_form(5).signature == (2, 3)


def test_pell_rejects_square():
    with pytest.raises(DomainError):
        PellNormForm(9)
    with pytest.raises(DomainError):
        QuadricRepresentation(split_form(2), split_form(3))


def test_sl_generators_in_group():
    for n in (2, 3):
        assert all(SpecialLinear(n).contains(g) for g in sl_generators(n))


@given(small, small)
def test_adjoint_preserves_form(b, c):
    g = ((1 + b * c, b), (c, 1))
    h = adjoint_sl2(g)
    assert QuadricGroup(ADJOINT_FORM).contains(h)


@given(st.lists(small, min_size=4, max_size=4))
def test_height_is_euclidean(entries):
    p = LatticePoint(np.array(entries).reshape(2, 2))
    assert p.cached_height == pytest.approx(math.sqrt(sum(v * v for v in entries)))
    assert height(p, "sup") == max(abs(v) for v in entries)


def test_is_on_variety():
    V = GroupVariety(SpecialLinear(2))
    assert is_on_variety([[2, 1], [1, 1]], V)
    assert not is_on_variety([[2, 1], [1, 2]], V)
    with pytest.raises(DomainError):
        is_on_variety([1, 2, 3], V)
    assert is_on_variety([3, 2], PellNormForm(2))
    R = QuadricRepresentation(split_form(2), QuadraticForm(((1,),)))
    assert is_on_variety([[1], [0]], R)


def test_apply_group():
    V = GroupVariety(SpecialLinear(2))
    img = apply_group([[1, 1], [0, 1]], [[1, 0], [1, 1]], V)
    assert img.flat() == (2, 1, 1, 1)
    with pytest.raises(DomainError):
        apply_group([[2, 0], [0, 1]], [[1, 0], [0, 1]], V)
    pell = PellNormForm(2)
    assert apply_group(((3, 4), (2, 3)), (3, 2), pell).flat() == (17, 12)


def test_orbit_variety():
    O = OrbitVariety(SpecialLinear(2), (1, 0))
    assert is_on_variety((5, 7), O)
    assert not is_on_variety((2, 4), O)
    with pytest.raises(DomainError):
        OrbitVariety(SpecialLinear(2), (1, 0), generators=(((2, 0), (0, 1)),))


def test_polynomial_parse_and_degree():
    p = Polynomial.parse("x0*x3 - x1*x2", 4)
    assert p.degree == 2
    assert p([[2, 1], [1, 1]]) == 1
    with pytest.raises(DomainError):
        Polynomial.parse("x0/2", 4)


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=20))
def test_evaluate_matches_call(rows):
    p = Polynomial.parse("3*x0**2 - x1*x2 + 7*x3 - 1", 4)
    pts = np.array(rows, dtype=np.int64)
    assert p.evaluate(pts).tolist() == [p(r) for r in rows]


def test_evaluate_falls_back_to_python_ints():
    p = Polynomial.parse("x0**5", 1)
    v = p.evaluate(np.array([[10**5]], dtype=np.int64))
    assert int(v[0]) == 10**25


def test_polynomial_map_normalizer():
    f = PolynomialMap(Polynomial.parse("x0 + x3", 4), normalizer=2)
    assert f.values(np.array([[1, 0, 0, 1]])).tolist() == [1]
    with pytest.raises(ValueError):
        f.values(np.array([[1, 0, 0, 2]]))
    tr = PolynomialMap.trace(2)
    assert tr.deg == 1 and tr.sampled_gcd(np.array([[1, 0, 0, 1], [2, 1, 1, 1]])) == 1


def test_spectral_params_validation():
    with pytest.raises(DomainError):
        SpectralParams(p=1, a=1, d=3, dim=3, alpha_group=2)
    with pytest.raises(DomainError):
        SpectralParams(p=2, a=2, d=3, dim=3, alpha_group=2)
    with pytest.raises(DomainError):
        SpectralParams(p=2, a=1, d=3, dim=3, alpha_group=4)


def test_default_params():
    sl3 = default_spectral_params(SpecialLinear(3))
    assert (sl3.p, sl3.dim, sl3.alpha_group) == (4, 8, 6)
    lor = default_spectral_params(QuadricGroup(lorentz_form(4)))
    assert lor.p == Fraction(27, 7) and lor.alpha_group == 2
    with pytest.raises(DomainError):
        default_spectral_params(SpecialLinear(1))


@pytest.mark.parametrize("m", [3, 4, 5, 6, 7])
def test_default_params_positive(m):
    P = default_spectral_params(QuadricGroup(split_form(m)))
    assert P.alpha_group <= P.dim and P.p >= 2
