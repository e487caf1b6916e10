"""Closed-form lifting, counting and sieve exponents in exact rational arithmetic.

All formulas take a :class:`SpectralParams` row.  Two conventions for the
even rounding parameter coexist and are kept under different names:
``numeric.n_e(p)`` (least even integer >= p/2, or 1 at p = 2) and
``n_e_half_floor(m)`` (least even integer >= floor(m/2)) used by the spin
lifting exponents.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Tuple

from .geometry import (
    QuadraticForm,
    QuadricGroup,
    SpecialLinear,
    SpectralParams,
    default_spectral_params,
)
from .numeric import DomainError, n_e


@dataclass(frozen=True)
class ExponentReport:
    name: str
    inputs: Dict[str, str]
    value: Fraction
    paper_anchor: str
    least_integer: int = None

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "value": str(self.value),
            "float": float(self.value),
            "least_integer": self.least_integer,
            "anchor": self.paper_anchor,
            "inputs": dict(self.inputs),
        }


def least_integer_above(x: Fraction) -> int:
    """Least integer r with r > x."""
    return math.floor(x) + 1


def n_e_half_floor(m: int) -> int:
    """Least even integer >= floor(m/2)."""
    k = m // 2
    return k if k % 2 == 0 else k + 1


def _n_e_at_least(x) -> int:
    k = math.ceil(Fraction(x))
    return k if k % 2 == 0 else k + 1


def sigma0_group(params: SpectralParams) -> Fraction:
    """Group lifting exponent: dim (a + d) 2 n_e(p) / (alpha a)."""
    return Fraction(params.dim) * (params.a + params.d) / params.a * 2 * n_e(params.p) / params.alpha_group


def delta0(params: SpectralParams) -> Fraction:
    """Error-term saving a / ((a + d) 2 n_e(p)) of the congruence counting asymptotic."""
    value = params.a / (params.a + params.d) / (2 * n_e(params.p))
    if Fraction(params.dim) / (params.alpha_group * value) != sigma0_group(params):
        raise AssertionError("sigma0 = dim / (alpha delta0) identity failed")
    return value


def sigma_m_spin(m: int) -> Fraction:
    """Lifting exponent for x^T B x = A with B split of size m (variety level)."""
    if m < 3:
        raise DomainError("sigma_m needs m >= 3")
    ne = n_e_half_floor(m)
    if m % 2:
        return Fraction(4 * m * (m * m - m + 1) * ne, m - 1)
    return Fraction(4 * (m - 1) * (m * m - m + 1) * ne, m + 2)


def sigma_group_spin(m: int) -> Fraction:
    """Group-level lifting exponent for split Spin of size m, as tabulated for the spin case."""
    if m < 3:
        raise DomainError("sigma_group_spin needs m >= 3")
    ne = n_e_half_floor(m)
    if m % 2:
        return Fraction(2 * m * (m * m - m + 1) * ne, m - 1)
    return Fraction(2 * (m - 1) * (m * m - m + 1) * ne, m + 2)


def subvariety_exponent(params: SpectralParams, dim_Y: int) -> Fraction:
    """Multiplier 1 - a (dim G - dim Y) / (dim G (a + d) 2 n_e(p)) for N_T(Y) vs N_T(G)."""
    if not 0 <= dim_Y < params.dim:
        raise DomainError("need 0 <= dim Y < dim G")
    return 1 - params.a * (params.dim - dim_Y) / (params.dim * (params.a + params.d) * 2 * n_e(params.p))


def sl_exponent(n: int, dim_Y: int) -> Fraction:
    """Counting exponent for a subvariety of SL_n, n_e = least even integer >= n - 1.

    The printed formula carries dim(X) in the numerator; dim(Y) is used.
    """
    if n < 2 or not 0 <= dim_Y < n * n - 1:
        raise DomainError("need n >= 2 and 0 <= dim Y < n^2 - 1")
    ne = _n_e_at_least(n - 1)
    return Fraction(n * n - n) - Fraction(n * n - 1 - dim_Y, (n * n + n) * 2 * ne)


def _check_td(t: int, deg: int) -> None:
    if t < 1 or deg < 1:
        raise DomainError("t(f) and deg(f) must be positive")


def r_symmetric(params: SpectralParams, t: int, deg: int) -> Tuple[Fraction, int]:
    """Almost-prime threshold on symmetric orbits and the least admissible r."""
    _check_td(t, deg)
    if params.alpha_orbit is None:
        raise DomainError("r_symmetric needs the orbit growth exponent")
    dim = params.dim
    x = 9 / params.alpha_orbit * (1 + dim) * (1 + 3 * dim) * 2 * n_e(params.p) * t * deg
    return x, least_integer_above(x)


def kappa(params: SpectralParams, t: int) -> Fraction:
    """Sieve level exponent: z = |orbit|^kappa."""
    _check_td(t, 1)
    dim = params.dim
    return Fraction(1, 9 * t * (1 + dim) * (1 + 3 * dim) * 2 * n_e(params.p))


def r_linnik_group(params: SpectralParams, sigma, t: int, deg: int) -> Tuple[Fraction, Fraction, int]:
    """(sigma0, r threshold, least r) for Linnik-type problems on group varieties."""
    _check_td(t, deg)
    sigma = Fraction(sigma)
    alpha, dim = params.alpha_group, params.dim
    s0 = Fraction(dim) * (1 + dim) * 2 * n_e(params.p) / alpha
    if sigma <= s0:
        raise DomainError(f"sigma must exceed sigma0 = {s0}")
    r = 9 * alpha * sigma / (alpha * sigma - dim) * s0 * t * deg
    return s0, r, least_integer_above(r)


def r_linnik_symmetric(params: SpectralParams, sigma, t: int, deg: int) -> Tuple[Fraction, Fraction, int]:
    """(sigma0, r threshold, least r) for Linnik-type problems on symmetric orbits."""
    _check_td(t, deg)
    if params.alpha_orbit is None:
        raise DomainError("symmetric Linnik exponents need the orbit growth exponent")
    sigma = Fraction(sigma)
    alpha, dim = params.alpha_orbit, params.dim
    s0 = Fraction(dim) * (1 + 3 * dim) * 2 * n_e(params.p) / alpha
    if sigma <= s0:
        raise DomainError(f"sigma must exceed sigma0 = {s0}")
    r = sigma / (alpha * sigma - dim) * 9 * t * deg * dim * (1 + 3 * dim) * 2 * n_e(params.p)
    return s0, r, least_integer_above(r)


def tau0(params: SpectralParams, symmetric: bool = False) -> Fraction:
    """Upper limit for the sieve level exponent tau."""
    dim = params.dim
    tail = (1 + 3 * dim) if symmetric else (1 + dim)
    return Fraction(1, 2 * n_e(params.p) * dim * tail)


# --------------------------------------------------------------------------
# presets


def split_form(m: int) -> QuadraticForm:
    """Diagonal form of signature (floor(m/2), m - floor(m/2))."""
    k = m // 2
    diag = [1] * k + [-1] * (m - k)
    return QuadraticForm(tuple(tuple(diag[i] if i == j else 0 for j in range(m)) for i in range(m)))


def lorentz_form(m: int) -> QuadraticForm:
    diag = [1] * (m - 1) + [-1]
    return QuadraticForm(tuple(tuple(diag[i] if i == j else 0 for j in range(m)) for i in range(m)))


def preset_params(name: str) -> SpectralParams:
    """Parameters for presets ``sl<n>``, ``spin-split-<m>``, ``quadric-lorentz-<m>``."""
    if name.startswith("sl") and name[2:].isdigit():
        return default_spectral_params(SpecialLinear(int(name[2:])))
    if name.startswith("spin-split-"):
        return default_spectral_params(QuadricGroup(split_form(int(name.rsplit("-", 1)[1])), "spin"))
    if name.startswith("quadric-lorentz-"):
        return default_spectral_params(QuadricGroup(lorentz_form(int(name.rsplit("-", 1)[1])), "spin"))
    raise DomainError(f"unknown preset {name!r}")


def symmetric_matrix_orbit_params(n: int) -> SpectralParams:
    """SL_n acting on integral symmetric matrices by B -> g^T A g."""
    base = default_spectral_params(SpecialLinear(n))
    return base.replace(alpha_orbit=Fraction(n * n - n, 2))


def vector_orbit_params(n: int, signature: str = "split") -> SpectralParams:
    """Spin(Q) acting on integral vectors, Q in n variables."""
    form = split_form(n) if signature == "split" else lorentz_form(n)
    return default_spectral_params(QuadricGroup(form, "spin")).replace(alpha_orbit=n - 2)


def exponent_table(name: str, sigma=None, t: int = 1, deg: int = 1) -> List[ExponentReport]:
    """Every closed-form exponent for one preset."""
    params = preset_params(name)
    ins = {k: str(v) for k, v in params.to_dict().items()}
    rows = [
        ExponentReport("sigma0", ins, sigma0_group(params), "group lifting exponent"),
        ExponentReport("delta0", ins, delta0(params), "congruence counting error saving"),
        ExponentReport("tau0", ins, tau0(params), "sieve level, group case"),
        ExponentReport("tau0_symmetric", ins, tau0(params, True), "sieve level, symmetric case"),
    ]
    for dim_Y in sorted({0, params.dim - 1}):
        rows.append(ExponentReport(f"subvariety_exponent[dimY={dim_Y}]", ins,
                                   subvariety_exponent(params, dim_Y), "non-concentration multiplier"))
    s0, r, rl = r_linnik_group(params, sigma if sigma is not None else _default_sigma(params), t, deg)
    rows.append(ExponentReport("sigma0_linnik", ins, s0, "Linnik, group case"))
    rows.append(ExponentReport("r_linnik_group", ins, r, "Linnik, group case", rl))
    rows.append(ExponentReport("kappa", ins, kappa(params, t), "sieve level exponent"))
    if params.alpha_orbit is not None:
        x, rl = r_symmetric(params, t, deg)
        rows.append(ExponentReport("r_symmetric", ins, x, "almost primes on symmetric orbits", rl))
        s0, r, rl = r_linnik_symmetric(params, _default_sigma(params, True), t, deg)
        rows.append(ExponentReport("sigma0_linnik_symmetric", ins, s0, "Linnik, symmetric case"))
        rows.append(ExponentReport("r_linnik_symmetric", ins, r, "Linnik, symmetric case", rl))
    if name.startswith("spin-split-"):
        m = int(name.rsplit("-", 1)[1])
        rows.append(ExponentReport("sigma_m", {"m": str(m)}, sigma_m_spin(m), "quadric representation lifting"))
        rows.append(ExponentReport("sigma_group_spin", {"m": str(m)}, sigma_group_spin(m), "spin group lifting"))
    if name.startswith("sl") and name[2:].isdigit():
        n = int(name[2:])
        rows.append(ExponentReport(f"sl_exponent[dimY={n * n - 2}]", {"n": str(n)}, sl_exponent(n, n * n - 2),
                                   "subvarieties of SL_n (dim Y read for dim X)"))
    return rows


def _default_sigma(params: SpectralParams, symmetric: bool = False) -> Fraction:
    dim = params.dim
    if symmetric:
        s0 = Fraction(dim) * (1 + 3 * dim) * 2 * n_e(params.p) / params.alpha_orbit
    else:
        s0 = Fraction(dim) * (1 + dim) * 2 * n_e(params.p) / params.alpha_group
    return 2 * s0
