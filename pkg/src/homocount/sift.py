"""Sieve-side experiments: almost-prime counts, sieve axioms, W(z), Linnik searches.

Points whose f-value is zero are kept out of every Omega statistic and
counted separately.  Nothing here runs a weighted sieve; the ingredients
(local densities, remainders R_d) and the conclusions (counts of points
with few prime factors) are measured directly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .enumeration import EnumerationResult
from .exponents import tau0
from .geometry import LatticePoint, PolynomialMap, SpectralParams, default_spectral_params
from .modular import ResourceError, attained_values, local_density
from .numeric import DomainError, factorize, omega, omega_array, primes_up_to


@dataclass
class AlmostPrimeCount:
    variety: object
    f: PolynomialMap
    T: float
    histogram: Dict[int, int]
    excluded_zero: int

    @property
    def total(self) -> int:
        return sum(self.histogram.values()) + self.excluded_zero

    def at_most(self, r: int) -> int:
        return sum(c for k, c in self.histogram.items() if k <= r)

    def least_r(self) -> Optional[int]:
        """Smallest Omega attained: an empirical proxy for the saturation number, not the number itself."""
        return min(self.histogram) if self.histogram else None


@dataclass
class SieveRow:
    d: int
    actual: int
    main: Fraction
    rho: Fraction

    @property
    def R(self) -> Fraction:
        return self.actual - self.main


@dataclass
class SieveAxiomReport:
    f: PolynomialMap
    T: float
    X: int
    rows: List[SieveRow]
    c1_bound: Fraction
    tau_used: float
    primes: List[int]
    partial: bool = False
    skipped: List[int] = field(default_factory=list)

    @property
    def sum_abs_R(self) -> float:
        return float(sum(abs(r.R) for r in self.rows))

    def row(self, d: int) -> SieveRow:
        return next(r for r in self.rows if r.d == d)

    def relative_gap(self, p: int) -> float:
        """|actual/X - rho(p)/p| / (rho(p)/p) for a tested prime."""
        r = self.row(p)
        target = r.rho / p
        return float(abs(Fraction(r.actual, self.X) - target) / target)


@dataclass
class LinnikResult:
    b: int
    q: int
    found: Optional[LatticePoint]
    height: float
    omega_value: Optional[int]
    sigma_emp: float
    r_emp: Optional[int]
    T_scanned: float = 0.0


def _values(points: np.ndarray, f: PolynomialMap) -> np.ndarray:
    return f.values(points)


def _histogram(vals: np.ndarray, hist: Dict[int, int]) -> int:
    om = omega_array(vals)
    k, c = np.unique(om, return_counts=True)
    zeros = 0
    for r, n in zip(k.tolist(), c.tolist()):
        if r < 0:
            zeros = n
        else:
            hist[r] = hist.get(r, 0) + n
    return zeros


def almost_prime_count(points, f: PolynomialMap, variety=None, T=None) -> AlmostPrimeCount:
    """Omega histogram of f over an enumeration (or an iterable of point blocks).

    Raises ValueError when f is not integral at some point.
    """
    if isinstance(points, EnumerationResult):
        if not points.complete:
            raise DomainError("almost-prime counts need a complete enumeration")
        variety, T, blocks = points.variety, points.T, [points.points]
    else:
        blocks = points
    hist: Dict[int, int] = {}
    zeros = 0
    for blk in blocks:
        zeros += _histogram(_values(blk, f), hist)
    return AlmostPrimeCount(variety, f, T, dict(sorted(hist.items())), zeros)


# --------------------------------------------------------------------------
# sieve axioms


def squarefree_products(primes: List[int], limit) -> List[int]:
    """All squarefree products of the given primes not exceeding ``limit`` (1 included)."""
    out = [1]
    for p in sorted(primes):
        out += [d * p for d in out if d * p <= limit]
    return sorted(out)


def default_tau(params: SpectralParams, symmetric: bool = False) -> float:
    """Just below the admissible level exponent tau0."""
    return float(tau0(params, symmetric)) * 0.99


def sieve_level(X: int, tau: float, t: int) -> float:
    """z = X^(tau/s) with s = 9 t(f) + 1."""
    return X ** (tau / (9 * t + 1))


def sieve_axiom_check(spec, f: PolynomialMap, T, prime_cap: int, result: EnumerationResult,
                      tau: Optional[float] = None) -> SieveAxiomReport:
    """Compare #{x: f(x) = 0 mod d} with (rho(d)/d) X for squarefree d <= X^tau.

    ``result`` must be a complete enumeration of G(Z) at height >= T.
    Primes whose local density exceeds the residue budget are skipped and
    the report is flagged partial.
    """
    res = result.restrict(T)
    if not res.complete:
        raise DomainError("sieve axioms need a complete enumeration")
    X = len(res)
    tau = default_tau(default_spectral_params(spec)) if tau is None else tau
    vals = _values(res.points, f)
    primes, skipped, rho_p = [], [], {}
    for p in primes_up_to(prime_cap):
        try:
            rho_p[p] = local_density(f, spec, p).rho
            primes.append(p)
        except ResourceError:
            skipped.append(p)
    rows = []
    limit = X ** tau if X > 1 else 1
    for d in squarefree_products(primes, limit):
        rho = math.prod((rho_p[p] for p in factorize(d).as_dict()), start=Fraction(1))
        if d > 1 and math.gcd(d, f.normalizer) > 1:
            rho = local_density(f, spec, d).rho
        actual = int((vals % d == 0).sum())
        rows.append(SieveRow(d, actual, rho / d * X, rho))
    c1 = max((rho_p[p] / p for p in primes), default=Fraction(0))
    return SieveAxiomReport(f, T, X, rows, c1, tau, primes, bool(skipped), skipped)


def rho_trace_sl2(p: int) -> Fraction:
    """Closed form of rho(p) for f = trace on SL_2 (p prime).

    Over F_p the matrices of determinant 1 and trace t number
    p^2 + p * chi(t^2 - 4), chi the Legendre symbol; at t = 0 this gives
    p / (p - chi(-1)).  At p = 2 the count is 4 of 6.
    """
    if p == 2:
        return Fraction(4, 3)
    chi = 1 if p % 4 == 1 else -1
    return Fraction(p, p - chi)


def w_product(f: PolynomialMap, spec, z, q: int = 1,
              rho: Optional[Callable[[int], Fraction]] = None) -> Fraction:
    """W(z) = prod over primes p <= z, p not dividing q, of (1 - rho(p)/p), exactly."""
    rho = rho or (lambda p: local_density(f, spec, p, q).rho)
    out = Fraction(1)
    for p in primes_up_to(z):
        if q % p == 0:
            continue
        out *= 1 - Fraction(rho(p)) / p
    return out


# --------------------------------------------------------------------------
# Linnik-type searches


def _scan(res: EnumerationResult, f, b, q, r_max):
    vals = _values(res.points, f)
    cand = np.flatnonzero(((vals - b) % q == 0) & (vals != 0))
    for start in range(0, cand.size, 4096):
        idx = cand[start:start + 4096]
        om = omega_array(vals[idx])
        ok = np.flatnonzero(om <= r_max)
        if ok.size:
            i = int(idx[ok[0]])
            return i, int(vals[i]), int(om[ok[0]])
    return None


def _check_b(f, b, q, spec):
    if q < 1:
        raise DomainError("q must be positive")
    if math.gcd(b, q) != 1:
        raise DomainError(f"b={b} is not coprime to q={q}")
    if spec is not None and q > 1:
        try:
            attained = attained_values(f, spec, q)
        except ResourceError:
            return  # fall back to discovery
        if b % q not in attained:
            raise DomainError(f"b={b} is not attained by f mod {q}")


def linnik_search(source, f: PolynomialMap, b: int, q: int, sigma_max: float, r_max: int,
                  spec=None, T0: float = 8.0) -> LinnikResult:
    """First point in increasing height with f = b mod q and Omega(f) <= r_max, height <= q^sigma_max.

    ``source`` is a complete EnumerationResult or a callable T -> EnumerationResult,
    in which case the bound doubles from T0 until q^sigma_max.
    """
    _check_b(f, b, q, spec)
    T_max = float(q) ** sigma_max if q > 1 else math.inf
    if isinstance(source, EnumerationResult):
        T_max = min(T_max, float(source.T))
        grid = [T_max]
        get = lambda T: source.restrict(T)
    else:
        if not math.isfinite(T_max):
            raise DomainError("q = 1 needs an explicit enumeration")
        grid, T = [], T0
        while T < T_max:
            grid.append(T)
            T *= 2
        grid.append(T_max)
        get = source
    scanned = 0.0
    for T in grid:
        try:
            res = get(T)
        except ResourceError:
            break
        scanned = T
        hit = _scan(res, f, b, q, r_max)
        if hit is not None:
            i, val, om = hit
            pt = LatticePoint(res.matrices()[i])
            h = pt.cached_height
            assert (val - b) % q == 0 and omega(val) == om
            sigma = math.log(h) / math.log(q) if q > 1 else float("nan")
            return LinnikResult(b, q, pt, h, om, sigma, om, scanned)
    return LinnikResult(b, q, None, float("nan"), None, float("nan"), None, scanned)


def attained_coprime_residues(f: PolynomialMap, spec, q: int) -> List[int]:
    return [b for b in attained_values(f, spec, q) if math.gcd(b, q) == 1]


def linnik_density(source: EnumerationResult, f: PolynomialMap, b: int, q: int, sigma: float, r: int,
                   spec=None) -> Tuple[int, float]:
    """(count, reference) with count = #{x: H(x) <= q^sigma, f = b mod q, Omega(f) <= r}.

    reference = |O(q^sigma)| / (|f(O) mod q| (log q)^t(f)); at q = 1 the
    log factor is dropped and the count is the plain almost-prime count.
    """
    if q > 1:
        _check_b(f, b, q, spec)
    T = float(q) ** sigma if q > 1 else source.T
    res = source.restrict(T)
    vals = _values(res.points, f)
    keep = ((vals - b) % q == 0) & (vals != 0)
    om = omega_array(vals[keep])
    count = int((om <= r).sum())
    if q == 1:
        return count, float(len(res))
    size = len(attained_values(f, spec, q)) if spec is not None else len(np.unique(vals % q))
    return count, len(res) / (size * math.log(q) ** f.t)
