"""Residue rings Z/q: reduction maps, finite groups G(Z/q), CRT, local densities."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import (
    PolynomialMap,
    QuadricGroup,
    SpecialLinear,
    _entries,
    _freeze,
)
from .numeric import DomainError, Factorization, factorize

RESIDUE_BUDGET = 10**9
CHUNK = 1 << 20


class ResourceError(RuntimeError):
    """A computation would exceed its configured candidate budget."""


@dataclass(frozen=True)
class ResidueRing:
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise DomainError("modulus must be positive")

    @property
    def factorization(self) -> Factorization:
        return factorize(self.q)


@dataclass(frozen=True)
class ResiduePoint:
    q: int
    entries: Tuple

    def __post_init__(self):
        a = np.array(self.entries, dtype=object) % self.q
        object.__setattr__(self, "entries", _freeze(a))

    @property
    def ring(self) -> ResidueRing:
        return ResidueRing(self.q)

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def __matmul__(self, other: "ResiduePoint") -> "ResiduePoint":
        if other.q != self.q:
            raise DomainError("moduli differ")
        return ResiduePoint(self.q, self.array().dot(other.array()))


def reduce_point(x, q: int) -> ResiduePoint:
    """Entrywise reduction of an integral point into [0, q)."""
    if q < 1:
        raise DomainError("modulus must be positive")
    return ResiduePoint(q, _entries(x))


def crt_combine(residues: Sequence[Tuple[int, ResiduePoint]]) -> ResiduePoint:
    """Glue residue points modulo pairwise coprime moduli."""
    if not residues:
        raise DomainError("nothing to combine")
    mods = [int(m) for m, _ in residues]
    for i, j in itertools.combinations(range(len(mods)), 2):
        if math.gcd(mods[i], mods[j]) != 1:
            raise DomainError(f"moduli {mods[i]} and {mods[j]} are not coprime")
    Q = math.prod(mods)
    acc = np.zeros_like(residues[0][1].array())
    for m, pt in residues:
        if pt.q != m:
            raise DomainError("residue point modulus does not match its tag")
        M = Q // m
        acc = acc + pt.array() * M * pow(M, -1, m)
    return ResiduePoint(Q, acc)


# --------------------------------------------------------------------------
# group orders


def sl_order_prime_power(n: int, p: int, k: int) -> int:
    base = p ** (n * (n - 1) // 2)
    for i in range(2, n + 1):
        base *= p**i - 1
    return base * p ** ((k - 1) * (n * n - 1))


def group_order(spec, q: int, budget: Optional[int] = None) -> int:
    """|G(Z/q)|: closed formula for SL_n, exhaustive count otherwise."""
    if q < 1:
        raise DomainError("modulus must be positive")
    if isinstance(spec, SpecialLinear):
        out = 1
        for p, k in factorize(q).factors:
            out *= sl_order_prime_power(spec.n, p, k)
        return out
    return int(sum(len(c) for c in iter_group_mod(spec, q, budget)))


def _budget(budget: Optional[int]) -> int:
    return RESIDUE_BUDGET if budget is None else budget


def _check_budget(q: int, entries: int, budget: Optional[int]) -> None:
    budget = _budget(budget)
    if q**entries > budget:
        raise ResourceError(f"q={q} with {entries} entries gives {q**entries} candidates > budget {budget}")


def _tuples(q: int, k: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.size, k), dtype=np.int64)
    for j in range(k - 1, -1, -1):
        out[:, j] = idx % q
        idx //= q
    return out


def _det_mod(mats: np.ndarray, q: int) -> np.ndarray:
    n = mats.shape[1]
    if n == 1:
        return mats[:, 0, 0] % q
    if n == 2:
        return (mats[:, 0, 0] * mats[:, 1, 1] - mats[:, 0, 1] * mats[:, 1, 0]) % q
    total = np.zeros(mats.shape[0], dtype=np.int64)
    for j in range(n):
        minor = np.delete(mats[:, 1:, :], j, axis=2)
        total = (total + (-1) ** j * mats[:, 0, j] * _det_mod(minor, q)) % q
    return total % q


def iter_group_mod(spec, q: int, budget: Optional[int] = None) -> Iterator[np.ndarray]:
    """Brute-force chunks of G(Z/q) as arrays of shape (k, m, m)."""
    m = spec.ambient
    _check_budget(q, m * m, budget)
    if isinstance(spec, QuadricGroup):
        B = spec.form.array()
    total = q ** (m * m)
    for start in range(0, total, CHUNK):
        mats = _tuples(q, m * m, start, min(total, start + CHUNK)).reshape(-1, m, m)
        keep = _det_mod(mats, q) == 1 % q
        if isinstance(spec, QuadricGroup):
            gram = np.einsum("kji,jl,klm->kim", mats, B, mats) % q
            keep &= (gram == B % q).all(axis=(1, 2))
        yield mats[keep]


def enumerate_group_mod(spec, q: int, budget: Optional[int] = None) -> np.ndarray:
    """All elements of G(Z/q), each once, as an array of shape (|G|, m, m)."""
    chunks = list(iter_group_mod(spec, q, budget))
    m = spec.ambient
    return np.concatenate(chunks) if chunks else np.zeros((0, m, m), dtype=np.int64)


def iter_sl2_mod(q: int) -> Iterator[np.ndarray]:
    """SL_2(Z/q) in chunks from solving a*d = 1 + b*c for d, about q^3 work.

    Used where q^4 brute force is too slow; cross-checked against
    ``enumerate_group_mod`` in the tests.
    """
    rng = np.arange(q, dtype=np.int64)
    bb, cc = np.meshgrid(rng, rng, indexing="ij")
    bb, cc = bb.ravel(), cc.ravel()
    rhs = (1 + bb * cc) % q
    for a in range(q):
        g = math.gcd(a, q)
        ok = rhs % g == 0
        b, c, r = bb[ok], cc[ok], rhs[ok] // g
        qg = q // g
        inv = pow(a // g, -1, qg) if qg > 1 else 0
        d0 = (r * inv) % qg
        ds = (d0[:, None] + qg * np.arange(g, dtype=np.int64)[None, :]).ravel()
        k = ds.size
        chunk = np.empty((k, 4), dtype=np.int64)
        chunk[:, 0] = a
        chunk[:, 1] = np.repeat(b, g)
        chunk[:, 2] = np.repeat(c, g)
        chunk[:, 3] = ds
        yield chunk.reshape(-1, 2, 2) % q if q > 1 else chunk.reshape(-1, 2, 2) * 0


def iter_group_elements(spec, q: int, budget: Optional[int] = None) -> Iterator[np.ndarray]:
    """Chunks of G(Z/q), choosing the fastest exact route."""
    if isinstance(spec, SpecialLinear) and spec.n == 2 and q**4 > 2 * 10**6:
        if q**3 > _budget(budget):
            raise ResourceError(f"SL_2 mod {q} exceeds budget")
        yield from iter_sl2_mod(q)
    else:
        yield from iter_group_mod(spec, q, budget)


# --------------------------------------------------------------------------
# local densities


@dataclass(frozen=True)
class LocalDensity:
    f: PolynomialMap
    d: int
    rho: Fraction


def split_normalizer(N: int, q: int = 1) -> Tuple[int, int]:
    """N = N1 * N2 with N1 the part of N built from primes coprime to q."""
    N1 = 1
    for p, e in factorize(N).factors:
        if q % p:
            N1 *= p**e
    return N1, N // N1


def zero_count(f: PolynomialMap, spec, modulus: int, budget: Optional[int] = None) -> Tuple[int, int]:
    """(#{g in G(Z/modulus): g_f(g) = 0 mod modulus}, |G(Z/modulus)|)."""
    zeros = order = 0
    for elems in iter_group_elements(spec, modulus, budget):
        vals = f.integral_values(elems.reshape(elems.shape[0], -1)) % modulus
        zeros += int((vals == 0).sum())
        order += int(elems.shape[0])
    return zeros, order


def local_density(f: PolynomialMap, spec, d: int, q: int = 1, method: str = "crt",
                  budget: Optional[int] = None) -> LocalDensity:
    """rho(d) = d |G(Z/dN1) cap {g = 0}| / |G(Z/dN1)| as an exact rational.

    ``method="crt"`` multiplies prime-by-prime densities; ``"direct"``
    brute-forces the composite modulus (used to check multiplicativity).
    """
    d = int(d)
    if d < 1:
        raise DomainError("d must be positive")
    fac = factorize(d)
    if any(e > 1 for _, e in fac.factors):
        raise DomainError(f"d={d} is not squarefree")
    N1, _ = split_normalizer(f.normalizer, q)
    if math.gcd(d, N1) > 1:
        method = "direct"
    if method == "direct" or d == 1:
        zeros, order = zero_count(f, spec, d * N1, budget)
        return LocalDensity(f, d, Fraction(d * zeros, order))
    if method != "crt":
        raise DomainError(f"unknown method {method!r}")
    rho = Fraction(1)
    for p, _ in fac.factors:
        rho *= _prime_density(f, spec, p, N1, budget)
    if N1 > 1:
        # the N1 factor is shared by every prime; correct for its repeated count
        base = local_density(f, spec, 1, q, "direct", budget).rho
        rho = rho / base ** (len(fac.factors) - 1) if base else Fraction(0)
    return LocalDensity(f, d, rho)


_DENSITY_CACHE = {}


def _prime_density(f, spec, p, N1, budget) -> Fraction:
    key = (f, spec, p, N1)
    if key not in _DENSITY_CACHE:
        zeros, order = zero_count(f, spec, p * N1, budget)
        _DENSITY_CACHE[key] = Fraction(p * zeros, order)
    return _DENSITY_CACHE[key]


def attained_values(f: PolynomialMap, spec, q: int, budget: Optional[int] = None) -> List[int]:
    """Residues mod q taken by f = g / N on G(Z/q N2), N2 the part of N sharing primes with q."""
    if q == 1:
        return [0]
    N1, N2 = split_normalizer(f.normalizer, q)
    inv = pow(N1, -1, q)
    seen = set()
    for elems in iter_group_elements(spec, q * N2, budget):
        g = f.integral_values(elems.reshape(elems.shape[0], -1)) % (q * N2)
        g = g[g % N2 == 0]
        vals = (g // N2) * inv % q
        seen.update(int(v) for v in np.unique(vals))
    return sorted(seen)
