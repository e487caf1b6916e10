"""Exact integer utilities: factorization, Omega, prime lists, prime log sums."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

TRIAL_LIMIT = 10**6
RHO_SEED = 20240611

# Miller-Rabin with these bases is proven correct below this bound.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_PROVEN_BOUND = 3317044064679887385961981


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: Tuple[Tuple[int, int], ...]

    def as_dict(self) -> Dict[int, int]:
        return dict(self.factors)

    def product(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def omega(self, distinct: bool = False) -> int:
        if distinct:
            return len(self.factors)
        return sum(e for _, e in self.factors)


def primes_up_to(z) -> List[int]:
    """All primes <= z in ascending order (sieve of Eratosthenes)."""
    z = int(math.floor(z))
    if z < 2:
        return []
    sieve = np.ones(z + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(z) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).tolist()


@lru_cache(maxsize=1)
def _small_primes() -> Tuple[int, ...]:
    return tuple(primes_up_to(TRIAL_LIMIT))


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _lucas_probable_prime(n: int) -> bool:
    # strong Lucas test with Selfridge parameters
    if math.isqrt(n) ** 2 == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    U, V, Qk = 0, 2, 1
    inv2 = pow(2, -1, n)
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def is_prime(n: int) -> bool:
    """Primality test, deterministic below 3.3e24; BPSW above."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _MR_PROVEN_BOUND:
        return all(_strong_probable_prime(n, a) for a in _MR_BASES)
    return _strong_probable_prime(n, 2) and _lucas_probable_prime(n)


def _pollard_brent(n: int, rng: random.Random) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, out: Dict[int, int], rng: random.Random) -> None:
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        d = _pollard_brent(m, rng)
        stack += [d, m // d]


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Complete prime factorization of a positive integer.

    Trial division by primes up to 10**6 (stopping once p*p exceeds the
    cofactor), then Pollard-Brent with a fixed seed for what remains.
    """
    n = int(n)
    if n < 1:
        raise DomainError(f"factorize needs n >= 1, got {n}")
    out: Dict[int, int] = {}
    m = n
    stale = True  # cofactor changed since the last primality check
    for p in _small_primes():
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
            stale = True
        elif p > 1000 and stale:
            if is_prime(m):
                break
            stale = False
    if m > 1:
        _split_large(m, out, random.Random(RHO_SEED))
    return Factorization(n, tuple(sorted(out.items())))


def omega(n: int, distinct: bool = False) -> int:
    """Number of prime factors of |n| counted with multiplicity.

    ``distinct=True`` counts distinct primes instead (comparison only).
    """
    n = int(n)
    if n == 0:
        raise DomainError("Omega(0) is undefined")
    return factorize(abs(n)).omega(distinct)


def omega_table(limit: int) -> np.ndarray:
    """Array ``t`` with ``t[k] = Omega(k)`` for ``0 <= k <= limit`` (``t[0] = -1``)."""
    limit = int(limit)
    t = np.zeros(limit + 1, dtype=np.int16)
    for p in primes_up_to(limit):
        pk = p
        while pk <= limit:
            t[pk::pk] += 1
            pk *= p
    if limit >= 0:
        t[0] = -1
    return t


def omega_array(values: np.ndarray, distinct: bool = False) -> np.ndarray:
    """Omega over an integer array; zeros map to -1."""
    values = np.asarray(values)
    if values.size == 0:
        return np.zeros(values.shape, dtype=np.int16)
    mags = np.abs(values)
    top = int(mags.max())
    if not distinct and top <= 5 * 10**7 and values.dtype != object:
        return omega_table(top)[mags]
    flat = [(-1 if int(v) == 0 else omega(int(v), distinct)) for v in mags.ravel()]
    return np.array(flat, dtype=np.int16).reshape(values.shape)


def prime_log_sum(q: int) -> float:
    """Sum of log(p)/p over the distinct primes p dividing q."""
    return sum(math.log(p) / p for p, _ in factorize(int(q)).factors)


def primorial(z) -> int:
    out = 1
    for p in primes_up_to(z):
        out *= p
    return out


def n_e(p) -> int:
    """Least even integer >= p/2 for p > 2, and 1 for p = 2."""
    p = Fraction(p)
    if p < 2:
        raise DomainError(f"n_e needs p >= 2, got {p}")
    if p == 2:
        return 1
    k = math.ceil(p / 2)
    return k if k % 2 == 0 else k + 1


def squarefree(n: int) -> bool:
    return all(e == 1 for _, e in factorize(n).factors)
