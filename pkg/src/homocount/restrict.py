"""Point counts on proper subvarieties and the non-concentration comparison.

Integral points on a proper subvariety Y of a group variety G grow with a
strictly smaller exponent than the points of G.  Counts here are exact:
ambient points are enumerated (or streamed, for SL_2) and the defining
polynomials of Y are evaluated in integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .enumeration import (
    EnumerationResult,
    enumerate_exhaustive,
    fit_growth,
    iter_sl2_chunks,
    sq_bound,
)
from .exponents import subvariety_exponent
from .geometry import (
    GroupVariety,
    Polynomial,
    SpecialLinear,
    SpectralParams,
    default_spectral_params,
    int_det,
)
from .numeric import DomainError


@dataclass(frozen=True)
class SubvarietySpec:
    ambient: object
    extra_polynomials: Tuple[Polynomial, ...]
    declared_dim: int
    declared_deg: int = 1
    name: str = ""

    def __post_init__(self):
        polys = tuple(
            Polynomial.parse(p, self.ambient.ambient ** 2) if isinstance(p, str) else p
            for p in self.extra_polynomials
        )
        object.__setattr__(self, "extra_polynomials", polys)
        if not polys:
            raise DomainError("a proper subvariety needs at least one extra polynomial")
        if not 0 <= self.declared_dim < self.ambient.dim_alg:
            raise DomainError("declared_dim must lie in [0, dim G)")
        if self.declared_deg < 1:
            raise DomainError("declared_deg must be positive")
        width = self.ambient.ambient ** 2
        if any(p.nvars != width for p in polys):
            raise DomainError("polynomials must use one variable per matrix entry")

    def mask(self, points: np.ndarray) -> np.ndarray:
        keep = np.ones(len(points), dtype=bool)
        for p in self.extra_polynomials:
            keep &= p.evaluate(points) == 0
        return keep

    def intersect(self, other: "SubvarietySpec", declared_dim: Optional[int] = None) -> "SubvarietySpec":
        dim = min(self.declared_dim, other.declared_dim) if declared_dim is None else declared_dim
        return SubvarietySpec(self.ambient, self.extra_polynomials + other.extra_polynomials, dim,
                              max(self.declared_deg, other.declared_deg))


@dataclass
class NonConcentrationReport:
    Y: SubvarietySpec
    grid: List[Tuple[float, int, int]]
    exponent_Y: float
    exponent_G: float
    theorem_exponent_bound: float
    theorem_sigma: Fraction
    notes: List[str] = field(default_factory=list)

    def rows(self) -> List[dict]:
        return [{"T": T, "N_Y": ny, "N_G": ng} for T, ny, ng in self.grid]


def _ambient_chunks(spec, T) -> Iterator[np.ndarray]:
    if spec == SpecialLinear(2):
        yield from iter_sl2_chunks(T)
    else:
        yield enumerate_exhaustive(GroupVariety(spec), T).points


def _source_chunks(spec, T, result: Optional[EnumerationResult]) -> Iterator[np.ndarray]:
    if result is None:
        return _ambient_chunks(spec, T)
    if Fraction(T) > Fraction(result.T):
        raise DomainError("supplied enumeration does not reach T")
    return iter([result.restrict(T).points])


def count_subvariety(Y: SubvarietySpec, T, result: Optional[EnumerationResult] = None) -> int:
    """Exact number of ambient points of height <= T lying on Y."""
    return sum(int(Y.mask(ch).sum()) for ch in _source_chunks(Y.ambient, T, result))


def grid_counts(Ys: Sequence[SubvarietySpec], T_grid: Sequence, result: Optional[EnumerationResult] = None
                ) -> Tuple[List[int], List[List[int]]]:
    """(N_T(G), [N_T(Y) for each Y]) at every T of the grid in one streaming pass."""
    grid = [float(T) if not isinstance(T, int) else T for T in T_grid]
    if not Ys:
        raise DomainError("need at least one subvariety")
    spec = Ys[0].ambient
    bounds = np.array([sq_bound(T) for T in grid], dtype=np.int64)
    order = np.argsort(bounds, kind="stable")
    nG = np.zeros(len(grid), dtype=np.int64)
    nY = np.zeros((len(Ys), len(grid)), dtype=np.int64)
    for ch in _source_chunks(spec, max(grid), result):
        sq = (ch.astype(np.int64) ** 2).sum(axis=1)
        # histogram of squared heights over the sorted bound buckets, then cumulate
        bucket = np.searchsorted(bounds[order], sq, side="left")
        hist = np.bincount(bucket, minlength=len(grid) + 1)[: len(grid)]
        nG[order] += np.cumsum(hist)
        for i, Y in enumerate(Ys):
            m = Y.mask(ch)
            hist = np.bincount(bucket[m], minlength=len(grid) + 1)[: len(grid)]
            nY[i, order] += np.cumsum(hist)
    return nG.tolist(), nY.tolist()


def union_count(Ys: Sequence[SubvarietySpec], T, result: Optional[EnumerationResult] = None) -> Tuple[int, int]:
    """(|union of the Y_i|, sum of |Y_i|) over points of height <= T."""
    union = total = 0
    for ch in _source_chunks(Ys[0].ambient, T, result):
        masks = [Y.mask(ch) for Y in Ys]
        union += int(np.logical_or.reduce(masks).sum())
        total += sum(int(m.sum()) for m in masks)
    return union, total


def nonconcentration_report(Y: SubvarietySpec, T_grid: Sequence, params: Optional[SpectralParams] = None,
                            result: Optional[EnumerationResult] = None) -> NonConcentrationReport:
    """Fitted growth exponents of Y and G next to the theorem's exponent bound.

    The bound is alpha * (1 - a(dim G - dim Y) / (dim G (a + d) 2 n_e(p)))
    with alpha the group growth exponent from ``params``.  Nothing is
    asserted here.
    """
    T_grid = list(T_grid)
    if len(T_grid) < 4:
        raise DomainError("need at least 4 grid points")
    params = params or default_spectral_params(Y.ambient)
    nG, nY = grid_counts([Y], T_grid, result)
    nY = nY[0]
    fitG = fit_growth(list(zip(T_grid, nG)))
    fitY = fit_growth(list(zip(T_grid, nY)))
    mult = subvariety_exponent(params, Y.declared_dim)
    bound = params.alpha_group * mult
    notes = [f"declared dim Y = {Y.declared_dim} (user-declared, not computed)"]
    return NonConcentrationReport(Y, list(zip(T_grid, nY, nG)), fitY.alpha_hat, fitG.alpha_hat,
                                  float(bound), 1 - mult, notes)


# --------------------------------------------------------------------------
# generic matrices


def lower_left_zero(n: int = 2) -> SubvarietySpec:
    """Y = {x_{n,1} = 0} in SL_n."""
    return SubvarietySpec(SpecialLinear(n), (Polynomial.variable(n * (n - 1), n * n),), n * n - 2, 1,
                          "lower-left=0")


def _charpoly(mats: np.ndarray) -> List[np.ndarray]:
    """Coefficients c_1..c_n of det(lambda - x) = lambda^n + c_1 lambda^{n-1} + ... (Faddeev-LeVerrier)."""
    k, n, _ = mats.shape
    eye = np.broadcast_to(np.eye(n, dtype=mats.dtype), mats.shape).copy()
    M = eye.copy()
    coeffs = []
    for j in range(1, n + 1):
        AM = np.einsum("kij,kjl->kil", mats, M)
        c = -np.trace(AM, axis1=1, axis2=2) // j  # exact: the trace is divisible by j
        coeffs.append(c)
        M = AM + c[:, None, None] * eye
    return coeffs


def _discriminant(coeffs: List[np.ndarray]) -> np.ndarray:
    """Discriminant of the monic polynomial with the given lower coefficients."""
    n = len(coeffs)
    if n == 1:
        return np.ones_like(coeffs[0])
    if n == 2:
        b, c = coeffs
        return b * b - 4 * c
    if n == 3:
        b, c, d = coeffs
        return b * b * c * c - 4 * c ** 3 - 4 * b ** 3 * d - 27 * d * d + 18 * b * c * d
    import sympy

    lam = sympy.Symbol("lam")
    out = []
    for row in zip(*coeffs):
        poly = sympy.Poly([1] + [int(v) for v in row], lam)
        out.append(int(sympy.discriminant(poly)))
    return np.array(out, dtype=object)


def distinct_eigenvalues(mats: np.ndarray) -> np.ndarray:
    return _discriminant(_charpoly(mats)) != 0


def generic_mask(points: np.ndarray, n: int) -> np.ndarray:
    """Nonzero entries, nonzero leading principal minors, distinct eigenvalues and singular values."""
    pts = np.asarray(points)
    if len(pts) == 0:
        return np.zeros(0, dtype=bool)
    big = n > 2 or (pts.dtype != object and int(np.abs(pts).max()) > 3000)
    mats = pts.astype(object if big else np.int64).reshape(-1, n, n)
    keep = (pts != 0).all(axis=1)
    for k in range(1, n + 1):
        sub = mats[:, :k, :k]
        if k == 1:
            minor = sub[:, 0, 0]
        elif k == 2:
            minor = sub[:, 0, 0] * sub[:, 1, 1] - sub[:, 0, 1] * sub[:, 1, 0]
        else:
            minor = np.array([int_det(m.tolist()) for m in sub], dtype=object)
        keep &= minor != 0
    keep &= distinct_eigenvalues(mats)
    gram = np.einsum("kji,kjl->kil", mats, mats)
    keep &= distinct_eigenvalues(gram)
    return np.asarray(keep, dtype=bool)


def generic_count(n: int, T, result: Optional[EnumerationResult] = None) -> Tuple[int, int]:
    """(N_T, N'_T): all points of SL_n(Z) of height <= T and the generic ones."""
    spec = SpecialLinear(n)
    total = generic = 0
    for ch in _source_chunks(spec, T, result):
        total += len(ch)
        generic += int(generic_mask(ch, n).sum())
    return total, generic
