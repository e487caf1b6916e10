"""Height-bounded enumeration of integral points.

Three routes are provided: exhaustive search over the entry box with
constraint propagation (the ground-truth oracle), a parametrized fast path
for SL_2(Z) and for Pell conics, and breadth-first search of an orbit
under generators.  All point sets are returned sorted by
``(height, zigzag-lexicographic entries)`` where the zigzag order on an
entry is 0, 1, -1, 2, -2, ...  so results are reproducible and shard merges
are deterministic.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator, List, Optional, Sequence

import numpy as np

from .geometry import (
    GroupVariety,
    LatticePoint,
    OrbitVariety,
    PellNormForm,
    QuadricGroup,
    QuadricRepresentation,
    SpecialLinear,
    orbit_invariant,
)
from .modular import ResourceError
from .numeric import DomainError

EXHAUSTIVE_BUDGET = 10**9
FRONTIER_BUDGET = 5 * 10**6
SL2_MAX_T = 9000
_BLOCK = 1 << 19


def sq_bound(T) -> int:
    """Largest integer B with B <= T^2, computed exactly."""
    T = Fraction(T)
    if T < 0:
        return -1
    t2 = T * T
    return t2.numerator // t2.denominator


def sup_bound(T) -> int:
    T = Fraction(T)
    return math.floor(T) if T >= 0 else -1


def _norm_key(points: np.ndarray, norm_mode: str) -> np.ndarray:
    if norm_mode == "sup":
        return np.abs(points).max(axis=1) if points.shape[1] else np.zeros(len(points), dtype=points.dtype)
    return (points * points).sum(axis=1)


def zigzag(points: np.ndarray) -> np.ndarray:
    return 2 * np.abs(points) - (points > 0)


def sort_points(points: np.ndarray, norm_mode: str = "euclidean") -> np.ndarray:
    """Sort rows by (height, zigzag lexicographic entries)."""
    if len(points) == 0:
        return points
    if points.dtype == object:
        def key(row):
            ints = [int(v) for v in row]
            h = max(map(abs, ints)) if norm_mode == "sup" else sum(v * v for v in ints)
            return (h, [2 * abs(v) - (v > 0) for v in ints])
        return np.array(sorted(points.tolist(), key=key), dtype=object).reshape(points.shape)
    z = zigzag(points)
    keys = [z[:, j] for j in range(points.shape[1] - 1, -1, -1)]
    keys.append(_norm_key(points, norm_mode))
    return points[np.lexsort(keys)]


@dataclass
class EnumerationResult:
    """Integral points of height <= T on a variety, flattened and sorted."""

    variety: object
    T: float
    norm_mode: str
    method: str
    points: np.ndarray
    complete: bool

    def __post_init__(self):
        width = int(np.prod(self.variety.shape))
        self.points = np.asarray(self.points).reshape(-1, width)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def count(self) -> int:
        return len(self)

    def norm_values(self) -> np.ndarray:
        """Squared Euclidean heights, or sup norms in sup mode."""
        return _norm_key(self.points, self.norm_mode)

    @property
    def heights(self) -> np.ndarray:
        vals = self.norm_values()
        if self.norm_mode == "sup":
            return vals.astype(float)
        return np.sqrt(vals.astype(float))

    def matrices(self) -> np.ndarray:
        return self.points.reshape((-1,) + tuple(self.variety.shape))

    def lattice_points(self) -> List[LatticePoint]:
        return [LatticePoint(m) for m in self.matrices()]

    def point_set(self) -> set:
        return {tuple(int(v) for v in row) for row in self.points}

    def restrict(self, T) -> "EnumerationResult":
        """Points of height <= T (T no larger than this result's bound)."""
        if Fraction(T) > Fraction(self.T):
            raise DomainError("cannot restrict to a larger height bound")
        bound = sup_bound(T) if self.norm_mode == "sup" else sq_bound(T)
        cut = int(np.searchsorted(self.norm_values(), bound, side="right"))
        return EnumerationResult(self.variety, T, self.norm_mode, self.method, self.points[:cut], self.complete)


# --------------------------------------------------------------------------
# exhaustive search


def ball_points(dim: int, bound: int, norm_mode: str = "euclidean") -> np.ndarray:
    """All integer vectors of the given dimension with norm value <= bound.

    For euclidean mode ``bound`` caps the sum of squares, for sup mode it
    caps the largest absolute entry.
    """
    if bound < 0:
        return np.zeros((0, dim), dtype=np.int64)
    if norm_mode == "sup":
        axis = np.arange(-bound, bound + 1, dtype=np.int64)
        if dim == 0:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*([axis] * dim), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1)
    pts = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for _ in range(dim):
        room = np.floor(np.sqrt(bound - used)).astype(np.int64)
        room -= (room * room > bound - used)
        counts = 2 * room + 1
        rows = np.repeat(np.arange(len(pts)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        vals = np.arange(rows.size, dtype=np.int64) - starts - np.repeat(room, counts)
        pts = np.concatenate([pts[rows], vals[:, None]], axis=1)
        used = used[rows] + vals * vals
    return pts


def _ball_size(dim: int, bound: int, norm_mode: str) -> float:
    if bound < 0:
        return 0.0
    if norm_mode == "sup":
        return float(2 * bound + 1) ** dim
    r = math.sqrt(bound) + 0.5 * math.sqrt(dim)
    return math.pi ** (dim / 2) / math.gamma(dim / 2 + 1) * r**dim + 1


def _cofactors(prefix: np.ndarray, n: int) -> np.ndarray:
    """w with det([P; r]) = r . w for each stacked (n-1) x n prefix P."""
    P = prefix.reshape(-1, n - 1, n)
    if n == 1:
        return np.ones((len(P), 1), dtype=np.int64)
    if n == 2:
        return np.stack([-P[:, 0, 1], P[:, 0, 0]], axis=1)
    if n == 3:
        return np.cross(P[:, 0, :], P[:, 1, :])
    w = np.empty((len(P), n), dtype=np.int64)
    for j in range(n):
        minor = np.delete(P, j, axis=2).astype(float)
        w[:, j] = np.rint((-1) ** (n - 1 + j) * np.linalg.det(minor)).astype(np.int64)
    return w


def _exhaustive_cost(V, T, norm_mode: str) -> float:
    bound = sup_bound(T) if norm_mode == "sup" else sq_bound(T)
    if isinstance(V, GroupVariety):
        m = V.group.ambient
        if isinstance(V.group, SpecialLinear):
            return _ball_size(m * (m - 1), bound, norm_mode) * _ball_size(m, bound, norm_mode)
        return _ball_size(m * m, bound, norm_mode)
    if isinstance(V, QuadricRepresentation):
        m, n = V.shape
        return _ball_size(m, bound, norm_mode) * n
    if isinstance(V, PellNormForm):
        return 2.0 * (sup_bound(T) + 1)
    if isinstance(V, OrbitVariety):
        return _ball_size(V.group.ambient, bound, norm_mode)
    raise DomainError(f"unsupported variety {V!r}")


def feasible_T(V, norm_mode: str = "euclidean", budget: Optional[int] = None) -> int:
    """Largest integer T whose exhaustive search fits the budget."""
    budget = EXHAUSTIVE_BUDGET if budget is None else budget
    lo, hi = 0, 1
    while _exhaustive_cost(V, hi, norm_mode) <= budget:
        lo, hi = hi, hi * 2
        if hi > 10**12:
            return lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _exhaustive_cost(V, mid, norm_mode) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def enumerate_exhaustive(V, T, norm_mode: str = "euclidean", budget: Optional[int] = None) -> EnumerationResult:
    """Exact set {x in X(Z): H(x) <= T} by box search with pruning."""
    if norm_mode not in ("euclidean", "sup"):
        raise DomainError(f"unknown norm mode {norm_mode!r}")
    budget = EXHAUSTIVE_BUDGET if budget is None else budget
    cost = _exhaustive_cost(V, T, norm_mode)
    if cost > budget:
        raise ResourceError(
            f"exhaustive search at T={T} needs ~{cost:.3g} candidates > budget {budget}; "
            f"feasible T = {feasible_T(V, norm_mode, budget)}"
        )
    bound = sup_bound(T) if norm_mode == "sup" else sq_bound(T)
    if isinstance(V, GroupVariety):
        if isinstance(V.group, SpecialLinear):
            pts = _exhaustive_sl(V.group.n, bound, norm_mode)
        else:
            pts = _exhaustive_quadric_group(V.group, bound, norm_mode)
    elif isinstance(V, QuadricRepresentation):
        pts = _exhaustive_representation(V, bound, norm_mode)
    elif isinstance(V, PellNormForm):
        pts = _exhaustive_pell(V.D, bound, norm_mode)
    elif isinstance(V, OrbitVariety):
        ball = ball_points(V.group.ambient, bound, norm_mode)
        target = orbit_invariant(V.group, V.base)
        if isinstance(V.group, SpecialLinear):
            inv = np.gcd.reduce(ball, axis=1) if len(ball) else np.zeros(0, dtype=np.int64)
        else:
            B = V.group.form.array()
            inv = np.einsum("ki,ij,kj->k", ball, B, ball)
        pts = ball[inv == target]
    else:
        raise DomainError(f"unsupported variety {V!r}")
    return EnumerationResult(V, T, norm_mode, "exhaustive", sort_points(pts, norm_mode), True)


def _exhaustive_sl(n: int, bound: int, norm_mode: str) -> np.ndarray:
    prefix_bound = bound - 1 if norm_mode == "euclidean" else bound
    prefixes = ball_points(n * (n - 1), prefix_bound, norm_mode)
    if len(prefixes) == 0:
        return np.zeros((0, n * n), dtype=np.int64)
    rows = ball_points(n, bound, norm_mode)
    row_norm = _norm_key(rows, norm_mode)
    order = np.argsort(row_norm, kind="stable")
    rows, row_norm = rows[order], row_norm[order]
    w = _cofactors(prefixes, n)
    pre_norm = _norm_key(prefixes, norm_mode)
    found = []
    for i in range(len(prefixes)):
        room = bound - pre_norm[i] if norm_mode == "euclidean" else bound
        cut = int(np.searchsorted(row_norm, room, side="right"))
        cand = rows[:cut]
        hit = cand[cand.dot(w[i]) == 1]
        if len(hit):
            found.append(np.concatenate([np.repeat(prefixes[i][None, :], len(hit), axis=0), hit], axis=1))
    return np.concatenate(found) if found else np.zeros((0, n * n), dtype=np.int64)


def _exhaustive_quadric_group(group: QuadricGroup, bound: int, norm_mode: str) -> np.ndarray:
    m = group.ambient
    V = QuadricRepresentation(group.form, group.form)
    pts = _exhaustive_representation(V, bound, norm_mode)
    mats = pts.reshape(-1, m, m)
    if len(mats) == 0:
        return pts
    dets = np.rint(np.linalg.det(mats.astype(float))).astype(np.int64)
    return pts[dets == 1]


def _exhaustive_representation(V: QuadricRepresentation, bound: int, norm_mode: str) -> np.ndarray:
    """Columns x_j with x_j^T B x_j = A_jj, joined under the cross terms."""
    m, n = V.shape
    B = V.B.array()
    A = V.A.array()
    ball = ball_points(m, bound, norm_mode)
    qvals = np.einsum("ki,ij,kj->k", ball, B, ball)
    cols = []
    for j in range(n):
        c = ball[qvals == A[j, j]]
        cols.append((c, _norm_key(c, norm_mode)))
    partial = np.zeros((1, m, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for j in range(n):
        cand, cnorm = cols[j]
        new_parts, new_used = [], []
        for k in range(len(partial)):
            if norm_mode == "euclidean":
                ok = cnorm <= bound - used[k]
            else:
                ok = np.ones(len(cand), dtype=bool)
            for i in range(j):
                ok &= cand.dot(B.T.dot(partial[k][:, i])) == A[i, j]
            sel = cand[ok]
            if len(sel):
                block = np.repeat(partial[k][None, :, :], len(sel), axis=0)
                new_parts.append(np.concatenate([block, sel[:, :, None]], axis=2))
                new_used.append(used[k] + cnorm[ok] if norm_mode == "euclidean" else np.zeros(len(sel), dtype=np.int64))
        if not new_parts:
            return np.zeros((0, m * n), dtype=np.int64)
        partial = np.concatenate(new_parts)
        used = np.concatenate(new_used)
    return partial.reshape(len(partial), m * n)


def _exhaustive_pell(D: int, bound: int, norm_mode: str) -> np.ndarray:
    ymax = math.isqrt(bound) if norm_mode == "euclidean" else bound
    y = np.arange(-ymax, ymax + 1, dtype=np.int64)
    x2 = 1 + D * y * y
    x = np.floor(np.sqrt(x2.astype(float))).astype(np.int64)
    for _ in range(2):
        x += (x + 1) * (x + 1) <= x2
        x -= x * x > x2
    keep = x * x == x2
    xs, ys = x[keep], y[keep]
    pts = np.concatenate([np.stack([xs, ys], axis=1), np.stack([-xs, ys], axis=1)])
    pts = pts[_norm_key(pts, norm_mode) <= bound]
    return pts


# --------------------------------------------------------------------------
# SL_2 fast path
#
# For a primitive bottom row (c, d) with n = c^2 + d^2, the top rows of
# determinant one are indexed by k = a c + b d, which runs over the class
# k = c * d^{-1} (mod n); the top row then has norm (1 + k^2) / n.


def _modinv(a: np.ndarray, m: np.ndarray) -> np.ndarray:
    r0, r1 = m.copy(), a % m
    s0, s1 = np.zeros_like(m), np.ones_like(m)
    while True:
        nz = r1 != 0
        if not nz.any():
            break
        q = np.where(nz, r0 // np.where(nz, r1, 1), 0)
        r0, r1 = np.where(nz, r1, r0), np.where(nz, r0 - q * r1, r1)
        s0, s1 = np.where(nz, s1, s0), np.where(nz, s0 - q * s1, s1)
    return s0 % m


def _isqrt(x: np.ndarray) -> np.ndarray:
    s = np.floor(np.sqrt(x.astype(float))).astype(np.int64)
    for _ in range(3):
        s += (s + 1) * (s + 1) <= x
        s -= s * s > x
    return s


def _sl2_c_values(bound: int, shards: int, shard: int) -> np.ndarray:
    cmax = math.isqrt(max(bound - 1, 0)) if bound >= 2 else -1
    cs = np.arange(-cmax, cmax + 1, dtype=np.int64)
    return cs[np.arange(cs.size) % shards == shard]


def _sl2_bottom_rows(cs: np.ndarray, bound: int) -> Iterator[tuple]:
    """Blocks of primitive bottom rows (c, d) with c^2 + d^2 <= bound - 1."""
    if cs.size == 0:
        return
    dmax = _isqrt(bound - 1 - cs * cs)
    widths = 2 * dmax + 1
    start = 0
    while start < cs.size:
        stop = start + 1
        total = widths[start]
        while stop < cs.size and total + widths[stop] <= _BLOCK:
            total += widths[stop]
            stop += 1
        w = widths[start:stop]
        c = np.repeat(cs[start:stop], w)
        offs = np.arange(c.size, dtype=np.int64) - np.repeat(np.cumsum(w) - w, w)
        d = offs - np.repeat(dmax[start:stop], w)
        keep = np.gcd(c, d) == 1
        yield c[keep], d[keep]
        start = stop


def _sl2_block(c: np.ndarray, d: np.ndarray, bound: int):
    n = c * c + d * d
    r = ((c % n) * _modinv(d, n)) % n
    s = _isqrt(n * (bound - n) - 1)
    count = (s - r) // n + (s + r) // n + 1
    jmin = -((s + r) // n)
    return n, r, count, jmin


def count_sl2(T, shards: int = 1, shard: int = 0) -> int:
    """|{g in SL_2(Z): ||g|| <= T}| without materializing the points."""
    bound = sq_bound(T)
    if T > SL2_MAX_T:
        raise ResourceError(f"SL_2 fast path is exact only up to T={SL2_MAX_T}")
    total = 0
    for c, d in _sl2_bottom_rows(_sl2_c_values(bound, shards, shard), bound):
        total += int(_sl2_block(c, d, bound)[2].sum())
    return total


def iter_sl2_chunks(T, shards: int = 1, shard: int = 0) -> Iterator[np.ndarray]:
    """Unsorted blocks of SL_2(Z) points (rows a, b, c, d) of height <= T."""
    bound = sq_bound(T)
    if T > SL2_MAX_T:
        raise ResourceError(f"SL_2 fast path is exact only up to T={SL2_MAX_T}")
    for c, d in _sl2_bottom_rows(_sl2_c_values(bound, shards, shard), bound):
        n, r, count, jmin = _sl2_block(c, d, bound)
        idx = np.repeat(np.arange(c.size), count)
        j = np.arange(idx.size, dtype=np.int64) - np.repeat(np.cumsum(count) - count, count) + jmin[idx]
        k = r[idx] + j * n[idx]
        cc, dd, nn = c[idx], d[idx], n[idx]
        a = (k * cc + dd) // nn
        b = (k * dd - cc) // nn
        yield np.stack([a, b, cc, dd], axis=1)


SL2 = GroupVariety(SpecialLinear(2))


def enumerate_sl2(T, shards: int = 1, shard: int = 0) -> EnumerationResult:
    """SL_2(Z) points of Euclidean height <= T via the bottom-row parametrization.

    With ``shards > 1`` only the share of bottom rows belonging to
    ``shard`` is produced and the result is flagged incomplete.
    """
    if not 0 <= shard < shards:
        raise DomainError("need 0 <= shard < shards")
    chunks = list(iter_sl2_chunks(T, shards, shard))
    pts = np.concatenate(chunks) if chunks else np.zeros((0, 4), dtype=np.int64)
    return EnumerationResult(SL2, T, "euclidean", "parametrized", sort_points(pts), shards == 1)


def merge_results(parts: Sequence[EnumerationResult], complete: Optional[bool] = None) -> EnumerationResult:
    """Merge shard results over the same variety, bound and method."""
    if not parts:
        raise DomainError("nothing to merge")
    first = parts[0]
    for p in parts[1:]:
        if (p.T, p.norm_mode, p.method) != (first.T, first.norm_mode, first.method) or \
                p.variety.to_dict() != first.variety.to_dict():
            raise DomainError("shards disagree on variety, T, norm or method")
    pts = np.concatenate([p.points for p in parts])
    pts = sort_points(pts, first.norm_mode)
    if len(pts) > 1:
        dup = (pts[1:] == pts[:-1]).all(axis=1)
        if dup.any():
            raise DomainError("shards overlap")
    flag = complete if complete is not None else all(p.complete for p in parts)
    return EnumerationResult(first.variety, first.T, first.norm_mode, first.method, pts, flag)


# --------------------------------------------------------------------------
# Pell conics


def pell_fundamental(D: int) -> tuple:
    """Least positive solution of x^2 - D y^2 = 1 from the continued fraction of sqrt(D)."""
    a0 = math.isqrt(D)
    if a0 * a0 == D:
        raise DomainError("D must not be a square")
    m, den, a = 0, 1, a0
    p_prev, p = 1, a0
    q_prev, q = 0, 1
    while p * p - D * q * q != 1:
        m = den * a - m
        den = (D - m * m) // den
        a = (a0 + m) // den
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    return p, q


def pell_points(D: int, count: int) -> List[tuple]:
    """The points (x, y) from the first ``count`` powers of the fundamental unit, with signs."""
    u, v = pell_fundamental(D)
    out = []
    x, y = 1, 0
    for _ in range(count):
        for sx in (1, -1):
            for sy in ((1, -1) if y else (1,)):
                out.append((sx * x, sy * y))
        x, y = u * x + D * v * y, v * x + u * y
    return out


def enumerate_pell(D: int, T, norm_mode: str = "euclidean") -> EnumerationResult:
    """All solutions of x^2 - D y^2 = 1 with height <= T (powers of the fundamental unit)."""
    V = PellNormForm(D)
    bound = sup_bound(T) if norm_mode == "sup" else sq_bound(T)
    u, v = pell_fundamental(D)
    pts = []
    x, y = 1, 0
    while True:
        h = max(abs(x), abs(y)) if norm_mode == "sup" else x * x + y * y
        if h > bound:
            break
        for sx in (1, -1):
            for sy in ((1, -1) if y else (1,)):
                pts.append((sx * x, sy * y))
        x, y = u * x + D * v * y, v * x + u * y
    big = any(abs(c) > 3 * 10**9 for p in pts for c in p)
    arr = np.array(pts, dtype=object if big else np.int64).reshape(-1, 2)
    return EnumerationResult(V, T, norm_mode, "parametrized", sort_points(arr, norm_mode), True)


# --------------------------------------------------------------------------
# orbit BFS


class FrontierExceeded(ResourceError):
    def __init__(self, message: str, partial: EnumerationResult):
        super().__init__(message)
        self.partial = partial


def orbit_bfs(V: OrbitVariety, T, slack: float = 1.0, validate: bool = False,
              norm_mode: str = "euclidean", frontier_budget: int = FRONTIER_BUDGET) -> EnumerationResult:
    """Breadth-first closure of the base point under the generators.

    Intermediate points taller than ``slack * T`` are discarded, so points
    reachable only through taller words can be missed; ``validate=True``
    compares against exhaustive extraction and sets ``complete`` accordingly.
    """
    if not isinstance(V, OrbitVariety):
        raise DomainError("orbit_bfs needs an OrbitVariety")
    cap = sup_bound(Fraction(T) * Fraction(slack)) if norm_mode == "sup" else sq_bound(Fraction(T) * Fraction(slack))
    bound = sup_bound(T) if norm_mode == "sup" else sq_bound(T)
    gens = [np.array(g, dtype=np.int64) for g in V.generators]
    base = tuple(V.base)

    def norm(v):
        return max(map(abs, v)) if norm_mode == "sup" else sum(t * t for t in v)

    seen = set()
    queue = deque()
    if norm(base) <= cap:
        seen.add(base)
        queue.append(base)
    while queue:
        v = np.array(queue.popleft(), dtype=np.int64)
        for g in gens:
            w = tuple(int(t) for t in g.dot(v))
            if w not in seen and norm(w) <= cap:
                seen.add(w)
                queue.append(w)
        if len(seen) > frontier_budget:
            pts = np.array([p for p in seen if norm(p) <= bound], dtype=np.int64).reshape(-1, len(base))
            partial = EnumerationResult(V, T, norm_mode, "orbit-bfs", sort_points(pts, norm_mode), False)
            raise FrontierExceeded(f"orbit BFS visited more than {frontier_budget} points", partial)
    pts = np.array([p for p in seen if norm(p) <= bound], dtype=np.int64).reshape(-1, len(base))
    result = EnumerationResult(V, T, norm_mode, "orbit-bfs", sort_points(pts, norm_mode), False)
    if validate:
        truth = enumerate_exhaustive(V, T, norm_mode)
        result.complete = np.array_equal(truth.points, result.points)
    return result


# --------------------------------------------------------------------------
# growth exponents


@dataclass
class GrowthEstimate:
    grid: List[tuple]
    alpha_hat: float
    fit_residual: float


def count_points(V, T, norm_mode: str = "euclidean") -> int:
    """Exact count at height T using the fastest complete method."""
    if isinstance(V, GroupVariety) and V.group == SpecialLinear(2) and norm_mode == "euclidean":
        return count_sl2(T)
    if isinstance(V, PellNormForm):
        return len(enumerate_pell(V.D, T, norm_mode))
    return len(enumerate_exhaustive(V, T, norm_mode))


def fit_growth(grid: Sequence[tuple]) -> GrowthEstimate:
    """Least-squares slope of log count against log T over the upper half of the grid."""
    grid = [(float(T), int(c)) for T, c in grid]
    if len(grid) < 4:
        raise DomainError("growth fits need at least 4 grid points")
    counts = [c for _, c in grid]
    if any(b < a for a, b in zip(counts, counts[1:])):
        raise DomainError("counts must be nondecreasing in T")
    if counts[0] <= 0:
        usable = next((T for T, c in grid if c > 0), None)
        raise DomainError(f"zero count at T={grid[0][0]}; first usable T is {usable}")
    upper = grid[len(grid) // 2:]
    x = np.log([T for T, _ in upper])
    y = np.log([c for _, c in upper])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    if abs(slope) < 1e-12:
        slope = 0.0
    return GrowthEstimate(grid, float(slope), resid)


def growth_exponent(V, T_grid: Sequence, norm_mode: str = "euclidean",
                    counter: Optional[Callable] = None) -> GrowthEstimate:
    """Empirical volume-growth exponent of integral points on V."""
    T_grid = list(T_grid)
    if len(T_grid) < 4:
        raise DomainError("growth fits need at least 4 grid points")
    counter = counter or (lambda T: count_points(V, T, norm_mode))
    first = counter(T_grid[0])
    if first <= 0:
        usable = next((T for T in T_grid[1:] if counter(T) > 0), None)
        raise DomainError(f"zero count at T={T_grid[0]}; first usable T is {usable}")
    grid = [(T_grid[0], first)] + [(T, counter(T)) for T in T_grid[1:]]
    return fit_growth(grid)


def geometric_grid(lo: float, hi: float, num: int) -> List[float]:
    return [float(t) for t in np.geomspace(lo, hi, num)]
