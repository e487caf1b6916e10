"""Lifting residue classes to integral points of small height.

Strong approximation makes reduction SL_n(Z) -> SL_n(Z/q) surjective; the
functions here measure how tall the shortest lifts are (the empirical
lifting exponent ``log(height) / log(q)``), and how evenly integral points
of bounded height spread over the fibres of the reduction map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .enumeration import (
    EnumerationResult,
    enumerate_exhaustive,
    enumerate_pell,
    enumerate_sl2,
    pell_fundamental,
)
from .geometry import (
    GroupVariety,
    LatticePoint,
    OrbitVariety,
    PellNormForm,
    QuadricRepresentation,
    SpecialLinear,
    int_det,
)
from .modular import ResiduePoint, ResourceError, group_order
from .numeric import DomainError


@dataclass(frozen=True)
class NotFound:
    T_cap: float

    def __bool__(self):
        return False


@dataclass
class SurjectivityResult:
    q: int
    surjective: Optional[bool]  # None: inconclusive (budget hit before a decision)
    T_achieved: Optional[float]
    image_size: int
    order: Optional[int]


@dataclass
class LiftReport:
    variety: object
    q: int
    classes_total: int
    classes_hit: int
    worst_class: Optional[ResiduePoint]
    worst_height: float
    sigma_emp: float
    T_cap: Optional[float]
    surjective: bool
    unlifted: List[ResiduePoint] = field(default_factory=list)

    def as_row(self) -> dict:
        return {
            "q": self.q,
            "classes_total": self.classes_total,
            "classes_hit": self.classes_hit,
            "worst_class": None if self.worst_class is None else list(np.ravel(self.worst_class.array()).tolist()),
            "worst_height": self.worst_height,
            "sigma_emp": self.sigma_emp,
            "T_cap": self.T_cap,
            "surjective": self.surjective,
        }


@dataclass
class FiberBalance:
    q: int
    T: float
    fiber_counts: Dict[tuple, int]
    deviation: float
    total: int


def class_codes(points: np.ndarray, q: int) -> np.ndarray:
    """Encode each row reduced mod q as one integer (base-q digits)."""
    pts = np.asarray(points)
    if pts.dtype == object:
        res = np.array([[int(v) % q for v in row] for row in pts], dtype=object).reshape(pts.shape)
        code = np.zeros(len(pts), dtype=object)
    else:
        res = pts % q
        code = np.zeros(len(pts), dtype=np.int64)
    for j in range(pts.shape[1]):
        code = code * q + res[:, j]
    return code


def decode_class(code: int, q: int, shape) -> ResiduePoint:
    width = int(np.prod(shape))
    digits = []
    code = int(code)
    for _ in range(width):
        digits.append(code % q)
        code //= q
    return ResiduePoint(q, np.array(digits[::-1], dtype=object).reshape(shape))


def _enumerate(V, T) -> EnumerationResult:
    if isinstance(V, GroupVariety) and V.group == SpecialLinear(2):
        return enumerate_sl2(T)
    if isinstance(V, PellNormForm):
        return enumerate_pell(V.D, T)
    return enumerate_exhaustive(V, T)


def _doubling(T0: float, T_cap: float) -> List[float]:
    grid, T = [], T0
    while T < T_cap:
        grid.append(T)
        T *= 2
    grid.append(T_cap)
    return grid


def image_size(points: np.ndarray, q: int) -> int:
    return int(np.unique(class_codes(points, q)).size)


def check_surjectivity(spec, q: int, T_cap: float, T0: float = 2.0,
                       budget: Optional[int] = None) -> SurjectivityResult:
    """Least doubling-grid T at which reduction mod q hits every class of G(Z/q)."""
    V = GroupVariety(spec)
    try:
        order = group_order(spec, q, budget)
    except ResourceError:
        return SurjectivityResult(q, None, None, 0, None)
    seen = 0
    for T in _doubling(T0, T_cap):
        try:
            pts = _enumerate(V, T).points
        except ResourceError:
            return SurjectivityResult(q, None, None, seen, order)
        seen = image_size(pts, q)
        if seen == order:
            return SurjectivityResult(q, True, T, seen, order)
    return SurjectivityResult(q, False, None, seen, order)


def surjectivity_from_points(result: EnumerationResult, spec, q: int, T0: float = 2.0) -> SurjectivityResult:
    """Same decision as :func:`check_surjectivity`, read off one enumeration at T_cap."""
    order = group_order(spec, q)
    seen = 0
    for T in _doubling(T0, result.T):
        seen = image_size(result.restrict(T).points, q)
        if seen == order:
            return SurjectivityResult(q, True, T, seen, order)
    return SurjectivityResult(q, False, None, seen, order)


def on_reduced_variety(xbar: ResiduePoint, V) -> bool:
    q = xbar.q
    x = xbar.array()
    if isinstance(V, GroupVariety):
        if isinstance(V.group, SpecialLinear):
            return int_det(x.tolist()) % q == 1 % q
        B = np.array(V.group.form.matrix, dtype=object)
        return bool(((x.T.dot(B).dot(x) - B) % q == 0).all()) and int_det(x.tolist()) % q == 1 % q
    if isinstance(V, QuadricRepresentation):
        B = np.array(V.B.matrix, dtype=object)
        A = np.array(V.A.matrix, dtype=object)
        return bool(((x.T.dot(B).dot(x) - A) % q == 0).all())
    if isinstance(V, PellNormForm):
        return (int(x[0]) ** 2 - V.D * int(x[1]) ** 2 - 1) % q == 0
    if isinstance(V, OrbitVariety):
        return True
    raise DomainError(f"unsupported variety {V!r}")


def _pell_lifts(D: int, q: int) -> Dict[int, tuple]:
    """Minimal lift of every class in the image of the Pell points mod q.

    Powers of the fundamental unit cycle mod q, so scanning one period
    visits the whole image; heights grow with the exponent, so the first
    visit is the minimal lift.
    """
    u, v = pell_fundamental(D)
    lifts: Dict[int, tuple] = {}
    x, y = 1, 0
    start = None
    while True:
        key = (x % q, y % q)
        if start is None:
            start = key
        elif key == start:
            break
        cands = sorted({(sx * x, sy * y) for sx in (1, -1) for sy in (1, -1)},
                       key=lambda p: [2 * abs(t) - (t > 0) for t in p])
        for p in cands:
            code = (p[0] % q) * q + p[1] % q
            if code not in lifts:
                lifts[code] = p
        x, y = u * x + D * v * y, v * x + u * y
    return lifts


def min_lift(xbar: ResiduePoint, V, T_cap: Optional[float] = None, T0: float = 2.0):
    """Minimum-height integral point of V reducing to ``xbar``, or NotFound.

    Ties in height are broken by the zigzag-lexicographic entry order.
    """
    q = xbar.q
    if not on_reduced_variety(xbar, V):
        raise DomainError("target class is not on the reduced variety")
    target = int(class_codes(np.ravel(xbar.array())[None, :].astype(object), q)[0])
    if isinstance(V, PellNormForm):
        p = _pell_lifts(V.D, q).get(target)
        if p is None or (T_cap is not None and math.hypot(*p) > T_cap):
            return NotFound(T_cap)
        return LatticePoint(p)
    if T_cap is None:
        raise DomainError("T_cap is required for this variety")
    for T in _doubling(T0, T_cap):
        res = _enumerate(V, T)
        codes = class_codes(res.points, q)
        hit = np.flatnonzero(codes == target)
        if hit.size:
            return LatticePoint(res.matrices()[hit[0]])
    return NotFound(T_cap)


def lift_report(result: EnumerationResult, q: int, classes_total: Optional[int] = None) -> LiftReport:
    """Lifting statistics for modulus q from a complete sorted enumeration."""
    V = result.variety
    codes = class_codes(result.points, q)
    uniq, first = np.unique(codes, return_index=True)
    heights = result.heights
    if classes_total is None:
        classes_total = int(uniq.size)
    if uniq.size:
        worst = first[np.argmax(heights[first])]
        worst_h = float(heights[worst])
        worst_cls = decode_class(codes[worst], q, V.shape)
    else:
        worst_h, worst_cls = float("nan"), None
    sigma = math.log(worst_h) / math.log(q) if q > 1 and uniq.size else 0.0
    return LiftReport(V, q, classes_total, int(uniq.size), worst_cls, worst_h, sigma, result.T,
                      int(uniq.size) == classes_total)


def lifting_exponent_profile(V, q_list: Sequence[int], T_cap: Optional[float] = None,
                             result: Optional[EnumerationResult] = None) -> List[LiftReport]:
    """Empirical lifting exponent per modulus.

    Group varieties: every class of G(Z/q) is expected to lift.  Quadric
    and orbit varieties: the classes are the reductions of the enumerated
    integral points.  Pell conics: the exact image of all integral points,
    found by running through one period of the fundamental unit mod q.
    """
    reports = []
    if isinstance(V, PellNormForm):
        for q in q_list:
            lifts = _pell_lifts(V.D, q)
            heights = [math.hypot(float(a), float(b)) for a, b in lifts.values()]
            hit = [h for h in heights if T_cap is None or h <= T_cap]
            worst_i = int(np.argmax(heights))
            worst_h = heights[worst_i]
            code = list(lifts.keys())[worst_i]
            sigma = math.log(worst_h) / math.log(q) if q > 1 else 0.0
            reports.append(LiftReport(V, q, len(lifts), len(hit), decode_class(code, q, (2,)), worst_h,
                                      sigma, T_cap, len(hit) == len(lifts)))
        return reports
    if result is None:
        if T_cap is None:
            raise DomainError("T_cap is required")
        result = _enumerate(V, T_cap)
    for q in q_list:
        total = group_order(V.group, q) if isinstance(V, GroupVariety) else None
        reports.append(lift_report(result, q, total))
    return reports


def pell_reduced_count(D: int, q: int) -> int:
    """Number of solutions of x^2 - D y^2 = 1 mod q (the abstract reduced points)."""
    r = np.arange(q, dtype=np.int64)
    x, y = np.meshgrid(r, r, indexing="ij")
    return int(((x * x - D * y * y - 1) % q == 0).sum())


def fiber_balance(spec, q: int, T, result: Optional[EnumerationResult] = None) -> FiberBalance:
    """Per-class counts of points of height <= T and their worst relative imbalance."""
    V = GroupVariety(spec)
    result = result.restrict(T) if result is not None else _enumerate(V, T)
    order = group_order(spec, q)
    codes = class_codes(result.points, q)
    uniq, counts = np.unique(codes, return_counts=True)
    total = int(counts.sum())
    fibers = {tuple(np.ravel(decode_class(c, q, V.shape).array()).tolist()): int(n) for c, n in zip(uniq, counts)}
    if total == 0:
        return FiberBalance(q, T, fibers, float("inf"), 0)
    dev = float(np.abs(counts * order / total - 1).max())
    if uniq.size < order:
        dev = max(dev, 1.0)
    return FiberBalance(q, T, fibers, dev, total)
