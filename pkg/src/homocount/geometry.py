"""Groups, varieties, heights, polynomial maps and spectral parameter tables.

Everything here works over the rational integers with the single
archimedean place, so the height of an integral point is the Euclidean
norm of its flattened coordinates (sup norm available for cross-checks).
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .numeric import DomainError

NORM_MODES = ("euclidean", "sup")


def _as_int_matrix(rows) -> Tuple[Tuple[int, ...], ...]:
    return tuple(tuple(int(v) for v in row) for row in rows)


def int_det(rows) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    m = [list(map(int, r)) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


@dataclass(frozen=True)
class QuadraticForm:
    """Nondegenerate integral quadratic form given by its symmetric Gram matrix."""

    matrix: Tuple[Tuple[int, ...], ...]
    signature: Tuple[int, int] = None

    def __post_init__(self):
        mat = _as_int_matrix(self.matrix)
        object.__setattr__(self, "matrix", mat)
        a = np.array(mat, dtype=float)
        if a.shape[0] != a.shape[1] or not np.array_equal(a, a.T):
            raise DomainError("quadratic form matrix must be square and symmetric")
        if int_det(mat) == 0:
            raise DomainError("quadratic form must be nondegenerate")
        eig = np.linalg.eigvalsh(a)
        sig = (int((eig > 0).sum()), int((eig < 0).sum()))
        if self.signature is None:
            object.__setattr__(self, "signature", sig)
        elif tuple(self.signature) != sig:
            raise DomainError(f"declared signature {self.signature} but matrix has {sig}")
        else:
            object.__setattr__(self, "signature", sig)

    @property
    def size(self) -> int:
        return len(self.matrix)

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def value(self, v) -> int:
        v = [int(x) for x in v]
        return sum(self.matrix[i][j] * v[i] * v[j] for i in range(self.size) for j in range(self.size))

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix]}


# --------------------------------------------------------------------------
# group specifications


@dataclass(frozen=True)
class SpecialLinear:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("SL_n needs n >= 1")

    @property
    def dim_alg(self) -> int:
        return self.n * self.n - 1

    @property
    def ambient(self) -> int:
        return self.n

    def contains(self, g) -> bool:
        g = _as_int_matrix(g)
        return len(g) == self.n and all(len(r) == self.n for r in g) and int_det(g) == 1

    def to_dict(self) -> dict:
        return {"kind": "SL", "n": self.n}


@dataclass(frozen=True)
class QuadricGroup:
    """Special orthogonal (or spin, via its orthogonal image) group of a form."""

    form: QuadraticForm
    cover: str = "special-orthogonal"

    def __post_init__(self):
        if self.cover not in ("spin", "special-orthogonal"):
            raise DomainError(f"unknown cover {self.cover!r}")

    @property
    def dim_alg(self) -> int:
        m = self.form.size
        return m * (m - 1) // 2

    @property
    def ambient(self) -> int:
        return self.form.size

    def contains(self, g) -> bool:
        g = np.array(_as_int_matrix(g), dtype=object)
        b = np.array(self.form.matrix, dtype=object)
        if g.shape != b.shape:
            return False
        return bool((g.T.dot(b).dot(g) == b).all()) and int_det(g.tolist()) == 1

    def to_dict(self) -> dict:
        return {"kind": "quadric", "form": self.form.to_dict(), "cover": self.cover}


GroupSpec = Union[SpecialLinear, QuadricGroup]


# --------------------------------------------------------------------------
# varieties


@dataclass(frozen=True)
class GroupVariety:
    group: GroupSpec

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.group.ambient, self.group.ambient)

    def to_dict(self) -> dict:
        return {"kind": "group", "group": self.group.to_dict()}


@dataclass(frozen=True)
class QuadricRepresentation:
    """Integral m x n matrices x with x^T B x = A."""

    B: QuadraticForm
    A: QuadraticForm

    def __post_init__(self):
        if self.A.size > self.B.size:
            raise DomainError("representation variety needs n <= m")

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.B.size, self.A.size)

    def to_dict(self) -> dict:
        return {"kind": "quadric-representation", "B": self.B.to_dict(), "A": self.A.to_dict()}


@dataclass(frozen=True)
class PellNormForm:
    """Integral solutions of x^2 - D y^2 = 1."""

    D: int

    def __post_init__(self):
        if self.D <= 0 or math.isqrt(self.D) ** 2 == self.D:
            raise DomainError("Pell variety needs a positive nonsquare D")

    @property
    def shape(self) -> Tuple[int, ...]:
        return (2,)

    def to_dict(self) -> dict:
        return {"kind": "pell", "D": self.D}


@dataclass(frozen=True)
class OrbitVariety:
    """Orbit of an integral vector under a finitely generated integral group.

    Membership is decided by the orbit invariant: gcd of the coordinates for
    SL_n, the form value for quadric groups (a level set may contain several
    integral orbits; this is what exhaustive extraction returns).
    """

    group: GroupSpec
    base: Tuple[int, ...]
    generators: Tuple[Tuple[Tuple[int, ...], ...], ...] = None

    def __post_init__(self):
        object.__setattr__(self, "base", tuple(int(v) for v in self.base))
        if len(self.base) != self.group.ambient:
            raise DomainError("base vector has the wrong length")
        gens = self.generators
        if gens is None:
            if not isinstance(self.group, SpecialLinear):
                raise DomainError("quadric orbits need explicit generators")
            gens = sl_generators(self.group.n)
        gens = tuple(_as_int_matrix(g) for g in gens)
        for g in gens:
            if not self.group.contains(g):
                raise DomainError(f"generator {g} is not in the group")
        object.__setattr__(self, "generators", gens)

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.group.ambient,)

    def to_dict(self) -> dict:
        return {
            "kind": "orbit",
            "group": self.group.to_dict(),
            "base": list(self.base),
            "generators": [[list(r) for r in g] for g in self.generators],
        }


VarietySpec = Union[GroupVariety, QuadricRepresentation, PellNormForm, OrbitVariety]


def variety_hash(V) -> str:
    blob = json.dumps(V.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def sl_generators(n: int):
    """Elementary matrices I + E_ij (i != j) and their inverses."""
    gens = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for s in (1, -1):
                g = [[int(a == b) for b in range(n)] for a in range(n)]
                g[i][j] = s
                gens.append(_as_int_matrix(g))
    return tuple(gens)


def adjoint_sl2(g) -> Tuple[Tuple[int, ...], ...]:
    """Image of g in SL_2(Z) under conjugation on trace-zero matrices.

    Coordinates (x, y, z) of [[x, y], [z, -x]]; the preserved form is
    2x^2 + 2yz, i.e. ``ADJOINT_FORM``.
    """
    (a, b), (c, d) = g
    return (
        (a * d + b * c, -a * c, b * d),
        (-2 * a * b, a * a, -b * b),
        (2 * c * d, -c * c, d * d),
    )


ADJOINT_FORM = QuadraticForm(((2, 0, 0), (0, 0, 1), (0, 1, 0)))


# --------------------------------------------------------------------------
# points and heights


@dataclass(frozen=True)
class LatticePoint:
    entries: Tuple
    cached_height: float = field(default=None, compare=False)

    def __post_init__(self):
        ent = np.array(self.entries, dtype=object)
        object.__setattr__(self, "entries", _freeze(ent))
        if self.cached_height is None:
            object.__setattr__(self, "cached_height", height(ent))

    def array(self) -> np.ndarray:
        return np.array(self.entries, dtype=object)

    def flat(self) -> Tuple[int, ...]:
        return tuple(int(v) for v in np.ravel(self.array()))


def _freeze(a: np.ndarray):
    if a.ndim == 0:
        return int(a)
    if a.ndim == 1:
        return tuple(int(v) for v in a)
    return tuple(_freeze(r) for r in a)


def _entries(x) -> np.ndarray:
    if isinstance(x, LatticePoint):
        return x.array()
    return np.array(x, dtype=object)


def height_sq(x) -> int:
    return int(sum(int(v) * int(v) for v in np.ravel(_entries(x))))


def height(x, norm_mode: str = "euclidean") -> float:
    """Euclidean norm of the flattened entries (or the sup norm)."""
    flat = [int(v) for v in np.ravel(_entries(x))]
    if norm_mode == "sup":
        return float(max((abs(v) for v in flat), default=0))
    if norm_mode != "euclidean":
        raise DomainError(f"unknown norm mode {norm_mode!r}")
    return math.sqrt(sum(v * v for v in flat))


def is_on_variety(x, V) -> bool:
    """Exact check of the defining equations of V at the integral point x."""
    a = _entries(x)
    if tuple(a.shape) != tuple(V.shape):
        raise DomainError(f"point of shape {a.shape} does not fit variety shape {V.shape}")
    if isinstance(V, GroupVariety):
        return V.group.contains(a.tolist())
    if isinstance(V, QuadricRepresentation):
        B = np.array(V.B.matrix, dtype=object)
        A = np.array(V.A.matrix, dtype=object)
        return bool((a.T.dot(B).dot(a) == A).all())
    if isinstance(V, PellNormForm):
        return int(a[0]) ** 2 - V.D * int(a[1]) ** 2 == 1
    if isinstance(V, OrbitVariety):
        return orbit_invariant(V.group, a) == orbit_invariant(V.group, V.base)
    raise DomainError(f"unsupported variety {V!r}")


def orbit_invariant(group, v) -> int:
    v = [int(t) for t in np.ravel(np.asarray(v, dtype=object))]
    if isinstance(group, SpecialLinear):
        g = 0
        for t in v:
            g = math.gcd(g, t)
        return g
    return group.form.value(v)


def pell_group_element(u: int, v: int, D: int):
    """Matrix of multiplication by u + v sqrt(D) on (x, y)."""
    return ((u, D * v), (v, u))


def apply_group(g, x, V) -> LatticePoint:
    """Act by g on the point x of V and verify the image lies on V."""
    g_arr = _entries(g)
    x_arr = _entries(x)
    if isinstance(V, GroupVariety):
        ok = V.group.contains(g_arr.tolist())
    elif isinstance(V, QuadricRepresentation):
        ok = QuadricGroup(V.B).contains(g_arr.tolist())
    elif isinstance(V, PellNormForm):
        ok = QuadricGroup(QuadraticForm(((1, 0), (0, -V.D)))).contains(g_arr.tolist())
    elif isinstance(V, OrbitVariety):
        ok = V.group.contains(g_arr.tolist())
    else:
        raise DomainError(f"unsupported variety {V!r}")
    if not ok:
        raise DomainError("group element does not preserve the variety")
    if not is_on_variety(x_arr, V):
        raise DomainError("point is not on the variety")
    image = g_arr.dot(x_arr)
    if not is_on_variety(image, V):
        raise AssertionError("group action left the variety")
    return LatticePoint(image)


# --------------------------------------------------------------------------
# polynomial maps


Monomial = Tuple[int, ...]


@dataclass(frozen=True)
class Polynomial:
    """Integer polynomial in ``nvars`` variables (flattened matrix entries)."""

    nvars: int
    terms: Tuple[Tuple[Monomial, int], ...]

    def __post_init__(self):
        acc: Dict[Monomial, int] = {}
        for mono, c in self.terms:
            mono = tuple(int(e) for e in mono)
            if len(mono) != self.nvars or any(e < 0 for e in mono):
                raise DomainError(f"bad monomial {mono}")
            acc[mono] = acc.get(mono, 0) + int(c)
        object.__setattr__(self, "terms", tuple(sorted((m, c) for m, c in acc.items() if c)))

    @classmethod
    def constant(cls, c: int, nvars: int) -> "Polynomial":
        return cls(nvars, (((0,) * nvars, c),))

    @classmethod
    def variable(cls, i: int, nvars: int) -> "Polynomial":
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, ((tuple(mono), 1),))

    @classmethod
    def parse(cls, expr: str, nvars: int) -> "Polynomial":
        """Parse an expression in x0, x1, ... (row-major entries) via sympy."""
        import sympy

        syms = sympy.symbols(f"x0:{nvars}")
        poly = sympy.Poly(sympy.sympify(expr, locals={str(s): s for s in syms}), *syms)
        terms = []
        for mono, c in poly.terms():
            if c != int(c):
                raise DomainError(f"non-integral coefficient {c} in {expr!r}")
            terms.append((mono, int(c)))
        return cls(nvars, tuple(terms))

    @property
    def degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=0)

    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(self.nvars, self.terms + other.terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        terms = []
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                terms.append((tuple(a + b for a, b in zip(m1, m2)), c1 * c2))
        return Polynomial(self.nvars, tuple(terms))

    __rmul__ = __mul__

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise DomainError("variable count mismatch")
            return other
        return Polynomial.constant(int(other), self.nvars)

    def __call__(self, x) -> int:
        flat = [int(v) for v in np.ravel(_entries(x))]
        total = 0
        for mono, c in self.terms:
            term = c
            for v, e in zip(flat, mono):
                if e:
                    term *= v**e
            total += term
        return total

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Vectorized evaluation on rows of flattened entries.

        Uses int64 when the value bound is safe, Python integers otherwise.
        """
        pts = np.asarray(points)
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[1] != self.nvars:
            raise DomainError("points have the wrong number of coordinates")
        if pts.shape[0] == 0:
            return np.zeros(0, dtype=np.int64)
        top = int(np.abs(pts).max()) if pts.dtype != object else max(abs(int(v)) for v in pts.ravel())
        bound = sum(abs(c) for _, c in self.terms) * max(top, 1) ** max(self.degree, 1)
        if bound < 2**62 and pts.dtype != object:
            work = pts.astype(np.int64)
            out = np.zeros(work.shape[0], dtype=np.int64)
        else:
            work = pts.astype(object)
            out = np.zeros(work.shape[0], dtype=object)
        for mono, c in self.terms:
            term = np.full(work.shape[0], c, dtype=out.dtype)
            for i, e in enumerate(mono):
                if e:
                    term = term * work[:, i] ** e
            out = out + term
        return out

    def to_dict(self) -> dict:
        return {"nvars": self.nvars, "terms": [[list(m), c] for m, c in self.terms]}


@dataclass(frozen=True)
class PolynomialMap:
    """Polynomial f = g / N with declared factor count t(f)."""

    polynomial: Polynomial
    t: int = 1
    normalizer: int = 1
    name: str = ""

    def __post_init__(self):
        if self.t < 1 or self.normalizer < 1:
            raise DomainError("t(f) and the normalizer must be positive")

    @property
    def deg(self) -> int:
        return self.polynomial.degree

    @property
    def nvars(self) -> int:
        return self.polynomial.nvars

    @classmethod
    def trace(cls, n: int) -> "PolynomialMap":
        nv = n * n
        g = sum((Polynomial.variable(i * n + i, nv) for i in range(n)), Polynomial.constant(0, nv))
        return cls(g, t=1, normalizer=1, name="trace")

    @classmethod
    def constant(cls, c: int, nvars: int) -> "PolynomialMap":
        return cls(Polynomial.constant(c, nvars), t=1, normalizer=1, name=f"const{c}")

    def integral_values(self, points: np.ndarray) -> np.ndarray:
        """Values of g on the points; the raw g when N = 1."""
        return self.polynomial.evaluate(points)

    def values(self, points: np.ndarray) -> np.ndarray:
        """Values of f = g / N; raises if some value is not integral."""
        g = self.integral_values(points)
        if self.normalizer == 1:
            return g
        if np.any(g % self.normalizer != 0):
            raise ValueError("f takes a nonintegral value: the normalizer is wrong")
        return g // self.normalizer

    def sampled_gcd(self, points: np.ndarray) -> int:
        g = 0
        for v in self.integral_values(points):
            g = math.gcd(g, int(v))
            if g == 1:
                break
        return g

    def to_dict(self) -> dict:
        return {"name": self.name, "polynomial": self.polynomial.to_dict(), "t": self.t, "N": self.normalizer}


# --------------------------------------------------------------------------
# spectral parameter tables


@dataclass(frozen=True)
class SpectralParams:
    p: Fraction
    a: Fraction
    d: Fraction
    dim: int
    alpha_group: Fraction
    alpha_orbit: Optional[Fraction] = None

    def __post_init__(self):
        for name in ("p", "a", "d", "alpha_group"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        if self.alpha_orbit is not None:
            object.__setattr__(self, "alpha_orbit", Fraction(self.alpha_orbit))
        if self.p < 2:
            raise DomainError("integrability exponent must be >= 2")
        if not 0 < self.a <= 1:
            raise DomainError("Hoelder exponent must lie in (0, 1]")
        if self.d <= 0 or self.dim <= 0 or self.alpha_group <= 0:
            raise DomainError("spectral parameters must be positive")
        if self.alpha_group > self.dim:
            raise DomainError("growth exponent cannot exceed the dimension")
        if self.alpha_orbit is not None and self.alpha_orbit <= 0:
            raise DomainError("orbit growth exponent must be positive")

    def replace(self, **kw) -> "SpectralParams":
        vals = dict(p=self.p, a=self.a, d=self.d, dim=self.dim,
                    alpha_group=self.alpha_group, alpha_orbit=self.alpha_orbit)
        vals.update(kw)
        return SpectralParams(**vals)

    def to_dict(self) -> dict:
        return {k: (None if v is None else str(v)) for k, v in
                dict(p=self.p, a=self.a, d=self.d, dim=self.dim,
                     alpha_group=self.alpha_group, alpha_orbit=self.alpha_orbit).items()}


def quadric_kind(form: QuadraticForm) -> str:
    m = form.size
    pos, neg = form.signature
    if sorted((pos, neg)) == sorted((m // 2, m - m // 2)):
        return "split"
    if sorted((pos, neg)) == [1, m - 1]:
        return "lorentzian"
    return "other"


def default_spectral_params(spec: GroupSpec) -> SpectralParams:
    """Tabulated spectral inputs for SL_n and split or Lorentzian quadric groups."""
    if isinstance(spec, SpecialLinear):
        n = spec.n
        if n < 2:
            raise DomainError("SL_1 is trivial; parameters must be user-supplied")
        return SpectralParams(p=2 * (n - 1), a=1, d=n * n - 1, dim=n * n - 1, alpha_group=n * n - n)
    if isinstance(spec, QuadricGroup):
        m = spec.form.size
        dim = m * (m - 1) // 2
        kind = quadric_kind(spec.form)
        if m < 3:
            raise DomainError("quadric groups need m >= 3; parameters must be user-supplied")
        if kind == "split":
            if m % 2:
                p, alpha = m - 1, Fraction((m - 1) ** 2, 4)
            else:
                p, alpha = m, Fraction(m * (m + 2), 4)
            return SpectralParams(p=p, a=1, d=dim, dim=dim, alpha_group=alpha, alpha_orbit=m - 2)
        if kind == "lorentzian":
            return SpectralParams(p=Fraction(9 * (m - 1), 7), a=1, d=dim, dim=dim,
                                  alpha_group=m - 2, alpha_orbit=m - 2)
    raise DomainError(f"no tabulated parameters for {spec!r}; parameters must be user-supplied")
