"""Cochain complexes of modules with lazy, memoized terms.

Differentials raise degree: ``d^n: X^n -> X^{n+1}``.  A complex has an
optional known support ``[lo, hi]`` (either end may be ``None`` for an
unbounded side); outside the support every term is zero.  Terms and
differentials are produced by rules and cached, so unbounded resolutions
are only materialized where they are asked for.

Sign conventions:

* ``shift(X, k)^n = X^{n+k}`` with differential ``(-1)^k d``.
* ``cone(f)^n = X^{n+1} + Y^n`` with ``(x, y) -> (-x d_X, x f + y d_Y)``.
* Hom complex: ``(D f)^p = d_Y f^p - (-1)^n f^{p+1} d_X`` for ``f`` of degree ``n``.
* Tensor complex: ``d(x (x) y) = dx (x) y + (-1)^{|x|} x (x) dy``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .algebra import Algebra
from .exactla import Field
from .modrep import (
    Module,
    ModuleError,
    ModuleHom,
    cogenerator,
    direct_sum,
    envelope_inside,
    hom_basis,
    internal_hom_module,
    is_injective,
    quotient,
    random_solution,
    socle_rows,
    solve_hom,
    submodule,
    submodule_on_basis,
    tensor_product,
    zero_module,
)


class ComplexError(ValueError):
    pass


class WindowInsufficientError(ComplexError):
    """The requested question cannot be certified on the supplied window."""


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


class ChainComplex:
    def __init__(
        self,
        algebra: Algebra,
        term_rule: Callable[[int], Module],
        diff_rule: Callable[[int], np.ndarray],
        lo: int | None = None,
        hi: int | None = None,
        name: str = "",
        acyclic: bool = False,
        totally_acyclic: bool = False,
    ):
        self.algebra = algebra
        self._term_rule = term_rule
        self._diff_rule = diff_rule
        self.lo = lo
        self.hi = hi
        self.name = name
        # structural knowledge supplied by constructors (e.g. complete resolutions)
        self.acyclic = acyclic or totally_acyclic
        self.totally_acyclic = totally_acyclic
        self._terms: dict[int, Module] = {}
        self._diffs: dict[int, np.ndarray] = {}
        self._lock = threading.RLock()

    def __repr__(self):
        return f"ChainComplex({self.name or '?'}, support=[{self.lo}, {self.hi}])"

    @property
    def field(self) -> Field:
        return self.algebra.field

    @property
    def bounded(self) -> bool:
        return self.lo is not None and self.hi is not None

    def in_support(self, n: int) -> bool:
        return (self.lo is None or n >= self.lo) and (self.hi is None or n <= self.hi)

    def term(self, n: int) -> Module:
        if not self.in_support(n):
            return zero_module(self.algebra)
        with self._lock:
            if n not in self._terms:
                self._terms[n] = self._term_rule(n)
            return self._terms[n]

    def diff(self, n: int) -> np.ndarray:
        """Matrix of ``d^n: X^n -> X^{n+1}``."""
        with self._lock:
            if n not in self._diffs:
                src, tgt = self.term(n), self.term(n + 1)
                if src.dim == 0 or tgt.dim == 0:
                    mat = self.field.zeros(src.dim, tgt.dim)
                else:
                    mat = np.asarray(self._diff_rule(n))
                    if mat.shape != (src.dim, tgt.dim):
                        raise ComplexError(f"differential {n} has shape {mat.shape}, expected {(src.dim, tgt.dim)}")
                self._diffs[n] = mat
            return self._diffs[n]

    def diff_hom(self, n: int) -> ModuleHom:
        return ModuleHom(self.term(n), self.term(n + 1), self.diff(n))

    def dims(self, lo: int, hi: int) -> dict[int, int]:
        return {n: self.term(n).dim for n in range(lo, hi + 1)}

    def default_window(self) -> tuple[int, int]:
        if not self.bounded:
            raise WindowInsufficientError("unbounded complex needs an explicit window")
        return self.lo, self.hi

    def check(self, lo: int | None = None, hi: int | None = None) -> None:
        """``d o d = 0`` and every differential a homomorphism, on ``[lo, hi]``."""
        if lo is None or hi is None:
            lo, hi = self.default_window()
        F = self.field
        for n in range(lo, hi + 1):
            if not self.diff_hom(n).is_homomorphism():
                raise ComplexError(f"differential {n} is not a module map")
            if np.any(F.matmul(self.diff(n), self.diff(n + 1))):
                raise ComplexError(f"d^{n + 1} d^{n} != 0")

    def materialize(self, lo: int, hi: int, name: str = "") -> "ChainComplex":
        """Bounded copy supported on ``[lo, hi]`` (brutal cut at both ends)."""
        terms = {n: self.term(n) for n in range(lo, hi + 1)}
        diffs = {n: self.diff(n) for n in range(lo, hi)}
        return complex_from_terms(self.algebra, terms, diffs, name or self.name)

    def to_json(self, lo: int | None = None, hi: int | None = None) -> dict:
        if lo is None or hi is None:
            lo, hi = self.default_window()
        F = self.field
        return {
            "window": [lo, hi],
            "terms": {str(n): self.term(n).to_json() for n in range(lo, hi + 1)},
            "diffs": {
                str(n): [[F.scalar_to_json(x) for x in row] for row in self.diff(n)]
                for n in range(lo, hi)
            },
        }


def complex_from_terms(algebra: Algebra, terms: dict[int, Module], diffs: dict[int, np.ndarray], name: str = "") -> ChainComplex:
    """Bounded complex from explicit data; missing differentials are zero."""
    F = algebra.field
    degs = [n for n, m in terms.items() if m.dim]
    if not degs:
        return zero_complex(algebra)
    lo, hi = min(degs), max(degs)

    def term(n):
        return terms.get(n, zero_module(algebra))

    def diff(n):
        if n in diffs:
            return F.array(diffs[n]) if np.asarray(diffs[n]).size else F.zeros(term(n).dim, term(n + 1).dim)
        return F.zeros(term(n).dim, term(n + 1).dim)

    return ChainComplex(algebra, term, diff, lo, hi, name)


def zero_complex(algebra: Algebra) -> ChainComplex:
    x = ChainComplex(algebra, lambda n: zero_module(algebra), lambda n: None, 0, -1, "0", totally_acyclic=True)
    return x


def concentrated(m: Module, degree: int = 0) -> ChainComplex:
    """``m`` sitting in a single degree."""
    return complex_from_terms(m.algebra, {degree: m}, {}, m.name)


def two_term(f: ModuleHom, degree: int = 0) -> ChainComplex:
    """``f`` as the differential ``X^degree -> X^{degree+1}``."""
    return complex_from_terms(f.source.algebra, {degree: f.source, degree + 1: f.target}, {degree: f.matrix})


def shift(x: ChainComplex, k: int) -> ChainComplex:
    """``X[k]``: degree ``n`` holds ``X^{n+k}``; differentials multiplied by ``(-1)^k``."""
    F = x.field
    s = _sign(k)
    lo = None if x.lo is None else x.lo - k
    hi = None if x.hi is None else x.hi - k
    return ChainComplex(
        x.algebra,
        lambda n: x.term(n + k),
        lambda n: x.diff(n + k) if s == 1 else F.neg(x.diff(n + k)),
        lo,
        hi,
        f"{x.name}[{k}]",
        x.acyclic,
        x.totally_acyclic,
    )


def truncate_geq(x: ChainComplex, n0: int) -> ChainComplex:
    """Brutal truncation: ``X^p`` for ``p >= n0`` and zero below."""
    lo = n0 if x.lo is None else max(n0, x.lo)
    return ChainComplex(x.algebra, x.term, x.diff, lo, x.hi, f"{x.name}>={n0}")


def truncate_leq(x: ChainComplex, n0: int) -> ChainComplex:
    hi = n0 if x.hi is None else min(n0, x.hi)
    return ChainComplex(x.algebra, x.term, x.diff, x.lo, hi, f"{x.name}<={n0}")


def _union(a: int | None, b: int | None, pick) -> int | None:
    if a is None or b is None:
        return None
    return pick(a, b)


def _empty_support(x: ChainComplex) -> bool:
    return x.bounded and x.lo > x.hi


def _lo_hi(*xs: ChainComplex):
    xs = [x for x in xs if not _empty_support(x)]
    if not xs:
        return 0, -1
    lo, hi = xs[0].lo, xs[0].hi
    for x in xs[1:]:
        lo = _union(lo, x.lo, min)
        hi = _union(hi, x.hi, max)
    return lo, hi


def direct_sum_complex(*xs: ChainComplex) -> tuple[ChainComplex, list["ChainMap"], list["ChainMap"]]:
    a = xs[0].algebra
    F = a.field
    sums: dict[int, tuple] = {}
    lock = threading.RLock()

    def data(n):
        with lock:
            if n not in sums:
                sums[n] = direct_sum(*[x.term(n) for x in xs])
            return sums[n]

    def diff(n):
        blocks = [x.diff(n) for x in xs]
        rows = sum(b.shape[0] for b in blocks)
        cols = sum(b.shape[1] for b in blocks)
        out = F.zeros(rows, cols)
        r = c = 0
        for b in blocks:
            out[r:r + b.shape[0], c:c + b.shape[1]] = b
            r += b.shape[0]
            c += b.shape[1]
        return out

    lo, hi = _lo_hi(*xs)
    s = ChainComplex(
        a, lambda n: data(n)[0], diff, lo, hi, "+".join(x.name or "?" for x in xs),
        all(x.acyclic for x in xs), all(x.totally_acyclic for x in xs),
    )
    incl = [ChainMap(x, s, (lambda n, i=i: data(n)[1][i].matrix)) for i, x in enumerate(xs)]
    proj = [ChainMap(s, x, (lambda n, i=i: data(n)[2][i].matrix)) for i, x in enumerate(xs)]
    return s, incl, proj


def subcomplex(x: ChainComplex, rows_rule: Callable[[int], np.ndarray | None], lo=None, hi=None, name: str = "") -> tuple[ChainComplex, "ChainMap"]:
    """Subcomplex spanned degreewise by ``rows_rule(n)`` (``None`` means the whole term)."""
    F = x.field
    cache: dict[int, tuple] = {}
    lock = threading.RLock()

    def data(n):
        with lock:
            if n not in cache:
                rows = rows_rule(n)
                if rows is None:
                    m = x.term(n)
                    cache[n] = (m, m.identity().matrix, None)
                else:
                    m, inc = submodule_on_basis(x.term(n), rows)
                    cache[n] = (m, inc.matrix, rows)
            return cache[n]

    def diff(n):
        _, inc0, _ = data(n)
        _, inc1, rows1 = data(n + 1)
        img = F.matmul(inc0, x.diff(n))
        if rows1 is None:
            return img
        sol = F.solve_left(inc1, img)
        if sol is None:
            raise ComplexError(f"rows are not closed under the differential at degree {n}")
        return sol

    if lo is None and hi is None:
        lo, hi = x.lo, x.hi
    sub = ChainComplex(x.algebra, lambda n: data(n)[0], diff, lo, hi, name)
    return sub, ChainMap(sub, x, lambda n: data(n)[1])


# -- chain maps -------------------------------------------------------------------


class ChainMap:
    """Degree-zero chain map given by a memoized component rule."""

    def __init__(self, source: ChainComplex, target: ChainComplex, rule: Callable[[int], np.ndarray], name: str = ""):
        self.source = source
        self.target = target
        self._rule = rule
        self._memo: dict[int, np.ndarray] = {}
        self._lock = threading.RLock()
        self.name = name

    @classmethod
    def from_dict(cls, source: ChainComplex, target: ChainComplex, comps: dict[int, np.ndarray]) -> "ChainMap":
        F = source.field

        def rule(n):
            if n in comps:
                return F.array(comps[n]) if np.asarray(comps[n]).size else F.zeros(source.term(n).dim, target.term(n).dim)
            return F.zeros(source.term(n).dim, target.term(n).dim)

        return cls(source, target, rule)

    @classmethod
    def identity(cls, x: ChainComplex) -> "ChainMap":
        return cls(x, x, lambda n: x.field.eye(x.term(n).dim), "id")

    @classmethod
    def zero(cls, x: ChainComplex, y: ChainComplex) -> "ChainMap":
        return cls(x, y, lambda n: x.field.zeros(x.term(n).dim, y.term(n).dim), "0")

    @property
    def field(self) -> Field:
        return self.source.field

    def __getitem__(self, n: int) -> np.ndarray:
        with self._lock:
            if n not in self._memo:
                s, t = self.source.term(n).dim, self.target.term(n).dim
                if s == 0 or t == 0:
                    mat = self.field.zeros(s, t)
                else:
                    mat = np.asarray(self._rule(n))
                    if mat.shape != (s, t):
                        raise ComplexError(f"component {n} has shape {mat.shape}, expected {(s, t)}")
                self._memo[n] = mat
            return self._memo[n]

    def hom(self, n: int) -> ModuleHom:
        return ModuleHom(self.source.term(n), self.target.term(n), self[n])

    def then(self, g: "ChainMap") -> "ChainMap":
        """``g o self``."""
        F = self.field
        return ChainMap(self.source, g.target, lambda n: F.matmul(self[n], g[n]))

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, lambda n: self.field.add(self[n], other[n]))

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return ChainMap(self.source, self.target, lambda n: self.field.sub(self[n], other[n]))

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, lambda n: self.field.neg(self[n]))

    def scaled(self, c) -> "ChainMap":
        return ChainMap(self.source, self.target, lambda n: self.field.scale(self[n], c))

    def is_chain_map(self, lo: int, hi: int) -> bool:
        F = self.field
        for n in range(lo, hi + 1):
            if not self.hom(n).is_homomorphism():
                return False
            if not np.array_equal(F.matmul(self[n], self.target.diff(n)), F.matmul(self.source.diff(n), self[n + 1])):
                return False
        return True

    def window(self) -> tuple[int, int]:
        return _lo_hi(self.source, self.target) if not (self.source.bounded or self.target.bounded) else _overlap(self.source, self.target)


def _overlap(x: ChainComplex, y: ChainComplex) -> tuple[int, int]:
    lo = max(v for v in (x.lo, y.lo) if v is not None) if (x.lo is not None or y.lo is not None) else None
    hi = min(v for v in (x.hi, y.hi) if v is not None) if (x.hi is not None or y.hi is not None) else None
    if lo is None or hi is None:
        raise WindowInsufficientError("chain map between unbounded complexes needs a window")
    return lo, hi


def compose_maps(g: ChainMap, f: ChainMap) -> ChainMap:
    return f.then(g)


@dataclass
class Homotopy:
    """Components ``s^n: X^n -> Y^{n-1}`` with ``f^n = s^{n+1} d + d s^n`` on ``window``."""

    map: ChainMap
    components: dict[int, np.ndarray]
    window: tuple[int, int]
    certified: bool = True

    def __getitem__(self, n: int) -> np.ndarray:
        if n in self.components:
            return self.components[n]
        f = self.map
        return f.field.zeros(f.source.term(n).dim, f.target.term(n - 1).dim)

    def verify(self) -> bool:
        f = self.map
        F = f.field
        x, y = f.source, f.target
        for n in range(self.window[0], self.window[1] + 1):
            rhs = F.add(F.matmul(x.diff(n), self[n + 1]), F.matmul(self[n], y.diff(n - 1)))
            if not np.array_equal(f[n], rhs):
                return False
        return True


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone with ``C^n = X^{n+1} + Y^n``."""
    x, y = f.source, f.target
    F = f.field
    sums: dict[int, tuple] = {}
    lock = threading.RLock()

    def data(n):
        with lock:
            if n not in sums:
                sums[n] = direct_sum(x.term(n + 1), y.term(n))
            return sums[n]

    def diff(n):
        a, b = x.term(n + 1).dim, y.term(n).dim
        c, d = x.term(n + 2).dim, y.term(n + 1).dim
        out = F.zeros(a + b, c + d)
        out[:a, :c] = F.neg(x.diff(n + 1))
        out[:a, c:] = f[n + 1]
        out[a:, c:] = y.diff(n)
        return out

    xs = shift(x, 1)
    lo, hi = _lo_hi(xs, y)
    return ChainComplex(x.algebra, lambda n: data(n)[0], diff, lo, hi, f"cone({f.name})",
                        x.acyclic and y.acyclic, x.totally_acyclic and y.totally_acyclic)


def cone_maps(f: ChainMap, c: ChainComplex) -> tuple[ChainMap, ChainMap]:
    """The canonical ``Y -> cone(f)`` and ``cone(f) -> X[1]``."""
    x, y = f.source, f.target
    F = f.field

    def incl(n):
        a, b = x.term(n + 1).dim, y.term(n).dim
        return np.concatenate([F.zeros(b, a), F.eye(b)], axis=1)

    def proj(n):
        a, b = x.term(n + 1).dim, y.term(n).dim
        return np.concatenate([F.eye(a), F.zeros(b, a)], axis=0)

    return ChainMap(y, c, incl), ChainMap(c, shift(x, 1), proj)


# -- cohomology -------------------------------------------------------------------


def cycles_rows(x: ChainComplex, n: int) -> np.ndarray:
    F = x.field
    d = x.diff(n)
    if x.term(n).dim == 0:
        return F.zeros(0, 0)
    if d.shape[1] == 0:
        return F.eye(x.term(n).dim)
    return F.row_basis(F.left_kernel(d))


def boundaries_rows(x: ChainComplex, n: int) -> np.ndarray:
    F = x.field
    d = x.diff(n - 1)
    if d.shape[0] == 0:
        return F.zeros(0, x.term(n).dim)
    return F.row_basis(d)


def cycles(x: ChainComplex, n: int) -> tuple[Module, ModuleHom]:
    """``Z^n = ker d^n`` with its inclusion."""
    return submodule(x.term(n), cycles_rows(x, n))


def cohomology(x: ChainComplex, n: int) -> Module:
    F = x.field
    z, zi = cycles(x, n)
    b = boundaries_rows(x, n)
    if z.dim == 0:
        return z
    _, piv = F.rref(zi.matrix)
    b_in_z = b[:, piv] if b.shape[0] else F.zeros(0, z.dim)
    return quotient(z, b_in_z)[0]


def cohomology_dim(x: ChainComplex, n: int) -> int:
    return cycles_rows(x, n).shape[0] - boundaries_rows(x, n).shape[0]


def is_acyclic(x: ChainComplex, lo: int | None = None, hi: int | None = None) -> bool:
    if lo is None or hi is None:
        lo, hi = x.default_window()
    return all(cohomology_dim(x, n) == 0 for n in range(lo, hi + 1))


def _hom_into_ranks(e: Module, x: ChainComplex, n: int, covariant: bool) -> int:
    """Rank of ``Hom(E, d^n)`` (covariant) or ``Hom(d^n, E)`` (contravariant)."""
    F = x.field
    if covariant:
        hs = hom_basis(e, x.term(n))
        if hs.dim == 0 or x.term(n + 1).dim == 0:
            return 0
        return F.rank(F.matmul(hs.matrices(), x.diff(n)).reshape(hs.dim, -1))
    hs = hom_basis(x.term(n + 1), e)
    if hs.dim == 0 or x.term(n).dim == 0:
        return 0
    return F.rank(F.matmul(x.diff(n), hs.matrices()).reshape(hs.dim, -1))


def is_totally_acyclic(x: ChainComplex, lo: int | None = None, hi: int | None = None) -> bool:
    """Acyclic complex of injectives whose Hom from and into the cogenerator stays acyclic on the window."""
    if lo is None or hi is None:
        lo, hi = x.default_window()
    if not is_acyclic(x, lo, hi):
        return False
    if not all(is_injective(x.term(n)) for n in range(lo - 1, hi + 2)):
        return False
    e = cogenerator(x.algebra)
    for n in range(lo, hi + 1):
        # covariant: Hom(E, X^n) has dim hom_basis; exactness at n
        dim_n = hom_basis(e, x.term(n)).dim
        if dim_n - _hom_into_ranks(e, x, n, True) != _hom_into_ranks(e, x, n - 1, True):
            return False
        dim_n = hom_basis(x.term(n), e).dim
        if dim_n - _hom_into_ranks(e, x, n - 1, False) != _hom_into_ranks(e, x, n, False):
            return False
    return True


# -- Hom complexes ----------------------------------------------------------------


def default_prange(x: ChainComplex, y: ChainComplex, n: int) -> tuple[int, int]:
    if _empty_support(x) or _empty_support(y):
        return 0, 0
    if x.bounded:
        lo, hi = x.lo - 1, x.hi + 1
        if y.lo is not None:
            lo = max(lo, y.lo - n - 2)
        if y.hi is not None:
            hi = min(hi, y.hi - n + 2)
        return lo, max(lo, hi)
    if y.bounded:
        return y.lo - n - 1, y.hi - n + 1
    raise WindowInsufficientError("both complexes unbounded: supply a p-range")


class HomComplexDegree:
    """One degree of the Hom complex restricted to ``p`` in ``prange``.

    Elements are families ``f^p: X^p -> Y^{p+n}``; coordinates are
    concatenated over ``p`` in the bases of the Hom spaces.
    """

    def __init__(self, x: ChainComplex, y: ChainComplex, n: int, prange: tuple[int, int]):
        self.x, self.y, self.n = x, y, n
        self.prange = prange
        self.spaces = {p: hom_basis(x.term(p), y.term(p + n)) for p in range(prange[0], prange[1] + 1)}
        self.offsets = {}
        off = 0
        for p, hs in self.spaces.items():
            self.offsets[p] = off
            off += hs.dim
        self.size = off

    def family(self, coords) -> dict[int, np.ndarray]:
        F = self.x.field
        coords = np.asarray(coords).reshape(-1)
        out = {}
        for p, hs in self.spaces.items():
            o = self.offsets[p]
            out[p] = hs.combine(coords[o:o + hs.dim]).matrix if hs.dim else F.zeros(hs.source.dim, hs.target.dim)
        return out

    def coords(self, fam: dict[int, np.ndarray]) -> np.ndarray:
        F = self.x.field
        out = F.zeros(1, self.size)
        for p, hs in self.spaces.items():
            if hs.dim and p in fam:
                out[0, self.offsets[p]:self.offsets[p] + hs.dim] = hs.coords(fam[p])[0]
        return out[0]

    def differential_images(self) -> dict[int, np.ndarray]:
        """For every basis element, its ``(Df)^q`` as flattened matrices, keyed by ``q``."""
        F = self.x.field
        x, y, n = self.x, self.y, self.n
        sgn = _sign(n)
        out: dict[int, np.ndarray] = {}
        lo, hi = self.prange
        for q in range(lo - 1, hi + 1):
            out[q] = F.zeros(self.size, x.term(q).dim * y.term(q + n + 1).dim)
        for p, hs in self.spaces.items():
            if hs.dim == 0:
                continue
            o = self.offsets[p]
            mats = hs.matrices()
            # d_Y f^p lands in slot p
            out[p][o:o + hs.dim] = F.matmul(mats, y.diff(p + n)).reshape(hs.dim, -1)
            # -(-1)^n f^p d_X^{p-1} lands in slot p-1
            t = F.matmul(x.diff(p - 1), mats).reshape(hs.dim, -1)
            out[p - 1][o:o + hs.dim] = t if sgn == -1 else F.neg(t)
        return out


@dataclass
class HomCohomology:
    """``H^n`` of the Hom complex on a p-range, with representatives and a class map."""

    degree: HomComplexDegree
    boundary_basis: np.ndarray
    boundary_pivots: list[int]
    reps: np.ndarray
    rep_pivots: list[int]
    exact: bool
    _cycle_check: np.ndarray = field(repr=False, default=None)

    @property
    def dim(self) -> int:
        return self.reps.shape[0]

    @property
    def n(self) -> int:
        return self.degree.n

    @property
    def prange(self) -> tuple[int, int]:
        return self.degree.prange

    def representatives(self) -> list[dict[int, np.ndarray]]:
        return [self.degree.family(r) for r in self.reps]

    def _reduce(self, v: np.ndarray) -> np.ndarray:
        F = self.degree.x.field
        v = np.asarray(v).reshape(1, -1)
        if self.boundary_basis.shape[0]:
            v = F.sub(v, F.matmul(v[:, self.boundary_pivots], self.boundary_basis))
        return v

    def is_cycle(self, fam: dict[int, np.ndarray]) -> bool:
        v = self.degree.coords(fam).reshape(1, -1)
        return not np.any(self.degree.x.field.matmul(v, self._cycle_check))

    def classes(self, fam: dict[int, np.ndarray]) -> np.ndarray:
        """Coordinates of the class of a cycle family in the basis of representatives."""
        F = self.degree.x.field
        if not self.is_cycle(fam):
            raise ComplexError("family is not a cycle on the p-range")
        v = self._reduce(self.degree.coords(fam))
        if self.dim == 0:
            return F.zeros(1, 0)[0]
        c = v[:, self.rep_pivots]
        if not np.array_equal(F.matmul(c, self.reps), v):
            raise ComplexError("reduced cycle not in the span of representatives")
        return c[0]

    def is_boundary(self, fam: dict[int, np.ndarray]) -> bool:
        return not np.any(self.classes(fam))


def hom_cohomology(x: ChainComplex, y: ChainComplex, n: int, prange: tuple[int, int] | None = None) -> HomCohomology:
    """``H^n Hom(X, Y)`` computed on a p-range.

    Cycles are families on ``prange`` whose differential vanishes at
    ``p in [lo, hi-1]``; boundaries are differentials of families on
    ``[lo, hi+1]`` restricted to ``prange``.  Exact whenever ``prange``
    covers the overlap of the supports with a margin of one, and also when
    ``X`` is an acyclic complex of injectives, ``Y`` is totally acyclic and
    ``lo < hi``.
    """
    F = x.field
    if prange is None:
        prange = default_prange(x, y, n)
        exact = True
    else:
        exact = _prange_is_exact(x, y, n, prange)
    lo, hi = prange
    deg = HomComplexDegree(x, y, n, prange)
    imgs = deg.differential_images()
    check_cols = [imgs[q] for q in range(lo, hi)]
    check = np.concatenate(check_cols, axis=1) if check_cols else F.zeros(deg.size, 0)
    if deg.size == 0:
        z = F.zeros(0, 0)
    elif check.shape[1] == 0:
        z = F.eye(deg.size)
    else:
        z = F.row_basis(F.left_kernel(check))
    # boundaries: D of degree n-1 families on [lo, hi+1], restricted to [lo, hi]
    prev = HomComplexDegree(x, y, n - 1, (lo, hi + 1))
    pimgs = prev.differential_images()
    brows = F.zeros(prev.size, deg.size)
    for p, hs in deg.spaces.items():
        if hs.dim:
            o = deg.offsets[p]
            brows[:, o:o + hs.dim] = pimgs[p][:, hs.pivots] if pimgs[p].shape[1] else F.zeros(prev.size, hs.dim)
    bb = F.row_basis(brows) if prev.size else F.zeros(0, deg.size)
    bpiv = F.rref(bb)[1] if bb.shape[0] else []
    if z.shape[0]:
        red = F.sub(z, F.matmul(z[:, bpiv], bb)) if bb.shape[0] else z
        reps = F.row_basis(red)
    else:
        reps = F.zeros(0, deg.size)
    rpiv = F.rref(reps)[1] if reps.shape[0] else []
    return HomCohomology(deg, bb, bpiv, reps, rpiv, exact, check)


def _prange_is_exact(x: ChainComplex, y: ChainComplex, n: int, prange: tuple[int, int]) -> bool:
    lo, hi = prange
    if x.bounded and not _empty_support(x) and lo < x.lo and hi > x.hi:
        return True
    if y.bounded and not _empty_support(y) and lo < y.lo - n and hi > y.hi - n:
        return True
    if _empty_support(x) or _empty_support(y):
        return True
    return x.acyclic and y.totally_acyclic and lo < hi and all(is_injective(x.term(p)) for p in range(lo, hi + 1))


def hom_cohomology_dim(x: ChainComplex, y: ChainComplex, n: int, prange=None) -> int:
    return hom_cohomology(x, y, n, prange).dim


def chain_map_family(f: ChainMap, prange: tuple[int, int]) -> dict[int, np.ndarray]:
    return {p: f[p] for p in range(prange[0], prange[1] + 1)}


def chain_maps_modulo_homotopy(x: ChainComplex, y: ChainComplex) -> int:
    """Independent oracle for ``dim Hom_K(X, Y)`` on bounded complexes.

    Chain maps are solved for as one big system over k-linear matrices with
    module conditions imposed directly; null-homotopic ones are images of all
    k-linear module-map families ``s``.
    """
    F = x.field
    lo, hi = _lo_hi(x, y)
    if lo is None or hi is None:
        raise WindowInsufficientError("oracle needs bounded complexes")
    if lo > hi:
        return 0
    degs = list(range(lo - 1, hi + 2))
    # unknown: all module maps f^p (via hom bases), conditions: chain condition
    spaces = {p: hom_basis(x.term(p), y.term(p)) for p in degs}
    sizes = [spaces[p].dim for p in degs]
    total = sum(sizes)
    offs = np.cumsum([0] + sizes)
    rows = []
    for i, p in enumerate(degs[:-1]):
        q = p + 1
        width = x.term(p).dim * y.term(q).dim
        block = F.zeros(total, width)
        hs, hq = spaces[p], spaces[q]
        if width:
            if hs.dim:
                block[offs[i]:offs[i] + hs.dim] = F.matmul(hs.matrices(), y.diff(p)).reshape(hs.dim, -1)
            if hq.dim:
                block[offs[i + 1]:offs[i + 1] + hq.dim] = F.neg(F.matmul(x.diff(p), hq.matrices()).reshape(hq.dim, -1))
        rows.append(block)
    cond = np.concatenate(rows, axis=1) if rows else F.zeros(total, 0)
    z = F.rank(F.left_kernel(cond)) if cond.shape[1] else total
    # homotopies s^p: X^p -> Y^{p-1}
    sspaces = {p: hom_basis(x.term(p), y.term(p - 1)) for p in range(lo - 1, hi + 3)}
    imgs = []
    for p, hs in sspaces.items():
        if hs.dim == 0:
            continue
        mats = hs.matrices()
        vec = F.zeros(hs.dim, total)
        # contributes d s^p to degree p and s^p d to degree p-1
        for q in (p, p - 1):
            if q not in spaces or spaces[q].dim == 0:
                continue
            i = degs.index(q)
            if q == p:
                img = F.matmul(mats, y.diff(p - 1))
            else:
                img = F.matmul(x.diff(p - 1), mats)
            vec[:, offs[i]:offs[i] + spaces[q].dim] = F.add(
                vec[:, offs[i]:offs[i] + spaces[q].dim], spaces[q].coords(img)
            )
        imgs.append(vec)
    b = F.rank(np.concatenate(imgs)) if imgs else 0
    return z - b


# -- null homotopies ------------------------------------------------------------------


def is_null_homotopic(f: ChainMap, window: tuple[int, int] | None = None) -> Homotopy | None:
    """A homotopy witness for ``f``, or ``None`` when ``f`` is not null-homotopic.

    Refutation is always sound.  A witness found on a window of unbounded
    complexes is only certified when the source is an acyclic complex of
    injectives and the target is totally acyclic; otherwise
    :class:`WindowInsufficientError` is raised.
    """
    x, y = f.source, f.target
    F = f.field
    if window is None:
        lo, hi = default_prange(x, y, 0)
    else:
        lo, hi = window
    h = hom_cohomology(x, y, 0, (lo, hi))
    fam = chain_map_family(f, (lo, hi))
    if not h.is_cycle(fam):
        raise ComplexError("map is not a chain map on the window")
    v = h._reduce(h.degree.coords(fam))
    if np.any(v):
        return None
    if not h.exact:
        raise WindowInsufficientError(f"homotopy on [{lo}, {hi}] found but not certifiable for unbounded complexes")
    # recover s: solve boundary system for the coordinates of fam
    prev = HomComplexDegree(x, y, -1, (lo, hi + 1))
    pimgs = prev.differential_images()
    deg = h.degree
    sys_ = F.zeros(prev.size, deg.size)
    for p, hs in deg.spaces.items():
        if hs.dim:
            o = deg.offsets[p]
            sys_[:, o:o + hs.dim] = pimgs[p][:, hs.pivots]
    sol = F.solve_left(sys_, deg.coords(fam).reshape(1, -1))
    if sol is None:
        raise ComplexError("inconsistent homotopy system")
    comps = prev.family(sol[0])
    hom = Homotopy(f, comps, (lo, hi))
    if not hom.verify():
        raise ComplexError("homotopy witness failed verification")
    return hom


def is_homotopic(f: ChainMap, g: ChainMap, window=None) -> bool:
    return is_null_homotopic(f - g, window) is not None


# -- Hopf tensor and internal Hom ----------------------------------------------------


def tensor_complex(x: ChainComplex, y: ChainComplex) -> ChainComplex:
    """``(X (x) Y)^n = sum_p X^p (x) Y^{n-p}``; ``X`` must be bounded."""
    if not x.bounded:
        raise WindowInsufficientError("left tensor factor must be bounded")
    a = x.algebra
    F = a.field
    if a.hopf is None:
        raise ModuleError(f"{a!r} carries no Hopf datum")
    ps = list(range(x.lo, x.hi + 1)) if not _empty_support(x) else []
    lock = threading.RLock()
    cache: dict[int, tuple] = {}

    def data(n):
        with lock:
            if n not in cache:
                parts = [tensor_product(x.term(p), y.term(n - p)) for p in ps]
                if not parts:
                    cache[n] = (zero_module(a), [])
                else:
                    cache[n] = (direct_sum(*parts)[0], [m.dim for m in parts])
            return cache[n]

    def diff(n):
        _, src = data(n)
        _, tgt = data(n + 1)
        out = F.zeros(sum(src), sum(tgt))
        so = np.cumsum([0] + src)
        to = np.cumsum([0] + tgt)
        for i, p in enumerate(ps):
            q = n - p
            xp, yq = x.term(p).dim, y.term(q).dim
            if xp * yq == 0:
                continue
            # d x (x) y into slot (p+1, q)
            if i + 1 < len(ps):
                blk = F.kron(x.diff(p), F.eye(yq))
                out[so[i]:so[i + 1], to[i + 1]:to[i + 2]] = blk
            # (-1)^p x (x) d y into slot (p, q+1)
            blk = F.kron(F.eye(xp), y.diff(q))
            out[so[i]:so[i + 1], to[i]:to[i + 1]] = blk if _sign(p) == 1 else F.neg(blk)
        return out

    lo = None if y.lo is None or not ps else x.lo + y.lo
    hi = None if y.hi is None or not ps else x.hi + y.hi
    if not ps:
        lo, hi = 0, -1
    return ChainComplex(a, lambda n: data(n)[0], diff, lo, hi, f"{x.name}(x){y.name}")


def internal_hom(y: ChainComplex, z: ChainComplex) -> ChainComplex:
    """``Hom_k(Y, Z)^n = sum_p Hom_k(Y^p, Z^{p+n})`` with the antipode action; ``Y`` bounded."""
    if not y.bounded:
        raise WindowInsufficientError("source of internal Hom must be bounded")
    a = y.algebra
    F = a.field
    ps = list(range(y.lo, y.hi + 1)) if not _empty_support(y) else []
    lock = threading.RLock()
    cache: dict[int, tuple] = {}

    def data(n):
        with lock:
            if n not in cache:
                parts = [internal_hom_module(y.term(p), z.term(p + n)) for p in ps]
                if not parts:
                    cache[n] = (zero_module(a), [])
                else:
                    cache[n] = (direct_sum(*parts)[0], [m.dim for m in parts])
            return cache[n]

    def diff(n):
        _, src = data(n)
        _, tgt = data(n + 1)
        out = F.zeros(sum(src), sum(tgt))
        so = np.cumsum([0] + src)
        to = np.cumsum([0] + tgt)
        sgn = _sign(n)
        for i, p in enumerate(ps):
            yp, zq = y.term(p).dim, z.term(p + n).dim
            if yp * zq == 0:
                continue
            # phi -> phi d_Z, same p: vec(phi B) = vec(phi) kron(I, B)
            blk = F.kron(F.eye(yp), z.diff(p + n))
            out[so[i]:so[i + 1], to[i]:to[i + 1]] = blk
            # phi^p -> -(-1)^n d_Y^{p-1} phi^p lands in slot p-1: vec(A phi) = vec(phi) kron(A^T, I)
            if i > 0:
                blk = F.kron(y.diff(p - 1).T, F.eye(zq))
                out[so[i]:so[i + 1], to[i - 1]:to[i]] = F.neg(blk) if sgn == 1 else blk
        return out

    lo = None if z.lo is None or not ps else z.lo - y.hi
    hi = None if z.hi is None or not ps else z.hi - y.lo
    if not ps:
        lo, hi = 0, -1
    return ChainComplex(a, lambda n: data(n)[0], diff, lo, hi, f"Hom({y.name},{z.name})")


# -- homotopically minimal decomposition ---------------------------------------------


def is_minimal_at(x: ChainComplex, n: int) -> bool:
    """``Z^n -> X^n`` is an injective envelope: ``X^n`` injective and ``soc X^n`` inside ``Z^n``."""
    t = x.term(n)
    if t.dim == 0:
        return True
    if not is_injective(t):
        return False
    z = cycles_rows(x, n)
    soc = socle_rows(t)
    F = x.field
    return F.rank(np.concatenate([z, soc])) == z.shape[0]


@dataclass
class MinimalDecomposition:
    source: ChainComplex
    minimal: ChainComplex
    contractible: ChainComplex
    incl_minimal: ChainMap
    incl_contractible: ChainMap
    proj_minimal: ChainMap
    proj_contractible: ChainMap
    window: tuple[int, int]

    def check_reassembly(self, lo: int | None = None, hi: int | None = None) -> bool:
        """``i' p' + i'' p'' = id`` and ``p i = id`` degreewise."""
        if lo is None:
            lo, hi = self.window[0] - 1, self.window[1] + 2
        F = self.source.field
        for n in range(lo, hi + 1):
            d = self.source.term(n).dim
            tot = F.add(F.matmul(self.proj_minimal[n], self.incl_minimal[n]),
                        F.matmul(self.proj_contractible[n], self.incl_contractible[n]))
            if not np.array_equal(tot, F.eye(d)):
                return False
            if not np.array_equal(F.matmul(self.incl_minimal[n], self.proj_minimal[n]), F.eye(self.minimal.term(n).dim)):
                return False
            if not np.array_equal(F.matmul(self.incl_contractible[n], self.proj_contractible[n]),
                                  F.eye(self.contractible.term(n).dim)):
                return False
            if np.any(F.matmul(self.incl_minimal[n], self.proj_contractible[n])):
                return False
        return True


def minimal_decomposition(x: ChainComplex, window: tuple[int, int] | None = None, rng=None) -> MinimalDecomposition:
    """Split ``X = X' + X''`` with ``X''`` contractible and ``X'`` minimal on the window.

    For each ``n`` in the window, ``U^n`` is the envelope of ``Z^n`` inside
    ``X^n`` and ``V^n`` a module complement; ``X''`` is the sum of the
    two-term complexes ``V^n -> d V^n``.  ``X'`` is the kernel of the chain
    retraction ``r = d h g + h g d`` onto ``X''``, where ``h`` contracts
    ``X''`` and ``g`` is a degreewise retraction.  With ``rng`` the choices
    of complements and retractions are randomized.
    """
    F = x.field
    lo, hi = window if window is not None else x.default_window()
    for n in range(lo, hi + 1):
        if not is_injective(x.term(n)):
            raise ModuleError(f"term in degree {n} is not injective")

    v_rows: dict[int, np.ndarray] = {}
    for n in range(lo, hi + 1):
        t = x.term(n)
        if t.dim == 0:
            v_rows[n] = F.zeros(0, 0)
            continue
        u = envelope_inside(t, cycles_rows(x, n))
        u_mod, u_inc = submodule(t, u)
        cons = [(u_inc.matrix, None, F.eye(u_mod.dim))]
        rho = random_solution(t, u_mod, cons, rng) if rng is not None else solve_hom(t, u_mod, cons)
        if rho is None:
            raise ModuleError(f"no retraction onto the envelope in degree {n}")
        v_rows[n] = F.left_kernel(rho.matrix) if u_mod.dim else F.eye(t.dim)

    def vrows(n):
        return v_rows.get(n, F.zeros(0, x.term(n).dim))

    # basis of X''^n: V^n rows then d(V^{n-1}) rows
    w_rows: dict[int, np.ndarray] = {}
    split: dict[int, int] = {}
    for n in range(lo, hi + 2):
        if x.term(n).dim == 0:
            w_rows[n] = F.zeros(0, 0)
            split[n] = 0
            continue
        a = vrows(n)
        b = F.matmul(vrows(n - 1), x.diff(n - 1)) if vrows(n - 1).shape[0] else F.zeros(0, x.term(n).dim)
        w_rows[n] = np.concatenate([a.reshape(-1, x.term(n).dim), b.reshape(-1, x.term(n).dim)])
        split[n] = a.shape[0]

    xpp, ipp = subcomplex(x, lambda n: w_rows.get(n, F.zeros(0, x.term(n).dim)), lo, hi + 1, "X''")

    def h(n):
        # X''^n -> X''^{n-1}: d V^{n-1} -> V^{n-1}
        k0 = w_rows.get(n, F.zeros(0, 0)).shape[0]
        k1 = w_rows.get(n - 1, F.zeros(0, 0)).shape[0]
        out = F.zeros(k0, k1)
        if k0 and k1:
            a0, a1 = split[n], split[n - 1]
            out[a0:, :a1] = F.eye(k0 - a0)
        return out

    g: dict[int, np.ndarray] = {}
    for n in range(lo, hi + 2):
        t = x.term(n)
        sub = xpp.term(n)
        if sub.dim == 0:
            g[n] = F.zeros(t.dim, 0)
            continue
        cons = [(ipp[n], None, F.eye(sub.dim))]
        sol = random_solution(t, sub, cons, rng) if rng is not None else solve_hom(t, sub, cons)
        if sol is None:
            raise ModuleError(f"contractible summand is not a summand in degree {n}")
        g[n] = sol.matrix

    def gm(n):
        return g.get(n, F.zeros(x.term(n).dim, xpp.term(n).dim))

    def r(n):
        a = F.matmul(F.matmul(gm(n), h(n)), xpp.diff(n - 1)) if xpp.term(n - 1).dim else F.zeros(x.term(n).dim, xpp.term(n).dim)
        b = F.matmul(F.matmul(x.diff(n), gm(n + 1)), h(n + 1)) if xpp.term(n + 1).dim else F.zeros(x.term(n).dim, xpp.term(n).dim)
        return F.add(a, b)

    def min_rows(n):
        if n < lo or n > hi + 1:
            return None
        rn = r(n)
        if rn.shape[1] == 0:
            return None
        return F.row_basis(F.left_kernel(rn))

    xp, ip = subcomplex(x, min_rows, x.lo, x.hi, "X'")
    proj_pp = ChainMap(x, xpp, lambda n: r(n) if lo <= n <= hi + 1 else F.zeros(x.term(n).dim, xpp.term(n).dim))

    def proj_p(n):
        rows = min_rows(n)
        if rows is None:
            return F.eye(x.term(n).dim)
        comp = F.sub(F.eye(x.term(n).dim), F.matmul(r(n), ipp[n]))
        _, piv = F.rref(rows)
        return np.ascontiguousarray(comp[:, piv])

    return MinimalDecomposition(x, xp, xpp, ip, ipp, ChainMap(x, xp, proj_p), proj_pp, (lo, hi))
