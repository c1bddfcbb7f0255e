"""Exact dense linear algebra over prime fields and the rationals.

Matrices are plain numpy arrays: ``int64`` with canonical representatives in
``[0, p)`` for F_p, ``object`` arrays of :class:`fractions.Fraction` for Q.
Vectors are rows throughout the package, so a map ``v -> v @ A``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

_INT64_BOUND = 2**62


class FieldMismatchError(ValueError):
    pass


class Field:
    """Common interface of :class:`PrimeField` and :class:`RationalField`."""

    char: int
    dtype: object

    def array(self, data) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return self.array(np.zeros((rows, cols), dtype=np.int64))

    def eye(self, n: int) -> np.ndarray:
        return self.array(np.eye(n, dtype=np.int64))

    def scalar(self, x):
        raise NotImplementedError

    def inv(self, x):
        raise NotImplementedError

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def kron(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(np.kron(a, b))

    def scale(self, a: np.ndarray, c) -> np.ndarray:
        return self.reduce(a * c)

    def add(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a + b)

    def sub(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self.reduce(a - b)

    def neg(self, a: np.ndarray) -> np.ndarray:
        return self.reduce(-a)

    def random(self, rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
        raise NotImplementedError

    # -- elimination -------------------------------------------------------

    def rref(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """Reduced row echelon form with first-nonzero pivoting."""
        a = self.array(a).copy()
        rows, cols = a.shape
        pivots: list[int] = []
        r = 0
        for c in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, c])[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                a[[r, i]] = a[[i, r]]
            lead = a[r, c]
            if lead != 1:
                a[r, c:] = self.scale(a[r, c:], self.inv(lead))
            col = a[:, c].copy()
            col[r] = 0
            hit = np.nonzero(col)[0]
            if hit.size:
                self._eliminate(a, hit, col[hit], r, c)
            pivots.append(c)
            r += 1
        return a, pivots

    def _eliminate(self, a, hit, factors, r, c):
        a[hit, c:] = self.reduce(a[hit, c:] - np.outer(factors, a[r, c:]))

    def rank(self, a: np.ndarray) -> int:
        a = np.asarray(a)
        if a.size == 0:
            return 0
        return len(self.rref(a)[1])

    def row_basis(self, a: np.ndarray) -> np.ndarray:
        """RREF basis (rows) of the row space of ``a``."""
        a = np.asarray(a)
        if a.ndim == 1:
            a = a.reshape(1, -1)
        if a.shape[0] == 0:
            return self.zeros(0, a.shape[1])
        r, piv = self.rref(a)
        return r[: len(piv)]

    def right_kernel(self, a: np.ndarray) -> np.ndarray:
        """Columns spanning ``{x : a @ x = 0}``."""
        a = np.asarray(a)
        rows, cols = a.shape
        if rows == 0:
            return self.eye(cols)
        r, piv = self.rref(a)
        pset = set(piv)
        free = [j for j in range(cols) if j not in pset]
        k = self.zeros(cols, len(free))
        for t, j in enumerate(free):
            k[j, t] = 1
            for i, pc in enumerate(piv):
                k[pc, t] = -r[i, j]
        return self.reduce(k)

    def left_kernel(self, a: np.ndarray) -> np.ndarray:
        """Rows spanning ``{v : v @ a = 0}``."""
        a = np.asarray(a)
        return self.right_kernel(a.T).T

    def solve(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """One solution of ``a @ x = b``, or ``None`` when inconsistent."""
        a = np.asarray(a)
        b = np.asarray(b)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if a.shape[0] != b.shape[0]:
            raise ValueError(f"row mismatch: {a.shape} vs {b.shape}")
        cols = a.shape[1]
        if a.shape[0] == 0:
            return self.zeros(cols, b.shape[1])
        aug = np.concatenate([self.array(a), self.array(b)], axis=1)
        r, piv = self.rref(aug)
        if piv and piv[-1] >= cols:
            return None
        x = self.zeros(cols, b.shape[1])
        for i, pc in enumerate(piv):
            x[pc] = r[i, cols:]
        return x

    def solve_left(self, a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
        """One solution of ``x @ a = b``, or ``None``."""
        x = self.solve(np.asarray(a).T, np.asarray(b).T)
        return None if x is None else x.T

    def coordinates(self, basis: np.ndarray, pivots: list[int], v: np.ndarray) -> np.ndarray:
        """Coordinates of rows ``v`` in an RREF ``basis`` with given pivots.

        Only meaningful for vectors in the row space; see :meth:`in_span`.
        """
        v = np.asarray(v)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        return v[:, pivots]

    def in_span(self, basis: np.ndarray, v: np.ndarray) -> bool:
        v = np.asarray(v)
        if v.ndim == 1:
            v = v.reshape(1, -1)
        if basis.shape[0] == 0:
            return not np.any(v)
        return self.rank(np.concatenate([basis, v])) == self.rank(basis)

    def inverse(self, a: np.ndarray) -> np.ndarray:
        n = a.shape[0]
        x = self.solve(a, self.eye(n))
        if x is None or a.shape[1] != n:
            raise ValueError("matrix is not invertible")
        return x

    # -- serialization -------------------------------------------------------

    def to_json(self):
        raise NotImplementedError

    def scalar_to_json(self, x):
        raise NotImplementedError


class PrimeField(Field):
    dtype = np.int64

    def __init__(self, p: int):
        if p < 2 or p >= 2**31 or any(p % q == 0 for q in range(2, math.isqrt(p) + 1)):
            raise ValueError(f"{p} is not a prime below 2^31")
        self.p = p
        self.char = p

    def __repr__(self):
        return f"GF({self.p})"

    def __reduce__(self):
        return (GF, (self.p,))

    def array(self, data) -> np.ndarray:
        a = np.asarray(data)
        if a.dtype == object:
            a = np.vectorize(lambda x: _mod_scalar(x, self.p), otypes=[np.int64])(a) if a.size else a.astype(np.int64)
        return np.mod(a.astype(np.int64, copy=False), self.p)

    def scalar(self, x):
        return _mod_scalar(x, self.p)

    def inv(self, x):
        return pow(int(x), -1, self.p)

    def reduce(self, a):
        return np.mod(a, self.p)

    def matmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        inner = a.shape[-1]
        if inner == 0:
            shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + a.shape[-2:-1] + b.shape[-1:]
            return np.zeros(shape, dtype=np.int64)
        if self.p == 2 and _gf2_tables_pay_off(a, b):
            return _gf2_matmul(a, b)
        if (self.p - 1) ** 2 * inner < _INT64_BOUND:
            return (a @ b) % self.p
        out = (a.astype(object) @ b.astype(object)) % self.p
        return out.astype(np.int64)

    def kron(self, a, b):
        return np.kron(a, b) % self.p

    def scale(self, a, c):
        return (a * int(c)) % self.p

    def _eliminate(self, a, hit, factors, r, c):
        if self.p == 2:
            a[hit, c:] ^= a[r, c:]
        else:
            a[hit, c:] = (a[hit, c:] - np.outer(factors, a[r, c:])) % self.p

    def random(self, rng, rows, cols):
        return rng.integers(0, self.p, size=(rows, cols), dtype=np.int64)

    def to_json(self):
        return {"p": self.p}

    def scalar_to_json(self, x):
        return int(x)


class RationalField(Field):
    dtype = object
    char = 0

    def __repr__(self):
        return "QQ"

    def __reduce__(self):
        return (_qq, ())

    def array(self, data) -> np.ndarray:
        a = np.asarray(data, dtype=object)
        if a.size == 0:
            return a.astype(object)
        return np.vectorize(_to_fraction, otypes=[object])(a)

    def zeros(self, rows, cols):
        a = np.empty((rows, cols), dtype=object)
        a.fill(Fraction(0))
        return a

    def scalar(self, x):
        return _to_fraction(x)

    def inv(self, x):
        return 1 / Fraction(x)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        if a.shape[-1] == 0:
            shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2]) + (a.shape[-2], b.shape[-1])
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        if a.size == 0 or b.size == 0:
            return a @ b
        ia, da = _clear_denominators(a)
        ib, db = _clear_denominators(b)
        prod = _int_matmul(ia, ib, a.shape[-1])
        return _to_fractions(prod) if da * db == 1 else _divide(prod, da * db)

    def kron(self, a, b):
        return np.kron(np.asarray(a, dtype=object), np.asarray(b, dtype=object))

    def rref(self, a):
        a = np.asarray(a, dtype=object)
        if a.ndim != 2 or a.size < _MODULAR_RREF_SIZE:
            return super().rref(a)
        ints = _integer_rows(a)
        found = _modular_rref(ints)
        if found is None:
            return super().rref(a)
        r, piv = found
        out = self.zeros(*a.shape)
        out[: len(piv)] = r
        return out, piv

    def rref_integer(self, a: np.ndarray) -> tuple[np.ndarray, list[int]]:
        """RREF of an integer matrix, skipping the conversion to fractions."""
        a = np.asarray(a)
        found = _modular_rref(a.astype(object)) if a.size >= _MODULAR_RREF_SIZE else None
        if found is None:
            return self.rref(_to_fractions(a.astype(object)))
        r, piv = found
        out = self.zeros(*a.shape)
        out[: len(piv)] = r
        return out, piv

    def random(self, rng, rows, cols):
        return self.array(rng.integers(-2, 3, size=(rows, cols)))

    def to_json(self):
        return "Q"

    def scalar_to_json(self, x):
        x = Fraction(x)
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# byte value -> its 8 bits, most significant first (np.packbits order)
_BYTE_BITS = ((np.arange(256)[:, None] >> (7 - np.arange(8))) & 1).astype(bool)


def _gf2_tables_pay_off(a: np.ndarray, b: np.ndarray) -> bool:
    # building tables costs about 32 k n byte operations, a plain product m k n
    if b.ndim == 2:
        rows, cols = a.size // a.shape[-1], b.shape[-1]
    elif a.ndim == 2:
        rows, cols = a.shape[0], b.size // b.shape[-2]
    else:
        return False
    return rows >= 64 and a.shape[-1] * cols >= 256


def _gf2_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product over GF(2) by byte tables (method of four Russians).

    Handles a stack times a matrix and a matrix times a stack.
    """
    k = a.shape[-1]
    if b.ndim == 2:
        return _gf2_matmul_2d(a.reshape(-1, k), b).reshape(a.shape[:-1] + (b.shape[1],))
    # matrix times stack: fold the stack into columns
    lead, n = b.shape[:-2], b.shape[-1]
    cols = np.moveaxis(b.reshape(-1, k, n), 0, 1).reshape(k, -1)
    out = _gf2_matmul_2d(a, cols).reshape(a.shape[0], -1, n)
    return np.moveaxis(out, 1, 0).reshape(lead + (a.shape[0], n))


def _gf2_matmul_2d(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    m, k = a.shape
    n = b.shape[1]
    kb = (k + 7) // 8
    bp = np.packbits(b.astype(np.uint8), axis=1)
    nb = bp.shape[1]
    if k % 8:
        bp = np.concatenate([bp, np.zeros((8 * kb - k, nb), np.uint8)])
    rows = bp.reshape(kb, 8, nb)
    # table[j, v] = XOR of the rows 8j + i of b for the set bits i of v
    table = np.bitwise_xor.reduce(np.where(_BYTE_BITS[None, :, :, None], rows[:, None, :, :], 0), axis=2).astype(np.uint8)
    ap = np.packbits(a.astype(np.uint8), axis=1)
    out = np.zeros((m, nb), np.uint8)
    for j in range(kb):
        out ^= table[j][ap[:, j]]
    return np.unpackbits(out, axis=1, count=n).astype(np.int64)


# Python and numpy integers expose numerator and denominator as well
_denominator = np.frompyfunc(lambda x: x.denominator, 1, 1)
_numerator = np.frompyfunc(lambda x: x.numerator, 1, 1)
_scaled_numerator = np.frompyfunc(lambda x, d: x.numerator * (d // x.denominator), 2, 1)
_fraction = np.frompyfunc(Fraction, 1, 1)
_fraction_over = np.frompyfunc(Fraction, 2, 1)


def _clear_denominators(a: np.ndarray) -> tuple[np.ndarray, int]:
    """Integer array ``A`` and ``D`` with ``a = A / D``."""
    d = math.lcm(*set(_denominator(a).flat))
    return (_numerator(a) if d == 1 else _scaled_numerator(a, d)), d


def _small_ints(a: np.ndarray) -> np.ndarray | None:
    """``a`` as int64 when every entry is below ``2**62`` in size, else ``None``."""
    try:
        out = a.astype(np.int64)
    except OverflowError:
        return None
    return out if out.size == 0 or int(np.abs(out).max()) < _INT64_BOUND else None


def _int_matmul(a: np.ndarray, b: np.ndarray, inner: int) -> np.ndarray:
    # machine integers whenever the bound rules out overflow, Python ints otherwise
    sa, sb = _small_ints(a), _small_ints(b)
    if sa is not None and sb is not None:
        ma = int(np.abs(sa).max()) if sa.size else 0
        mb = int(np.abs(sb).max()) if sb.size else 0
        if ma * mb * inner < _INT64_BOUND:
            return (sa @ sb).astype(object)
    return a @ b


def _divide(a: np.ndarray, d: int) -> np.ndarray:
    if not isinstance(a, np.ndarray):
        return Fraction(a, d)
    return _fraction_over(a, d).astype(object)


def _to_fractions(a) -> np.ndarray:
    if not isinstance(a, np.ndarray):
        return Fraction(a)
    return _fraction(a).astype(object) if a.size else a


# below this many entries plain elimination over fractions is cheap enough
_MODULAR_RREF_SIZE = 400
_MODULAR_PRIMES_MAX = 12


@lru_cache(maxsize=None)
def _modular_prime(i: int) -> int:
    """The ``i``-th prime below ``2**31``, counting down."""
    n = (2**31 - 1) if i == 0 else _modular_prime(i - 1) - 2
    while any(n % q == 0 for q in range(3, math.isqrt(n) + 1, 2)):
        n -= 2
    return n


def _integer_rows(a: np.ndarray) -> np.ndarray:
    """Scale each row of a rational matrix to integers (row space unchanged)."""
    out = np.empty(a.shape, dtype=object)
    for i, row in enumerate(a):
        out[i] = _clear_denominators(row)[0]
    return out


def _reconstruct(u: int, m: int) -> Fraction | None:
    """The fraction ``n/d`` with ``n = u d mod m`` and ``|n|, d < sqrt(m/2)``, if any."""
    bound = math.isqrt(m // 2)
    r0, r1, t0, t1 = m, u % m, 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1, t0, t1 = r1, r0 - q * r1, t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound:
        return None
    return Fraction(r1, t1)


def _modular_rref(ints: np.ndarray) -> tuple[np.ndarray, list[int]] | None:
    """RREF over Q of an integer matrix by reduction modulo large primes.

    The rank mod p never exceeds the rank over Q, so a reconstructed ``R``
    with ``A = A[:, P] R`` is certified: its rows span the row space of ``A``.
    Returns the nonzero rows and pivots, or ``None`` when no candidate verifies.
    """
    residues, modulus, pivots = None, 1, None
    for i in range(_MODULAR_PRIMES_MAX):
        p = _modular_prime(i)
        red, piv = GF(p).rref(np.mod(ints, p).astype(np.int64))
        if pivots is None or len(piv) > len(pivots) or (len(piv) == len(pivots) and piv < pivots):
            # a larger rank, or an earlier pivot at equal rank, means the previous primes were unlucky
            residues, modulus, pivots = red[: len(piv)].astype(object), p, piv
        elif piv == pivots:
            # Chinese remainder: x = r mod M, x = s mod p
            step = (red[: len(piv)].astype(object) - residues) * pow(modulus, -1, p) % p
            residues, modulus = residues + modulus * step, modulus * p
        else:
            continue
        if not pivots:
            return np.zeros((0, ints.shape[1]), dtype=object), []
        cand = _reconstruct_array(residues, modulus)
        if cand is not None and _certify(ints, cand, pivots):
            return cand, pivots
    return None


def _reconstruct_array(residues: np.ndarray, modulus: int) -> np.ndarray | None:
    out = np.empty(residues.shape, dtype=object)
    half = modulus // 2
    for idx, u in np.ndenumerate(residues):
        u = int(u)
        if u == 0:
            out[idx] = _ZERO
        elif u <= half and u * u < half:
            out[idx] = Fraction(u)
        elif modulus - u <= half and (modulus - u) ** 2 < half:
            out[idx] = Fraction(u - modulus)
        else:
            f = _reconstruct(u, modulus)
            if f is None:
                return None
            out[idx] = f
    return out


def _certify(ints: np.ndarray, cand: np.ndarray, pivots: list[int]) -> bool:
    r, d = _clear_denominators(cand)
    lhs = _int_matmul(np.ascontiguousarray(ints[:, pivots]), r, len(pivots))
    rhs = ints * d
    small_l, small_r = _small_ints(lhs), _small_ints(rhs)
    if small_l is not None and small_r is not None:
        return bool(np.array_equal(small_l, small_r))
    return bool(np.all(lhs == rhs))


_ZERO = Fraction(0)


def _mod_scalar(x, p):
    if isinstance(x, Fraction) or isinstance(x, str):
        x = Fraction(x)
        return x.numerator * pow(x.denominator, -1, p) % p
    return int(x) % p


def _to_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (np.integer,)):
        return Fraction(int(x))
    return Fraction(x)


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


QQ = RationalField()


def _qq():
    return QQ


def field_from_json(obj) -> Field:
    if obj == "Q" or obj == "QQ":
        return QQ
    if isinstance(obj, dict) and "p" in obj:
        return GF(int(obj["p"]))
    raise ValueError(f"unrecognised field description {obj!r}")


def same_field(a: Field, b: Field) -> bool:
    return a is b or (a.char == b.char and a.char != 0) or (a.char == 0 and b.char == 0)


# -- the Matrix value type -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class Matrix:
    """An immutable matrix tagged with its field."""

    field: Field
    data: np.ndarray

    def __post_init__(self):
        a = self.field.array(self.data)
        if a.ndim != 2:
            a = a.reshape(len(a), -1) if a.size else a.reshape(0, 0)
        a.setflags(write=False)
        object.__setattr__(self, "data", a)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and same_field(self.field, other.field)
            and self.data.shape == other.data.shape
            and np.array_equal(self.data, other.data)
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        _check_fields(self, other)
        return Matrix(self.field, self.field.matmul(self.data, other.data))

    def tolist(self):
        return [[self.field.scalar_to_json(x) for x in row] for row in self.data]

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls(field, field.eye(n))

    @classmethod
    def zero(cls, field: Field, rows: int, cols: int) -> "Matrix":
        return cls(field, field.zeros(rows, cols))


def _check_fields(*ms: Matrix):
    f = ms[0].field
    for m in ms[1:]:
        if not same_field(f, m.field):
            raise FieldMismatchError(f"{f!r} vs {m.field!r}")


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    r, piv = m.field.rref(m.data) if m.data.size else (m.data, [])
    return Matrix(m.field, r), piv


def rank(m: Matrix) -> int:
    return m.field.rank(m.data)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns form a basis of the right null space."""
    return Matrix(m.field, m.field.right_kernel(m.data))


def solve(m: Matrix, b: Matrix) -> Matrix | None:
    _check_fields(m, b)
    if b.rows != m.rows:
        raise ValueError(f"dimension mismatch: {m.rows} rows vs {b.rows}")
    x = m.field.solve(m.data, b.data)
    if x is None:
        return None
    assert np.array_equal(m.field.matmul(m.data, x), m.field.array(b.data))
    return Matrix(m.field, x)
