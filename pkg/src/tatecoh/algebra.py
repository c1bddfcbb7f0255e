"""Finite-dimensional algebras given by structure constants.

An algebra of dimension ``n`` stores a dense tensor ``mult`` with
``b_i * b_j = sum_k mult[i, j, k] b_k``.  Presets cover the families used
throughout the package: truncated polynomial rings, group algebras, exterior
algebras and upper triangular matrix algebras.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .exactla import QQ, Field, GF, field_from_json


class AlgebraError(ValueError):
    """An algebra or Hopf datum failed validation; ``witness`` names the culprit."""

    def __init__(self, message: str, witness=None):
        super().__init__(message if witness is None else f"{message} (witness {witness})")
        self.witness = witness


@dataclass(eq=False)
class HopfDatum:
    """Comultiplication (n x n^2), counit (length n) and antipode (n x n), rows indexed by basis."""

    comul: np.ndarray
    counit: np.ndarray
    antipode: np.ndarray


@dataclass(eq=False)
class Algebra:
    field: Field
    mult: np.ndarray
    unit: np.ndarray
    radical: np.ndarray | None = None
    hopf: HopfDatum | None = None
    augmentation: np.ndarray | None = None
    labels: list[str] | None = None
    name: str = ""
    _opposite: "Algebra | None" = field(default=None, repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.mult.shape[0]

    def __repr__(self):
        return f"Algebra({self.name or 'anonymous'}, dim={self.dim}, {self.field!r})"

    # -- arithmetic --------------------------------------------------------

    def product(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Product of two coefficient vectors."""
        F = self.field
        n = self.dim
        left = F.matmul(np.asarray(x).reshape(1, n), self.mult.reshape(n, n * n)).reshape(n, n)
        return F.matmul(np.asarray(y).reshape(1, n), left).reshape(n)

    def right_regular(self) -> np.ndarray:
        """``R[i]`` is right multiplication by ``b_i`` on row vectors: ``R[i][j] = b_j b_i``."""
        if "right" not in self._cache:
            self._cache["right"] = np.ascontiguousarray(self.mult.transpose(1, 0, 2))
        return self._cache["right"]

    def left_regular(self) -> np.ndarray:
        """``L[i][j] = b_i b_j`` as a row, so ``L[i]`` is left multiplication by ``b_i``."""
        return self.mult

    def generators(self) -> list[int]:
        """Basis indices generating the algebra (with the unit), chosen greedily in ascending order."""
        if "gens" in self._cache:
            return self._cache["gens"]
        F = self.field
        gens: list[int] = []
        span = F.row_basis(self.unit.reshape(1, -1))
        for i in range(self.dim):
            e = F.zeros(1, self.dim)
            e[0, i] = 1
            if F.in_span(span, e):
                continue
            gens.append(i)
            span = self._closure(F.row_basis(np.concatenate([span, e])))
            if span.shape[0] == self.dim:
                break
        self._cache["gens"] = gens
        return gens

    def _closure(self, span: np.ndarray) -> np.ndarray:
        F = self.field
        while True:
            prods = [self.product(x, y) for x in span for y in span]
            new = F.row_basis(np.concatenate([span, np.array(prods, dtype=span.dtype).reshape(-1, self.dim)]))
            if new.shape[0] == span.shape[0]:
                return span
            span = new

    def opposite(self) -> "Algebra":
        """Opposite algebra; ``a.opposite().opposite() is a``."""
        if self._opposite is None:
            op = Algebra(
                field=self.field,
                mult=np.ascontiguousarray(self.mult.transpose(1, 0, 2)),
                unit=self.unit,
                radical=self.radical,
                hopf=self.hopf,
                augmentation=self.augmentation,
                labels=self.labels,
                name=f"{self.name}^op" if self.name else "",
            )
            op._opposite = self
            self._opposite = op
        return self._opposite

    def is_commutative(self) -> bool:
        return np.array_equal(self.mult, self.mult.transpose(1, 0, 2))

    def is_local(self) -> bool:
        return self.radical is not None and self.radical.shape[0] == self.dim - 1

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        F = self.field
        n = self.dim
        js = lambda v: [F.scalar_to_json(x) for x in v]  # noqa: E731
        out = {
            "field": F.to_json(),
            "dim": n,
            "unit": js(self.unit),
            "mult": [[i, j, js(self.mult[i, j])] for i in range(n) for j in range(n) if np.any(self.mult[i, j])],
        }
        if self.radical is not None:
            out["radical"] = [js(r) for r in self.radical]
        if self.hopf is not None:
            out["hopf"] = {
                "comul": [[i, js(self.hopf.comul[i])] for i in range(n) if np.any(self.hopf.comul[i])],
                "counit": js(self.hopf.counit),
                "antipode": [js(r) for r in self.hopf.antipode],
            }
        if self.augmentation is not None:
            out["augmentation"] = js(self.augmentation)
        if self.labels:
            out["labels"] = list(self.labels)
        if self.name:
            out["name"] = self.name
        return out


# -- construction and validation ----------------------------------------------


def make_algebra(
    field: Field,
    dim: int,
    products,
    unit,
    radical=None,
    hopf: HopfDatum | None = None,
    augmentation=None,
    labels=None,
    name: str = "",
) -> Algebra:
    """Build and validate an algebra.

    ``products`` is either a dense ``(dim, dim, dim)`` array or an iterable of
    sparse entries ``(i, j, coeffs)``; omitted products are zero.
    """
    F = field
    if isinstance(products, np.ndarray) and products.ndim == 3:
        mult = F.array(products.reshape(dim, dim * dim)).reshape(dim, dim, dim)
    else:
        mult = np.zeros((dim, dim, dim), dtype=np.int64) if F.char else np.full((dim, dim, dim), 0, dtype=object)
        for i, j, coeffs in products:
            if len(coeffs) != dim:
                raise AlgebraError("coefficient vector has wrong length", (i, j))
            mult[i, j] = F.array(np.asarray(coeffs).reshape(1, -1)).reshape(dim)
        mult = F.array(mult.reshape(dim, dim * dim)).reshape(dim, dim, dim)
    unit = F.array(np.asarray(unit).reshape(1, -1)).reshape(dim)
    rad = None if radical is None else F.array(np.asarray(radical).reshape(-1, dim))
    aug = None if augmentation is None else F.array(np.asarray(augmentation).reshape(1, -1)).reshape(dim)
    a = Algebra(F, mult, unit, rad, hopf, aug, list(labels) if labels else None, name)
    validate(a)
    return a


def validate(a: Algebra) -> None:
    """Check associativity, unit laws, radical and Hopf axioms; raise :class:`AlgebraError`."""
    F = a.field
    n = a.dim
    m = a.mult
    if n == 0:
        raise AlgebraError("the zero algebra is not supported")
    # (b_i b_j) b_k versus b_i (b_j b_k)
    left = F.matmul(m.reshape(n * n, n), m.reshape(n, n * n)).reshape(n, n, n, n)
    right = np.stack([F.matmul(m[j].reshape(n, n), m[i]) for i in range(n) for j in range(n)]).reshape(n, n, n, n)
    bad = np.argwhere(np.any(left != right, axis=3))
    if bad.size:
        raise AlgebraError("associativity fails", tuple(int(x) for x in bad[0]))
    ul = F.matmul(a.unit.reshape(1, n), m.reshape(n, n * n)).reshape(n, n)
    ur = F.matmul(a.unit.reshape(1, n), m.transpose(1, 0, 2).reshape(n, n * n)).reshape(n, n)
    eye = F.eye(n)
    for i in range(n):
        if not np.array_equal(ul[i], eye[i]) or not np.array_equal(ur[i], eye[i]):
            raise AlgebraError("unit law fails", (i,))
    if a.radical is not None:
        _check_radical(a)
    if a.augmentation is not None:
        _check_character(a, a.augmentation, "augmentation")
    if a.hopf is not None:
        check_hopf(a)


def _check_radical(a: Algebra) -> None:
    F = a.field
    n = a.dim
    rad = F.row_basis(a.radical)
    for r_idx, r in enumerate(rad):
        for i in range(n):
            e = F.zeros(1, n)[0]
            e[i] = 1
            for prod in (a.product(r, e), a.product(e, r)):
                if not F.in_span(rad, prod):
                    raise AlgebraError("radical is not a two-sided ideal", (r_idx, i))
    power = rad
    for _ in range(n + 1):
        if power.shape[0] == 0:
            return
        prods = [a.product(x, r) for x in power for r in rad]
        power = F.row_basis(np.array(prods, dtype=rad.dtype).reshape(-1, n))
    raise AlgebraError("radical is not nilpotent", (n,))


def _check_character(a: Algebra, chi: np.ndarray, what: str) -> None:
    F = a.field
    n = a.dim
    if F.scalar(np.dot(chi, a.unit)) != 1:
        raise AlgebraError(f"{what} does not send the unit to 1")
    vals = F.matmul(a.mult.reshape(n * n, n), chi.reshape(n, 1)).reshape(n, n)
    outer = F.reduce(np.outer(chi, chi))
    bad = np.argwhere(vals != outer)
    if bad.size:
        raise AlgebraError(f"{what} is not multiplicative", tuple(int(x) for x in bad[0]))


def _tensor_mult(a: Algebra) -> np.ndarray:
    """Structure constants of the algebra ``A (x) A`` on basis ``(j, k) -> j*n + k``."""
    n = a.dim
    F = a.field
    m = a.mult
    out = F.zeros(n * n, n * n * n * n) if not F.char else np.zeros((n * n, n**4), dtype=np.int64)
    out = out.reshape(n, n, n, n, n, n)
    for i, j, k, l in itertools.product(range(n), repeat=4):
        out[i, j, k, l] = F.reduce(np.outer(m[i, k], m[j, l]))
    return out.reshape(n * n, n * n, n * n)


def check_hopf(a: Algebra) -> None:
    """Verify the Hopf axioms and cocommutativity on basis elements."""
    F = a.field
    n = a.dim
    h = a.hopf
    comul = F.array(h.comul)
    counit = F.array(h.counit.reshape(1, -1)).reshape(n)
    anti = F.array(h.antipode)
    if comul.shape != (n, n * n) or anti.shape != (n, n):
        raise AlgebraError("Hopf datum has wrong shape")
    c3 = comul.reshape(n, n, n)
    for i in range(n):
        d = c3[i]  # d[j, k]: coefficient of b_j (x) b_k
        # (D (x) id) D versus (id (x) D) D, both indexed by the three tensor slots
        left = F.matmul(d.T, comul).reshape(n, n, n).transpose(1, 2, 0)
        right = F.matmul(d, comul).reshape(n, n, n)
        if not np.array_equal(left, right):
            raise AlgebraError("coassociativity fails", (i,))
        if not np.array_equal(F.matmul(counit.reshape(1, n), d).reshape(n), F.eye(n)[i]):
            raise AlgebraError("right counit law fails", (i,))
        if not np.array_equal(F.matmul(d, counit.reshape(n, 1)).reshape(n), F.eye(n)[i]):
            raise AlgebraError("left counit law fails", (i,))
        if not np.array_equal(d, d.T):
            raise AlgebraError("comultiplication is not cocommutative", (i,))
        # m (S (x) id) D = u eps
        acc = F.zeros(1, n)[0]
        for j, k in zip(*np.nonzero(d)):
            acc = F.reduce(acc + d[j, k] * a.product(anti[j], F.eye(n)[k]))
        if not np.array_equal(acc, F.reduce(counit[i] * a.unit)):
            raise AlgebraError("antipode law fails", (i,))
    _check_character(a, counit, "counit")
    tm = _tensor_mult(a)
    for i in range(n):
        for j in range(n):
            lhs = F.matmul(a.mult[i, j].reshape(1, n), comul).reshape(n * n)
            rhs = F.matmul(comul[i].reshape(1, n * n), tm.reshape(n * n, -1)).reshape(n * n, n * n)
            rhs = F.matmul(comul[j].reshape(1, n * n), rhs).reshape(n * n)
            if not np.array_equal(lhs, rhs):
                raise AlgebraError("comultiplication is not an algebra map", (i, j))


def algebra_from_json(obj: dict) -> Algebra:
    F = field_from_json(obj["field"])
    n = int(obj["dim"])
    hopf = None
    if obj.get("hopf"):
        h = obj["hopf"]
        comul = F.zeros(n, n * n)
        for i, coeffs in h["comul"]:
            comul[i] = F.array(np.asarray(coeffs, dtype=object).reshape(1, -1))[0]
        hopf = HopfDatum(comul, F.array(np.asarray(h["counit"], dtype=object).reshape(1, -1))[0],
                         F.array(np.asarray(h["antipode"], dtype=object)))
    products = [(int(i), int(j), np.asarray(c, dtype=object)) for i, j, c in obj["mult"]]
    return make_algebra(
        F, n, products, np.asarray(obj["unit"], dtype=object),
        radical=None if obj.get("radical") is None else np.asarray(obj["radical"], dtype=object),
        hopf=hopf,
        augmentation=None if obj.get("augmentation") is None else np.asarray(obj["augmentation"], dtype=object),
        labels=obj.get("labels"),
        name=obj.get("name", ""),
    )


# -- presets ------------------------------------------------------------------


def base_field(F: Field) -> Algebra:
    return make_algebra(F, 1, [(0, 0, [1])], [1], radical=np.zeros((0, 1), dtype=np.int64),
                        hopf=HopfDatum(F.array([[1]]), F.array([1]), F.array([[1]])),
                        augmentation=[1], labels=["1"], name=f"k@{F!r}")


def truncated_polynomial(F: Field, m: int = 2) -> Algebra:
    """``k[t]/(t^m)`` on the basis ``1, t, ..., t^{m-1}``."""
    prods = []
    for i in range(m):
        for j in range(m):
            if i + j < m:
                v = [0] * m
                v[i + j] = 1
                prods.append((i, j, v))
    return make_algebra(F, m, prods, [1] + [0] * (m - 1),
                        radical=np.eye(m, dtype=np.int64)[1:], augmentation=[1] + [0] * (m - 1),
                        labels=["1"] + [f"t^{i}" if i > 1 else "t" for i in range(1, m)],
                        name=f"k[t]/t^{m}@{F!r}")


def group_algebra(table, p: int | None = None, field: Field | None = None, name: str = "") -> Algebra:
    """Group algebra from a multiplication table ``table[g][h] = gh`` (identity detected).

    The radical is the augmentation ideal when the group order is a power of the characteristic.
    """
    F = field if field is not None else GF(p)
    table = [list(map(int, row)) for row in table]
    n = len(table)
    _check_group_table(table)
    e = next(g for g in range(n) if table[g] == list(range(n)))
    inv = [next(h for h in range(n) if table[g][h] == e) for g in range(n)]
    prods = []
    for g in range(n):
        for h in range(n):
            v = [0] * n
            v[table[g][h]] = 1
            prods.append((g, h, v))
    comul = F.zeros(n, n * n)
    for g in range(n):
        comul[g, g * n + g] = 1
    anti = F.zeros(n, n)
    for g in range(n):
        anti[g, inv[g]] = 1
    hopf = HopfDatum(comul, F.array(np.ones(n, dtype=np.int64)), anti)
    radical = None
    if not F.char or n % F.char:
        radical = np.zeros((0, n), dtype=np.int64)  # semisimple by Maschke
    elif _is_power_of(n, F.char):
        rows = []
        for g in range(n):
            if g != e:
                v = [0] * n
                v[g] = 1
                v[e] = -1
                rows.append(v)
        radical = np.array(rows, dtype=np.int64).reshape(-1, n)
    unit = [0] * n
    unit[e] = 1
    return make_algebra(F, n, prods, unit, radical=radical, hopf=hopf, augmentation=[1] * n,
                        labels=[f"g{g}" for g in range(n)], name=name or f"kG{n}@{F!r}")


def _is_power_of(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _check_group_table(table) -> None:
    n = len(table)
    for row in table:
        if sorted(row) != list(range(n)):
            raise AlgebraError("table is not a Latin square")
    for col in range(n):
        if sorted(table[r][col] for r in range(n)) != list(range(n)):
            raise AlgebraError("table is not a Latin square")
    ids = [g for g in range(n) if table[g] == list(range(n)) and all(table[h][g] == h for h in range(n))]
    if not ids:
        raise AlgebraError("table has no identity")
    for a, b, c in itertools.product(range(n), repeat=3):
        if table[table[a][b]][c] != table[a][table[b][c]]:
            raise AlgebraError("table is not associative", (a, b, c))


def cyclic_table(n: int):
    return [[(g + h) % n for h in range(n)] for g in range(n)]


def product_table(t1, t2):
    n1, n2 = len(t1), len(t2)
    return [[t1[a // n2][b // n2] * n2 + t2[a % n2][b % n2] for b in range(n1 * n2)] for a in range(n1 * n2)]


def cyclic_group_algebra(n: int, p: int) -> Algebra:
    return group_algebra(cyclic_table(n), p, name=f"kC{n}@GF({p})")


def klein_four_algebra(p: int = 2) -> Algebra:
    return group_algebra(product_table(cyclic_table(2), cyclic_table(2)), p, name=f"kV4@GF({p})")


def exterior_algebra(d: int, F: Field) -> Algebra:
    """Exterior algebra on ``d`` generators; basis = subsets as bitmasks in ascending order."""
    n = 2**d
    prods = []
    for s in range(n):
        for t in range(n):
            if s & t:
                continue
            # sign of reordering x_S x_T into ascending order
            inversions = sum(1 for i in range(d) if s >> i & 1 for j in range(d) if t >> j & 1 and j < i)
            v = [0] * n
            v[s | t] = -1 if inversions % 2 else 1
            prods.append((s, t, v))
    radical = np.eye(n, dtype=np.int64)[1:]
    hopf = None
    if F.char == 2:
        comul = F.zeros(n, n * n)
        for s in range(n):
            u = s
            while True:
                comul[s, u * n + (s ^ u)] = 1
                if u == 0:
                    break
                u = (u - 1) & s
        hopf = HopfDatum(comul, F.array([1] + [0] * (n - 1)), F.eye(n))
    labels = ["1" if s == 0 else "".join(f"x{i}" for i in range(d) if s >> i & 1) for s in range(n)]
    return make_algebra(F, n, prods, [1] + [0] * (n - 1), radical=radical, hopf=hopf,
                        augmentation=[1] + [0] * (n - 1), labels=labels, name=f"ext({d})@{F!r}")


def upper_triangular_algebra(n: int, F: Field) -> Algebra:
    """Upper triangular ``n x n`` matrices on the units ``e_ij`` (i <= j), row-major order."""
    units = [(i, j) for i in range(n) for j in range(i, n)]
    index = {u: k for k, u in enumerate(units)}
    dim = len(units)
    prods = []
    for (i, j), a in index.items():
        for (k, l), b in index.items():
            if j == k:
                v = [0] * dim
                v[index[(i, l)]] = 1
                prods.append((a, b, v))
    unit = [1 if i == j else 0 for i, j in units]
    radical = np.array([[1 if k == index[u] else 0 for k in range(dim)] for u in units if u[0] < u[1]],
                       dtype=np.int64).reshape(-1, dim)
    aug = [1 if u == (0, 0) else 0 for u in units]
    return make_algebra(F, dim, prods, unit, radical=radical, augmentation=aug,
                        labels=[f"e{i + 1}{j + 1}" for i, j in units], name=f"T{n}@{F!r}")


def opposite(a: Algebra) -> Algebra:
    return a.opposite()


def is_self_injective(a: Algebra) -> bool:
    from .modrep import is_injective, regular_module

    if "selfinj" not in a._cache:
        a._cache["selfinj"] = is_injective(regular_module(a))
    return a._cache["selfinj"]


def parse_field(text: str) -> Field:
    text = text.strip()
    if text in ("Q", "QQ"):
        return QQ
    if text.upper().startswith("F") or text.upper().startswith("GF"):
        return GF(int(text.upper().lstrip("GF")))
    raise ValueError(f"unknown field {text!r}")


PRESET_HELP = "k[t]/t^2, kC2, kC<n>, kV4, exterior(<d>), T<n>, field -- each followed by @F<p> or @Q"


def preset(spec: str) -> Algebra:
    """Parse names such as ``k[t]/t^2@F2``, ``kV4@F2``, ``exterior(2)@Q``, ``T3@F3``."""
    name, _, fld = spec.partition("@")
    F = parse_field(fld or "F2")
    name = name.strip().replace("²", "^2").replace("₂", "2").replace("₄", "4")
    if name in ("k[t]/t^2", "k[t]/(t^2)"):
        return truncated_polynomial(F, 2)
    if name.startswith("k[t]/t^"):
        return truncated_polynomial(F, int(name[len("k[t]/t^"):]))
    if name in ("kV4", "kC2xC2"):
        return klein_four_algebra(_char(F, name))
    if name.startswith("kC"):
        return cyclic_group_algebra(int(name[2:]), _char(F, name))
    if name.startswith("exterior(") and name.endswith(")"):
        return exterior_algebra(int(name[len("exterior("):-1]), F)
    if name.startswith("T") and name[1:].isdigit():
        return upper_triangular_algebra(int(name[1:]), F)
    if name in ("field", "k"):
        return base_field(F)
    raise ValueError(f"unknown preset {spec!r}; known: {PRESET_HELP}")


def _char(F: Field, name: str) -> int:
    if not F.char:
        raise ValueError(f"{name} presets need a prime field")
    return F.char
