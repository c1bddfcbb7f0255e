"""Right modules as matrix representations, and the module-theoretic toolkit.

A module of dimension ``d`` over an algebra of dimension ``n`` is an array
``action`` of shape ``(n, d, d)``; the basis element ``b_i`` acts on row
vectors by ``m . b_i = m @ action[i]``.  A homomorphism ``M -> N`` is a
``dim M x dim N`` matrix, again acting on rows.

Envelopes, covers and stable Hom never use idempotents: everything goes
through coinduced modules, socles and linear solves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import Algebra
from .exactla import Field, _clear_denominators


class ModuleError(ValueError):
    pass


@dataclass(eq=False)
class Module:
    algebra: Algebra
    action: np.ndarray
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.action.shape[1]

    @property
    def field(self) -> Field:
        return self.algebra.field

    def __repr__(self):
        return f"Module({self.name or '?'}, dim={self.dim}, over {self.algebra.name or 'algebra'})"

    def act(self, coeffs) -> np.ndarray:
        """Matrix of the algebra element with the given coefficient vector."""
        F = self.field
        n = self.algebra.dim
        d = self.dim
        return F.matmul(np.asarray(coeffs).reshape(1, n), self.action.reshape(n, d * d)).reshape(d, d)

    def generator_actions(self) -> list[np.ndarray]:
        if "gen" not in self._cache:
            self._cache["gen"] = [self.action[i] for i in self.algebra.generators()]
        return self._cache["gen"]

    def radical_actions(self) -> list[np.ndarray]:
        rad = self.algebra.radical
        if rad is None:
            raise ModuleError(f"{self.algebra!r} has no radical basis")
        if "rad" not in self._cache:
            self._cache["rad"] = [self.act(r) for r in rad]
        return self._cache["rad"]

    def identity(self) -> "ModuleHom":
        return ModuleHom(self, self, self.field.eye(self.dim))

    def check(self) -> None:
        """Verify unit and multiplicativity of the action."""
        F = self.field
        a = self.algebra
        n = a.dim
        d = self.dim
        if self.action.shape != (n, d, d):
            raise ModuleError(f"action has shape {self.action.shape}, expected {(n, d, d)}")
        if not np.array_equal(self.act(a.unit), F.eye(d)):
            raise ModuleError("unit does not act as the identity")
        flat = self.action.reshape(n, d * d)
        for i in range(n):
            for j in range(n):
                lhs = F.matmul(self.action[i], self.action[j])
                rhs = F.matmul(a.mult[i, j].reshape(1, n), flat).reshape(d, d)
                if not np.array_equal(lhs, rhs):
                    raise ModuleError(f"action is not multiplicative at {(i, j)}")

    def to_json(self) -> dict:
        F = self.field
        return {
            "dim": self.dim,
            "action": [[[F.scalar_to_json(x) for x in row] for row in mat] for mat in self.action],
        }


@dataclass(eq=False)
class ModuleHom:
    source: Module
    target: Module
    matrix: np.ndarray

    def __post_init__(self):
        if self.matrix.shape != (self.source.dim, self.target.dim):
            raise ModuleError(f"hom matrix {self.matrix.shape} does not fit {self.source.dim}x{self.target.dim}")

    def __repr__(self):
        return f"ModuleHom({self.source.dim}->{self.target.dim}, rank={self.rank()})"

    @property
    def field(self) -> Field:
        return self.source.field

    def rank(self) -> int:
        return self.field.rank(self.matrix)

    def is_zero(self) -> bool:
        return not np.any(self.matrix)

    def is_injective(self) -> bool:
        return self.rank() == self.source.dim

    def is_surjective(self) -> bool:
        return self.rank() == self.target.dim

    def then(self, g: "ModuleHom") -> "ModuleHom":
        """The composite ``g o self``."""
        return ModuleHom(self.source, g.target, self.field.matmul(self.matrix, g.matrix))

    def __add__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.field.add(self.matrix, other.matrix))

    def __sub__(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.field.sub(self.matrix, other.matrix))

    def __neg__(self) -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.field.neg(self.matrix))

    def scaled(self, c) -> "ModuleHom":
        return ModuleHom(self.source, self.target, self.field.scale(self.matrix, c))

    def is_homomorphism(self) -> bool:
        F = self.field
        for rs, rt in zip(self.source.action, self.target.action):
            if not np.array_equal(F.matmul(rs, self.matrix), F.matmul(self.matrix, rt)):
                return False
        return True


def compose(g: ModuleHom, f: ModuleHom) -> ModuleHom:
    """``g o f``."""
    return f.then(g)


@dataclass(eq=False)
class ShortExactSequence:
    inj: ModuleHom
    surj: ModuleHom

    @property
    def left(self) -> Module:
        return self.inj.source

    @property
    def middle(self) -> Module:
        return self.inj.target

    @property
    def right(self) -> Module:
        return self.surj.target

    def check(self) -> None:
        F = self.inj.field
        if self.inj.target is not self.surj.source:
            raise ModuleError("sequence maps do not compose")
        if not self.inj.is_injective() or not self.surj.is_surjective():
            raise ModuleError("sequence is not exact at the ends")
        if np.any(F.matmul(self.inj.matrix, self.surj.matrix)):
            raise ModuleError("composite of the sequence maps is nonzero")
        if self.inj.rank() + self.surj.rank() != self.middle.dim:
            raise ModuleError("sequence is not exact in the middle")


# -- constructors ---------------------------------------------------------------


def make_module(algebra: Algebra, action, name: str = "", check: bool = True) -> Module:
    F = algebra.field
    action = np.asarray(action)
    n = algebra.dim
    if action.size == 0:
        d = action.shape[-1] if action.ndim == 3 else 0
        action = F.zeros(n * d, d).reshape(n, d, d)
    else:
        d = action.shape[-1]
        action = F.array(action.reshape(n * d, d)).reshape(n, d, d)
    m = Module(algebra, action, name)
    if check:
        m.check()
    return m


def zero_module(algebra: Algebra) -> Module:
    if "zero" not in algebra._cache:
        algebra._cache["zero"] = Module(algebra, np.zeros((algebra.dim, 0, 0), dtype=algebra.field.dtype), "0")
    return algebra._cache["zero"]


def regular_module(algebra: Algebra) -> Module:
    if "regular" not in algebra._cache:
        algebra._cache["regular"] = Module(algebra, algebra.right_regular(), "Lambda")
    return algebra._cache["regular"]


def trivial_module(algebra: Algebra) -> Module:
    """The one-dimensional module ``k`` through the augmentation."""
    if algebra.augmentation is None:
        raise ModuleError(f"{algebra!r} has no augmentation")
    if "trivial" not in algebra._cache:
        algebra._cache["trivial"] = Module(algebra, algebra.augmentation.reshape(-1, 1, 1).copy(), "k")
    return algebra._cache["trivial"]


def cogenerator(algebra: Algebra) -> Module:
    """``E = Hom_k(Lambda, k)``, the dual of the regular module of the opposite algebra."""
    return dual(regular_module(algebra.opposite()))


def free_module(algebra: Algebra, rank: int) -> Module:
    return direct_sum(*[regular_module(algebra)] * rank)[0] if rank else zero_module(algebra)


def direct_sum(*mods: Module) -> tuple[Module, list[ModuleHom], list[ModuleHom]]:
    """Direct sum with its canonical inclusions and projections."""
    if not mods:
        raise ModuleError("empty direct sum")
    a = mods[0].algebra
    F = a.field
    dims = [m.dim for m in mods]
    d = sum(dims)
    action = F.zeros(a.dim * d, d).reshape(a.dim, d, d)
    off = 0
    for m in mods:
        action[:, off:off + m.dim, off:off + m.dim] = m.action
        off += m.dim
    s = Module(a, action, "+".join(m.name or "?" for m in mods))
    incl, proj = [], []
    off = 0
    eye = F.eye(d)
    for m in mods:
        incl.append(ModuleHom(m, s, eye[off:off + m.dim].copy()))
        proj.append(ModuleHom(s, m, eye[:, off:off + m.dim].copy()))
        off += m.dim
    return s, incl, proj


def hom_sum(maps: list[list[ModuleHom]], source: Module, target: Module) -> ModuleHom:
    """Block matrix ``maps[i][j]: source_i -> target_j`` assembled into ``source -> target``."""
    F = source.field
    mat = F.zeros(source.dim, target.dim)
    r = 0
    for row in maps:
        c = 0
        for h in row:
            mat[r:r + h.matrix.shape[0], c:c + h.matrix.shape[1]] = h.matrix
            c += h.matrix.shape[1]
        r += row[0].matrix.shape[0] if row else 0
    return ModuleHom(source, target, mat)


def generated_submodule(m: Module, vectors: np.ndarray) -> np.ndarray:
    """RREF row basis of the submodule generated by the given row vectors."""
    F = m.field
    span = F.row_basis(np.asarray(vectors).reshape(-1, m.dim))
    gens = m.generator_actions()
    while True:
        images = [span] + [F.matmul(span, g) for g in gens]
        new = F.row_basis(np.concatenate(images))
        if new.shape[0] == span.shape[0]:
            return span
        span = new


def submodule(m: Module, rows: np.ndarray, check: bool = False) -> tuple[Module, ModuleHom]:
    """Submodule spanned by ``rows`` (assumed invariant) and its inclusion."""
    F = m.field
    basis, piv = _basis_pivots(F, rows, m.dim)
    n = m.algebra.dim
    k = basis.shape[0]
    if k == 0:
        z = zero_module(m.algebra)
        return z, ModuleHom(z, m, F.zeros(0, m.dim))
    images = F.matmul(basis, m.action)  # (n, k, d)
    action = np.ascontiguousarray(images[:, :, piv])
    if check:
        for i in range(n):
            if not np.array_equal(F.matmul(action[i], basis), images[i]):
                raise ModuleError("rows do not span a submodule")
    sub = Module(m.algebra, action)
    return sub, ModuleHom(sub, m, basis)


def submodule_on_basis(m: Module, rows: np.ndarray) -> tuple[Module, ModuleHom]:
    """Submodule with the given (independent, invariant) rows as its basis."""
    F = m.field
    rows = np.asarray(rows)
    if rows.shape[0] == 0:
        z = zero_module(m.algebra)
        return z, ModuleHom(z, m, F.zeros(0, m.dim))
    images = F.matmul(rows, m.action)
    n, k = m.algebra.dim, rows.shape[0]
    x = F.solve_left(rows, images.reshape(n * k, m.dim))
    if x is None:
        raise ModuleError("rows do not span a submodule")
    sub = Module(m.algebra, np.ascontiguousarray(x.reshape(n, k, k)))
    return sub, ModuleHom(sub, m, rows.copy())


def quotient(m: Module, rows: np.ndarray) -> tuple[Module, ModuleHom]:
    """Quotient by the submodule spanned by ``rows`` and the projection."""
    F = m.field
    basis, piv = _basis_pivots(F, rows, m.dim)
    d = m.dim
    pset = set(piv)
    free = [j for j in range(d) if j not in pset]
    # v -> v - v[piv] @ basis kills pivot columns; keep the free ones
    red = F.eye(d)
    if piv:
        red = F.sub(red, F.matmul(F.eye(d)[:, piv], basis))
    proj = np.ascontiguousarray(red[:, free])
    comp = F.eye(d)[free]
    action = F.matmul(F.matmul(comp, m.action), proj) if free else F.zeros(0, 0)
    q = Module(m.algebra, np.asarray(action).reshape(m.algebra.dim, len(free), len(free)))
    return q, ModuleHom(m, q, proj)


def quotient_section(m: Module, rows: np.ndarray) -> np.ndarray:
    """k-linear section of :func:`quotient`'s projection (rows are lifts of the quotient basis)."""
    F = m.field
    _, piv = _basis_pivots(F, rows, m.dim)
    pset = set(piv)
    return F.eye(m.dim)[[j for j in range(m.dim) if j not in pset]]


def _basis_pivots(F: Field, rows, d: int):
    rows = np.asarray(rows)
    if rows.size == 0:
        return F.zeros(0, d), []
    r, piv = F.rref(rows.reshape(-1, d))
    return r[: len(piv)], piv


def kernel(f: ModuleHom) -> tuple[Module, ModuleHom]:
    F = f.field
    return submodule(f.source, F.row_basis(F.left_kernel(f.matrix)) if f.source.dim else F.zeros(0, 0))


def image(f: ModuleHom) -> tuple[Module, ModuleHom]:
    return submodule(f.target, f.field.row_basis(f.matrix) if f.source.dim else f.field.zeros(0, f.target.dim))


def image_rows(f: ModuleHom) -> np.ndarray:
    return f.field.row_basis(f.matrix) if f.source.dim else f.field.zeros(0, f.target.dim)


def cokernel(f: ModuleHom) -> tuple[Module, ModuleHom]:
    return quotient(f.target, image_rows(f))


def isomorphism_restriction(f: ModuleHom) -> tuple[Module, ModuleHom]:
    """Corestrict an injective ``f`` to its image; returns (image, iso source -> image)."""
    img, incl = image(f)
    F = f.field
    _, piv = F.rref(incl.matrix) if img.dim else (None, [])
    return img, ModuleHom(f.source, img, np.ascontiguousarray(f.matrix[:, piv]))


# -- Hom spaces -----------------------------------------------------------------


@dataclass(eq=False)
class HomSpace:
    """Basis of ``Hom(source, target)`` as RREF rows of flattened matrices."""

    source: Module
    target: Module
    basis: np.ndarray
    pivots: list[int]

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def matrices(self) -> np.ndarray:
        return self.basis.reshape(self.dim, self.source.dim, self.target.dim)

    def homs(self) -> list[ModuleHom]:
        return [ModuleHom(self.source, self.target, m) for m in self.matrices()]

    def coords(self, mats: np.ndarray) -> np.ndarray:
        """Coordinates of homomorphism matrices (stacked or single)."""
        mats = np.asarray(mats).reshape(-1, self.source.dim * self.target.dim)
        return mats[:, self.pivots]

    def combine(self, coeffs: np.ndarray) -> ModuleHom:
        F = self.source.field
        flat = F.matmul(np.asarray(coeffs).reshape(1, -1), self.basis) if self.dim else F.zeros(1, self.source.dim * self.target.dim)
        return ModuleHom(self.source, self.target, flat.reshape(self.source.dim, self.target.dim))


def hom_basis(m: Module, n: Module) -> HomSpace:
    """Intertwiner space ``{X : rho_m(g) X = X rho_n(g)}`` over algebra generators ``g``."""
    if m.algebra is not n.algebra:
        raise ModuleError("modules live over different algebras")
    cache = m._cache.setdefault("hom", {})
    hit = cache.get(id(n))
    if hit is not None and hit[0] is n:
        return hit[1]
    F = m.field
    dm, dn = m.dim, n.dim
    size = dm * dn
    if size == 0:
        hs = HomSpace(m, n, F.zeros(0, size), [])
    elif size > GENERATOR_HOM_THRESHOLD and m.algebra.radical is not None:
        hs = hom_basis_by_generators(m, n)
    else:
        hs = hom_basis_by_intertwining(m, n)
    cache[id(n)] = (n, hs)
    return hs


# above this many matrix entries, solve for images of generators instead
GENERATOR_HOM_THRESHOLD = 256


def hom_basis_by_intertwining(m: Module, n: Module) -> HomSpace:
    """Solve ``rho_m(g) X = X rho_n(g)`` for all ``dim m * dim n`` entries of ``X``."""
    F = m.field
    dm, dn = m.dim, n.dim
    size = dm * dn
    if size == 0:
        return HomSpace(m, n, F.zeros(0, size), [])
    if F.char == 0:
        return _hom_basis_rational(m, n)
    basis = F.eye(size)  # columns: current solution space
    for gm, gn in zip(m.generator_actions(), n.generator_actions()):
        if basis.shape[1] == 0:
            break
        xs = basis.T.reshape(-1, dm, dn)
        sub = F.sub(F.matmul(gm, xs), F.matmul(xs, gn)).reshape(-1, size).T
        basis = F.matmul(basis, F.right_kernel(sub))
    rows = basis.T
    if not rows.shape[0]:
        return HomSpace(m, n, F.zeros(0, size), [])
    r, piv = F.rref(rows)
    return HomSpace(m, n, r[: len(piv)], piv)


def _hom_basis_rational(m: Module, n: Module) -> HomSpace:
    """All generator equations at once as one integer system in ``vec(X)``.

    Row-major ``vec``: ``rho_m(g) X`` has matrix ``rho_m(g) (x) I`` and
    ``X rho_n(g)`` has ``I (x) rho_n(g)^T``; each generator pair is scaled by a
    common denominator so the system is integral.
    """
    F = m.field
    dm, dn = m.dim, n.dim
    blocks = []
    for gm, gn in zip(m.generator_actions(), n.generator_actions()):
        both, _ = _clear_denominators(np.concatenate([np.asarray(gm, dtype=object).ravel(),
                                                      np.asarray(gn, dtype=object).ravel()]))
        im, jn = both[: dm * dm].reshape(dm, dm), both[dm * dm:].reshape(dn, dn)
        blocks.append(np.kron(im, np.eye(dn, dtype=np.int64)) - np.kron(np.eye(dm, dtype=np.int64), jn.T))
    size = dm * dn
    r, piv = F.rref_integer(np.concatenate(blocks) if blocks else np.zeros((0, size), dtype=object))
    pset = set(piv)
    free = [j for j in range(size) if j not in pset]
    if not free:
        return HomSpace(m, n, F.zeros(0, size), [])
    rows = F.zeros(len(free), size)
    for t, j in enumerate(free):
        rows[t, j] = Fraction(1)
        for i, pc in enumerate(piv):
            rows[t, pc] = -r[i, j]
    r2, piv2 = F.rref(rows)
    return HomSpace(m, n, r2[: len(piv2)], piv2)


def top_generators(m: Module) -> list[int]:
    """Standard basis indices whose images span ``M / MJ``.

    The non-pivot columns of an RREF basis of ``MJ`` index a complement.
    """
    F = m.field
    span = radical_rows(m)
    piv = set(F.rref(span)[1]) if span.shape[0] else set()
    return [i for i in range(m.dim) if i not in piv]


def hom_basis_by_generators(m: Module, n: Module) -> HomSpace:
    """Homomorphisms as images ``n_i`` of top generators ``g_i`` killing the relation module.

    With ``pi: Lambda^r -> M``, ``e_i b -> g_i b``, a tuple ``(n_i)`` defines a
    homomorphism iff ``sum_i n_i c_i = 0`` for every ``sum_i e_i c_i`` in
    ``ker pi``.  The unknowns number ``r * dim N`` instead of ``dim M * dim N``.
    """
    F = m.field
    a = m.algebra
    na, dm, dn = a.dim, m.dim, n.dim
    gens = top_generators(m)
    r = len(gens)
    # rows (i, b): g_i . b
    pi = m.action[:, gens, :].transpose(1, 0, 2).reshape(r * na, dm)
    rel = F.left_kernel(pi)
    if rel.shape[0]:
        rel = F.row_basis(rel)
        # block column per relation: rows (i, j) -> (sum_b c_ib rho_N(b))[j, :]
        lin = F.matmul(rel.reshape(-1, na), n.action.reshape(na, dn * dn)).reshape(rel.shape[0], r * dn, dn)
        cons = lin.transpose(1, 0, 2).reshape(r * dn, rel.shape[0] * dn)
        sols = F.left_kernel(cons)
    else:
        sols = F.eye(r * dn)
    if sols.shape[0] == 0:
        return HomSpace(m, n, F.zeros(0, dm * dn), [])
    sols, piv = F.rref(sols)
    sols = sols[: len(piv)]
    h = sols.shape[0]
    section = F.solve_left(pi, F.eye(dm))
    acts = n.action.transpose(1, 0, 2).reshape(dn, na * dn)
    phi = F.matmul(sols.reshape(h * r, dn), acts).reshape(h, r * na, dn)
    mats = F.matmul(section, phi)
    pivots = [gens[q // dn] * dn + q % dn for q in piv]
    return HomSpace(m, n, mats.reshape(h, dm * dn), pivots)


def solve_hom(source: Module, target: Module, constraints) -> ModuleHom | None:
    """A homomorphism ``H`` with ``A @ H @ B == G`` for every ``(A, B, G)``; ``None`` if none exists.

    ``A`` or ``B`` may be ``None`` for the identity.
    """
    F = source.field
    hs = hom_basis(source, target)
    mats = hs.matrices()
    if hs.dim == 0:
        ok = all(not np.any(g) for _, _, g in constraints)
        return ModuleHom(source, target, F.zeros(source.dim, target.dim)) if ok else None
    cols, rhs = [], []
    for a, b, g in constraints:
        t = mats
        if a is not None:
            t = F.matmul(a, t)
        if b is not None:
            t = F.matmul(t, b)
        cols.append(t.reshape(hs.dim, -1).T)
        rhs.append(np.asarray(g).reshape(-1, 1))
    if hs.dim == 0:
        ok = all(not np.any(g) for g in rhs)
        return ModuleHom(source, target, F.zeros(source.dim, target.dim)) if ok else None
    sys_ = np.concatenate(cols) if cols else F.zeros(0, hs.dim)
    x = F.solve(sys_, F.array(np.concatenate(rhs)) if rhs else F.zeros(0, 1))
    if x is None:
        return None
    return hs.combine(x[:, 0])


def solve_hom_affine(source: Module, target: Module, constraints):
    """All homomorphisms satisfying the constraints, as (particular, kernel matrices) or ``None``."""
    F = source.field
    hs = hom_basis(source, target)
    part = solve_hom(source, target, constraints)
    if part is None:
        return None
    mats = hs.matrices()
    if hs.dim == 0:
        return part, mats
    cols = []
    for a, b, _ in constraints:
        t = mats
        if a is not None:
            t = F.matmul(a, t)
        if b is not None:
            t = F.matmul(t, b)
        cols.append(t.reshape(hs.dim, -1).T)
    sys_ = np.concatenate(cols) if cols else F.zeros(0, hs.dim)
    ker = F.right_kernel(sys_)  # hs.dim x k
    free = F.matmul(ker.T, hs.basis).reshape(-1, source.dim, target.dim)
    return part, free


def random_solution(source: Module, target: Module, constraints, rng) -> ModuleHom | None:
    """A uniformly random homomorphism among those satisfying the constraints."""
    F = source.field
    sol = solve_hom_affine(source, target, constraints)
    if sol is None:
        return None
    part, free = sol
    if free.shape[0] == 0:
        return part
    coeffs = F.random(rng, 1, free.shape[0])
    shift = F.matmul(coeffs, free.reshape(free.shape[0], -1)).reshape(source.dim, target.dim)
    return ModuleHom(source, target, F.add(part.matrix, shift))


# -- Hopf structure: tensor and internal Hom -------------------------------------


def _require_hopf(a: Algebra):
    if a.hopf is None:
        raise ModuleError(f"{a!r} carries no Hopf datum")
    return a.hopf


def tensor_action(m: Module, n: Module) -> np.ndarray:
    """Diagonal action ``(x (x) y) b = sum x b_(1) (x) y b_(2)``."""
    a = m.algebra
    h = _require_hopf(a)
    F = a.field
    k = a.dim
    dm, dn = m.dim, n.dim
    out = F.zeros(k * dm * dn, dm * dn).reshape(k, dm * dn, dm * dn)
    comul = h.comul.reshape(k, k, k)
    for i in range(k):
        acc = F.zeros(dm * dn, dm * dn)
        for j, l in zip(*np.nonzero(comul[i])):
            acc = F.add(acc, F.scale(F.kron(m.action[j], n.action[l]), comul[i, j, l]))
        out[i] = acc
    return out


def tensor_product(m: Module, n: Module) -> Module:
    return Module(m.algebra, tensor_action(m, n), f"{m.name}(x){n.name}" if m.name and n.name else "")


def hom_action(m: Module, n: Module) -> np.ndarray:
    """Action on ``Hom_k(M, N)`` (row-flattened matrices): ``(phi a)(x) = sum phi(x S(a_(1))) a_(2)``."""
    a = m.algebra
    h = _require_hopf(a)
    F = a.field
    k = a.dim
    dm, dn = m.dim, n.dim
    comul = h.comul.reshape(k, k, k)
    # rho_M(S b_j) for each j
    s_act = [m.act(h.antipode[j]) for j in range(k)]
    out = F.zeros(k * dm * dn, dm * dn).reshape(k, dm * dn, dm * dn)
    for i in range(k):
        acc = F.zeros(dm * dn, dm * dn)
        for j, l in zip(*np.nonzero(comul[i])):
            acc = F.add(acc, F.scale(F.kron(s_act[j].T, n.action[l]), comul[i, j, l]))
        out[i] = acc
    return out


def internal_hom_module(m: Module, n: Module) -> Module:
    return Module(m.algebra, hom_action(m, n))


# -- socle, duality, coinduction ----------------------------------------------------


def socle_rows(m: Module) -> np.ndarray:
    """RREF basis of ``{v : v r = 0 for r in the radical}``."""
    F = m.field
    acts = m.radical_actions()
    if m.dim == 0:
        return F.zeros(0, 0)
    if not acts:
        return F.eye(m.dim)
    return F.row_basis(F.left_kernel(np.concatenate(acts, axis=1)))


def socle(m: Module) -> tuple[Module, ModuleHom]:
    return submodule(m, socle_rows(m))


def radical_rows(m: Module) -> np.ndarray:
    """RREF basis of ``M J``."""
    F = m.field
    acts = m.radical_actions()
    if not acts or m.dim == 0:
        return F.zeros(0, m.dim)
    return F.row_basis(np.concatenate(acts))


def dual(m: Module) -> Module:
    """``Hom_k(M, k)`` as a right module over the opposite algebra (transposed actions)."""
    if "dual" not in m._cache:
        d = Module(m.algebra.opposite(), np.ascontiguousarray(m.action.transpose(0, 2, 1)),
                   f"D({m.name})" if m.name else "")
        d._cache["dual"] = m
        m._cache["dual"] = d
    return m._cache["dual"]


def dual_hom(f: ModuleHom) -> ModuleHom:
    return ModuleHom(dual(f.target), dual(f.source), np.ascontiguousarray(f.matrix.T))


def coinduced(m: Module) -> tuple[Module, ModuleHom]:
    """``Hom_k(Lambda, M)`` with ``(f a)(b) = f(ab)`` and the embedding ``m -> (b -> m b)``.

    A function ``f`` is stored as the concatenation of ``f(b_1), ..., f(b_n)``.
    """
    a = m.algebra
    F = m.field
    n, d = a.dim, m.dim
    eye_d = F.eye(d)
    # (f . b_i)(b_l) = sum_j mult[i, l, j] f(b_j)
    action = np.stack([F.kron(a.mult[i].T, eye_d) for i in range(n)]) if d else F.zeros(0, 0).reshape(n, 0, 0)
    c = Module(a, np.asarray(action).reshape(n, n * d, n * d), f"C({m.name})" if m.name else "")
    emb = np.concatenate([m.action[l] for l in range(n)], axis=1) if d else F.zeros(0, 0)
    return c, ModuleHom(m, c, emb)


# -- envelopes --------------------------------------------------------------------


def envelope_inside(ambient: Module, rows: np.ndarray) -> np.ndarray:
    """Maximal essential extension, inside an injective ``ambient``, of the submodule ``rows``.

    The current extension ``U`` grows by a module complement of the image of
    ``soc(ambient)`` inside ``soc(ambient / U)``; it is maximal exactly when
    that image is all of ``soc(ambient / U)``.
    """
    F = ambient.field
    d = ambient.dim
    cur = F.row_basis(rows) if np.asarray(rows).size else F.zeros(0, d)
    top_socle = socle_rows(ambient)
    while cur.shape[0] < d:
        q, pi = quotient(ambient, cur)
        soc_q = socle_rows(q)
        t_bar = F.row_basis(F.matmul(top_socle, pi.matrix)) if top_socle.shape[0] else F.zeros(0, q.dim)
        if soc_q.shape[0] == t_bar.shape[0]:
            break
        n_mod, n_incl = submodule(q, soc_q)
        t_in_n = F.row_basis(F.matmul(t_bar, np.eye(q.dim, dtype=np.int64)[:, _pivots(F, soc_q)])) if t_bar.shape[0] else F.zeros(0, n_mod.dim)
        comp = _module_complement(n_mod, t_in_n)
        lifted = F.matmul(F.matmul(comp, soc_q), quotient_section(ambient, cur))
        cur = F.row_basis(np.concatenate([cur, lifted]))
    return cur


def _pivots(F: Field, rref_rows: np.ndarray) -> list[int]:
    return F.rref(rref_rows)[1] if rref_rows.shape[0] else []


def _module_complement(n_mod: Module, sub_rows: np.ndarray) -> np.ndarray:
    """Rows of a module complement of ``sub_rows`` inside a semisimple ``n_mod``.

    Basis vectors outside the running span ``S`` contribute their cyclic
    submodule ``W`` with ``W cap S`` split off, so the Hom systems solved are
    only as large as ``W``, whose dimension is bounded by ``dim Lambda``.
    """
    F = n_mod.field
    d = n_mod.dim
    span = F.row_basis(sub_rows) if sub_rows.shape[0] else F.zeros(0, d)
    pieces = []
    eye = F.eye(d)
    for i in range(d):
        if span.shape[0] == d:
            break
        if span.shape[0] and F.in_span(span, eye[i]):
            continue
        w = generated_submodule(n_mod, eye[i : i + 1])
        meet = _intersection_rows(F, w, span)
        if meet.shape[0]:
            w_mod, w_incl = submodule(n_mod, w)
            _, piv = F.rref(w_incl.matrix)
            w = F.matmul(_complement_by_retraction(w_mod, F.row_basis(meet[:, piv])), w_incl.matrix)
        pieces.append(w)
        span = F.row_basis(np.concatenate([span, w]))
    return F.row_basis(np.concatenate(pieces)) if pieces else F.zeros(0, d)


def _intersection_rows(F: Field, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    if u.shape[0] == 0 or v.shape[0] == 0:
        return F.zeros(0, u.shape[1])
    coeffs = F.left_kernel(np.concatenate([u, v]))
    if coeffs.shape[0] == 0:
        return F.zeros(0, u.shape[1])
    return F.row_basis(F.matmul(np.ascontiguousarray(coeffs[:, : u.shape[0]]), u))


def _complement_by_retraction(n_mod: Module, sub_rows: np.ndarray) -> np.ndarray:
    """Kernel of a retraction onto ``sub_rows``; needs ``n_mod`` semisimple."""
    F = n_mod.field
    if sub_rows.shape[0] == 0:
        return F.eye(n_mod.dim)
    t_mod, t_incl = submodule(n_mod, sub_rows)
    retract = solve_hom(n_mod, t_mod, [(t_incl.matrix, None, F.eye(t_mod.dim))])
    if retract is None:
        raise ModuleError("socle quotient is not semisimple; is the supplied radical the Jacobson radical?")
    return F.row_basis(F.left_kernel(retract.matrix))


def injective_envelope(m: Module) -> tuple[Module, ModuleHom]:
    """Injective envelope ``(E, iota)`` grown inside the coinduced module."""
    if "env" in m._cache:
        return m._cache["env"]
    F = m.field
    if m.dim == 0:
        out = (m, m.identity())
    else:
        c, emb = coinduced(m)
        rows = envelope_inside(c, emb.matrix)
        e, incl = submodule(c, rows)
        _, piv = F.rref(incl.matrix)
        out = (e, ModuleHom(m, e, np.ascontiguousarray(emb.matrix[:, piv])))
    m._cache["env"] = out
    return out


def is_injective(m: Module) -> bool:
    """``M`` is injective iff ``dim M = dim E(soc M)``."""
    if "inj" not in m._cache:
        if m.dim == 0:
            m._cache["inj"] = True
        else:
            s, _ = socle(m)
            m._cache["inj"] = injective_envelope(s)[0].dim == m.dim
    return m._cache["inj"]


def projective_cover(m: Module) -> tuple[Module, ModuleHom]:
    """``P(M) = D(E(D(M)))`` computed over the opposite algebra."""
    if "cover" not in m._cache:
        e, iota = injective_envelope(dual(m))
        p = dual(e)
        m._cache["cover"] = (p, ModuleHom(p, m, np.ascontiguousarray(iota.matrix.T)))
    return m._cache["cover"]


def is_projective(m: Module) -> bool:
    return is_injective(dual(m))


def cosyzygy(m: Module) -> Module:
    return cosyzygy_sequence(m)[1]


def cosyzygy_sequence(m: Module) -> tuple[ModuleHom, Module, ModuleHom]:
    """``M -> E(M) -> Sigma M``."""
    e, iota = injective_envelope(m)
    q, pi = cokernel(iota)
    return iota, q, pi


def syzygy(m: Module) -> Module:
    p, pi = projective_cover(m)
    return kernel(pi)[0]


# -- stable Hom -------------------------------------------------------------------


@dataclass(eq=False)
class StableHom:
    """``Hom(M, N)`` modulo maps factoring through an injective."""

    homs: HomSpace
    factoring: np.ndarray
    representatives: np.ndarray

    @property
    def dim(self) -> int:
        return self.representatives.shape[0]

    def reps(self) -> list[ModuleHom]:
        hs = self.homs
        return [ModuleHom(hs.source, hs.target, r.reshape(hs.source.dim, hs.target.dim)) for r in self.representatives]

    def classes(self, mats: np.ndarray) -> np.ndarray:
        """Coordinates of hom matrices in the basis of representatives, modulo the factoring subspace."""
        hs = self.homs
        F = hs.source.field
        mats = np.asarray(mats).reshape(-1, hs.source.dim * hs.target.dim)
        if self.dim == 0:
            return F.zeros(mats.shape[0], 0)
        full = np.concatenate([self.representatives, self.factoring])
        x = F.solve_left(full, mats)
        if x is None:
            raise ModuleError("matrix is not a homomorphism of the right modules")
        return np.ascontiguousarray(x[:, : self.dim])

    def is_zero(self, f: ModuleHom) -> bool:
        return not np.any(self.classes(f.matrix))


def stable_hom(m: Module, n: Module) -> StableHom:
    """A map factors through an injective iff it factors through ``iota: M -> E(M)``."""
    F = m.field
    hs = hom_basis(m, n)
    e, iota = injective_envelope(m)
    he = hom_basis(e, n)
    size = m.dim * n.dim
    if he.dim and size:
        fact = F.row_basis(F.matmul(iota.matrix, he.matrices()).reshape(he.dim, size))
    else:
        fact = F.zeros(0, size)
    reps = []
    span = fact
    for row in hs.basis:
        if not F.in_span(span, row):
            reps.append(row)
            span = F.row_basis(np.concatenate([span, row.reshape(1, -1)]))
    rep_arr = np.array(reps, dtype=hs.basis.dtype).reshape(len(reps), size)
    return StableHom(hs, fact, rep_arr)


def stably_isomorphic(m: Module, n: Module) -> bool:
    """Certificate search for a stable isomorphism ``M ~ N``.

    Looks for ``u: M -> N`` and ``v: N -> M`` among stable representatives whose
    composites are stably the identity; complete when one of the stable Hom
    spaces has dimension at most one or the representatives already work.
    """
    return stable_iso_witness(m, n) is not None


def stable_iso_witness(m: Module, n: Module):
    F = m.field
    smn, snm = stable_hom(m, n), stable_hom(n, m)
    smm, snn = stable_hom(m, m), stable_hom(n, n)
    if smn.dim != snm.dim or smm.dim != snn.dim:
        return None
    if smm.dim == 0:
        return (ModuleHom(m, n, F.zeros(m.dim, n.dim)), ModuleHom(n, m, F.zeros(n.dim, m.dim)))
    # try sums of representatives u, and solve linearly for v given u
    id_m = smm.classes(m.identity().matrix)
    id_n = snn.classes(n.identity().matrix)
    cands = _candidate_combinations(smn.dim, F)
    for coeffs in cands:
        u = _combine(smn, coeffs, F)
        # v o u = id_M stably: linear in v's coefficients
        vs = snm.reps()
        cols_m = np.concatenate([smm.classes(F.matmul(u.matrix, v.matrix)) for v in vs]).T if vs else F.zeros(smm.dim, 0)
        x = F.solve(cols_m, id_m.T)
        if x is None:
            continue
        v = _combine(snm, x[:, 0], F)
        if np.array_equal(snn.classes(F.matmul(v.matrix, u.matrix)), id_n):
            return (u, v)
    return None


def _candidate_combinations(k: int, F: Field):
    eye = F.eye(k)
    yield from eye
    yield F.array(np.ones(k, dtype=np.int64).reshape(1, -1))[0]
    for i in range(k):
        for j in range(i + 1, k):
            yield F.add(eye[i], eye[j])


def _combine(sh: StableHom, coeffs, F: Field) -> ModuleHom:
    hs = sh.homs
    flat = F.matmul(np.asarray(coeffs).reshape(1, -1), sh.representatives).reshape(hs.source.dim, hs.target.dim)
    return ModuleHom(hs.source, hs.target, flat)


def module_from_json(algebra: Algebra, obj: dict) -> Module:
    action = np.asarray(obj["action"], dtype=object)
    d = int(obj["dim"])
    F = algebra.field
    if d == 0:
        return zero_module(algebra)
    arr = F.array(action.reshape(algebra.dim * d, d)).reshape(algebra.dim, d, d)
    return make_module(algebra, arr, obj.get("name", ""))
