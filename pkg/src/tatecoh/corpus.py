"""Seeded generators for test modules, short exact sequences and complexes of injectives."""

from __future__ import annotations

import numpy as np

from .algebra import Algebra
from .complexes import (
    ChainComplex,
    ChainMap,
    complex_from_terms,
    cone,
    direct_sum_complex,
    concentrated,
    shift,
)
from .modrep import (
    Module,
    ShortExactSequence,
    cogenerator,
    direct_sum,
    generated_submodule,
    hom_basis,
    injective_envelope,
    quotient,
    regular_module,
    submodule,
    trivial_module,
)
from .resolutions import injective_resolution


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_submodule_rows(m: Module, rng, gens: int | None = None) -> np.ndarray:
    F = m.field
    if gens is None:
        gens = int(rng.integers(1, 3))
    return generated_submodule(m, F.random(rng, gens, m.dim))


def random_module(a: Algebra, seed=None, max_dim: int = 6) -> Module:
    """A nonzero module cut out of a small free module or cogenerator by random generators."""
    rng = _rng(seed)
    for _ in range(200):
        base = [regular_module(a), cogenerator(a)][int(rng.integers(0, 2))]
        rank = 1 if base.dim * 2 > max_dim or rng.integers(0, 5) < 3 else 2
        amb = base if rank == 1 else direct_sum(base, base)[0]
        rows = random_submodule_rows(amb, rng)
        if rng.integers(0, 2) == 0:
            m = submodule(amb, rows)[0]
        else:
            m = quotient(amb, rows)[0]
        if 0 < m.dim <= max_dim:
            m.name = f"M{m.dim}"
            return m
    return regular_module(a)


def module_corpus(a: Algebra, count: int = 10, seed=0, max_dim: int = 6) -> list[Module]:
    """Named modules first (``k`` when defined, ``Lambda``, ``E``), then random ones."""
    rng = _rng(seed)
    out = []
    if a.augmentation is not None:
        out.append(trivial_module(a))
    out.append(regular_module(a))
    e = cogenerator(a)
    e.name = e.name or "E"
    out.append(e)
    if a.augmentation is not None:
        k = trivial_module(a)
        out.append(_named(injective_envelope(k)[0], "E(k)"))
    while len(out) < count:
        out.append(random_module(a, rng, max_dim))
    return out[:max(count, 0)]


def _named(m: Module, name: str) -> Module:
    if not m.name:
        m.name = name
    return m


def random_ses(a: Algebra, seed=None, max_dim: int = 6) -> ShortExactSequence:
    rng = _rng(seed)
    b = random_module(a, rng, max_dim)
    rows = random_submodule_rows(b, rng, 1)
    sub, inc = submodule(b, rows)
    q, pi = quotient(b, rows)
    return ShortExactSequence(inc, pi)


def random_automorphism(m: Module, rng, tries: int = 50) -> np.ndarray | None:
    F = m.field
    hs = hom_basis(m, m)
    for _ in range(tries):
        h = hs.combine(F.random(rng, 1, hs.dim)[0]).matrix
        if F.rank(h) == m.dim:
            return h
    return None


def conjugate(x: ChainComplex, rng, lo: int, hi: int) -> ChainComplex:
    """Isomorphic copy of a bounded complex under random degreewise automorphisms."""
    F = x.field
    autos = {}
    for n in range(lo, hi + 1):
        t = x.term(n)
        autos[n] = random_automorphism(t, rng) if t.dim else F.zeros(0, 0)
        if autos[n] is None:
            autos[n] = F.eye(t.dim)
    inv = {n: F.inverse(m) if m.shape[0] else m for n, m in autos.items()}
    terms = {n: x.term(n) for n in range(lo, hi + 1)}
    diffs = {n: F.matmul(F.matmul(inv[n], x.diff(n)), autos[n + 1]) for n in range(lo, hi)}
    return complex_from_terms(x.algebra, terms, diffs, x.name)


def random_injective(a: Algebra, rng, max_dim: int) -> Module:
    """Injective envelope of a random small module, or the cogenerator."""
    for _ in range(50):
        m = random_module(a, rng, max_dim)
        e = injective_envelope(m)[0]
        if e.dim <= max_dim:
            return e
    return cogenerator(a)


def random_injective_complex(a: Algebra, seed=None, max_dim: int = 12, span: int = 3) -> ChainComplex:
    """Bounded complex of injectives mixing resolution pieces, contractible cones and random maps."""
    rng = _rng(seed)
    F = a.field
    e_dim = cogenerator(a).dim
    blocks: list[ChainComplex] = []
    budget = {n: max_dim for n in range(0, span + 1)}

    def fits(x: ChainComplex) -> bool:
        return all(x.term(n).dim <= budget.get(n, 0) for n in range(x.lo, x.hi + 1)) and x.lo >= 0 and x.hi <= span

    for _ in range(int(rng.integers(1, 4))):
        kind = int(rng.integers(0, 3))
        start = int(rng.integers(0, span))
        if kind == 0:
            m = random_module(a, rng, max(1, max_dim // 2))
            length = int(rng.integers(1, span - start + 1))
            x = injective_resolution(m).complex.materialize(0, length)
            x = shift(x, -start).materialize(start, start + length)
        elif kind == 1:
            e = random_injective(a, rng, max(e_dim, max_dim // 2))
            x = shift(cone(ChainMap.identity(concentrated(e))), -start - 1).materialize(start, start + 1)
        else:
            e1 = random_injective(a, rng, max(e_dim, max_dim // 2))
            e2 = random_injective(a, rng, max(e_dim, max_dim // 2))
            hs = hom_basis(e1, e2)
            mat = hs.combine(F.random(rng, 1, hs.dim)[0]).matrix if hs.dim else F.zeros(e1.dim, e2.dim)
            x = complex_from_terms(a, {start: e1, start + 1: e2}, {start: mat})
        if x.bounded and x.lo <= x.hi and fits(x):
            blocks.append(x)
            for n in range(x.lo, x.hi + 1):
                budget[n] -= x.term(n).dim
    if not blocks:
        e = cogenerator(a)
        blocks.append(complex_from_terms(a, {0: e}, {}))
    total = direct_sum_complex(*blocks)[0] if len(blocks) > 1 else blocks[0]
    lo, hi = total.lo, total.hi
    return conjugate(total.materialize(lo, hi), rng, lo, hi)
