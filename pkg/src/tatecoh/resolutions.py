"""Minimal injective and projective resolutions, complete resolutions and lifts.

All resolutions are lazy: terms are produced on demand by iterating
envelopes (or covers) and cached under the complex's lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .algebra import Algebra, is_self_injective
from .complexes import (
    ChainComplex,
    ChainMap,
    ComplexError,
    cone,
    is_acyclic,
    minimal_decomposition,
    shift,
    zero_complex,
)
from .modrep import (
    Module,
    ModuleError,
    ModuleHom,
    cokernel,
    direct_sum,
    injective_envelope,
    kernel,
    projective_cover,
    quotient,
    radical_rows,
    regular_module,
    solve_hom,
    zero_module,
)

SELF_INJECTIVE = "SelfInjective"
FINITE_GLOBAL_DIMENSION = "FiniteGlobalDimension"
UNSUPPORTED = "Unsupported"


class UnsupportedAlgebraError(ValueError):
    pass


class LiftError(ComplexError):
    pass


@dataclass
class Resolution:
    """A resolution together with its augmentation.

    ``kind`` is ``injective``, ``projective`` or ``complete``.  For the
    injective and complete kinds ``eta`` is ``M -> X^0``; for the projective
    kind ``eps`` is ``X^0 -> M``.
    """

    kind: str
    of: Module
    complex: ChainComplex
    eta: ModuleHom | None = None
    eps: ModuleHom | None = None
    canonical: ChainMap | None = None  # iM -> tM for complete resolutions


class _Sequential:
    """Sequential builder: ``step(k, state) -> state`` evaluated for ``k = 0, 1, ...`` on demand."""

    def __init__(self, first, step):
        self.states = [first()]
        self.step = step
        self.lock = threading.RLock()

    def __getitem__(self, k: int):
        with self.lock:
            while len(self.states) <= k:
                self.states.append(self.step(len(self.states), self.states[-1]))
            return self.states[k]


def injective_resolution(m: Module) -> Resolution:
    """``I^0 = E(M)`` and ``I^{n+1} = E(coker(I^{n-1} -> I^n))``."""
    cache = m._cache
    if "ires" in cache:
        return cache["ires"]
    a = m.algebra
    F = a.field

    def first():
        e, iota = injective_envelope(m)
        q, pi = cokernel(iota)
        return e, pi, iota

    def step(k, prev):
        _, pi, _ = prev
        q = pi.target
        e, iota = injective_envelope(q)
        q2, pi2 = cokernel(iota)
        return e, pi2, iota

    seq = _Sequential(first, step)

    def term(n):
        return seq[n][0]

    def diff(n):
        # I^n -> Q_n -> I^{n+1}
        return F.matmul(seq[n][1].matrix, seq[n + 1][2].matrix)

    x = ChainComplex(a, term, diff, 0, None, f"i({m.name})")
    res = Resolution("injective", m, x, eta=seq[0][2])
    cache["ires"] = res
    return res


def projective_resolution(m: Module) -> Resolution:
    """``P^0 = P(M)``, ``P^{-n-1} = P(ker(P^{-n} -> P^{-n+1}))``."""
    cache = m._cache
    if "pres" in cache:
        return cache["pres"]
    a = m.algebra
    F = a.field

    def first():
        p, pi = projective_cover(m)
        k, inc = kernel(pi)
        return p, inc, pi

    def step(j, prev):
        _, inc, _ = prev
        k = inc.source
        p, pi = projective_cover(k)
        k2, inc2 = kernel(pi)
        return p, inc2, pi

    seq = _Sequential(first, step)

    def term(n):
        return seq[-n][0]

    def diff(n):
        # P^n -> K -> P^{n+1}, with n <= -1
        return F.matmul(seq[-n][2].matrix, seq[-n - 1][1].matrix)

    x = ChainComplex(a, term, diff, None, 0, f"p({m.name})")
    res = Resolution("projective", m, x, eps=seq[0][2])
    cache["pres"] = res
    return res


def resolution_length(res: Resolution, cutoff: int) -> int | None:
    """Index of the last nonzero term within ``cutoff`` steps, or ``None`` if it does not stop."""
    x = res.complex
    sgn = 1 if res.kind == "injective" else -1
    for k in range(cutoff + 1):
        if x.term(sgn * k).dim == 0:
            return k - 1
    return None


# -- regimes -------------------------------------------------------------------------


@dataclass
class Provider:
    """Which complete-resolution construction applies to an algebra."""

    algebra: Algebra
    regime: str
    cutoff: int
    detail: str = ""

    @property
    def supported(self) -> bool:
        return self.regime != UNSUPPORTED

    def require(self) -> None:
        if not self.supported:
            raise UnsupportedAlgebraError(self.detail)


def top_module(a: Algebra) -> Module:
    """``Lambda / J``."""
    reg = regular_module(a)
    return quotient(reg, radical_rows(reg))[0]


def detect_regime(a: Algebra, cutoff: int = 20) -> Provider:
    key = ("regime", cutoff)
    if key in a._cache:
        return a._cache[key]
    if a.radical is None:
        raise ModuleError(f"{a!r} has no radical basis; regime detection needs one")
    if is_self_injective(a):
        out = Provider(a, SELF_INJECTIVE, cutoff, "regular module is injective")
    else:
        length = resolution_length(projective_resolution(top_module(a)), cutoff)
        if length is not None:
            out = Provider(a, FINITE_GLOBAL_DIMENSION, cutoff, f"projective dimension of the top is {length}")
        else:
            out = Provider(
                a, UNSUPPORTED, cutoff,
                f"regular module is not injective and the projective resolution of the top does not stop within {cutoff} steps",
            )
    a._cache[key] = out
    return out


# -- complete resolutions --------------------------------------------------------------


def splice(m: Module) -> Resolution:
    """Glue ``p(M)`` (degrees < 0) to ``i(M)`` (degrees >= 0) through ``P^0 -> M -> I^0``."""
    a = m.algebra
    if not is_self_injective(a):
        raise UnsupportedAlgebraError("splicing needs a self-injective algebra")
    if "tres" in m._cache:
        return m._cache["tres"]
    F = a.field
    ires = injective_resolution(m)
    pres = projective_resolution(m)
    ix, px = ires.complex, pres.complex

    def term(n):
        return ix.term(n) if n >= 0 else px.term(n + 1)

    def diff(n):
        if n >= 0:
            return ix.diff(n)
        if n == -1:
            return F.matmul(pres.eps.matrix, ires.eta.matrix)
        return px.diff(n + 1)

    t = ChainComplex(a, term, diff, None, None, f"t({m.name})", totally_acyclic=True)
    canonical = ChainMap(ix, t, lambda n: F.eye(ix.term(n).dim) if n >= 0 else F.zeros(0, t.term(n).dim))
    res = Resolution("complete", m, t, eta=ires.eta, canonical=canonical)
    m._cache["tres"] = res
    return res


def complete_resolution(m: Module, provider: Provider | None = None) -> Resolution:
    if provider is None:
        provider = detect_regime(m.algebra)
    provider.require()
    if provider.regime == SELF_INJECTIVE:
        return splice(m)
    a = m.algebra
    z = zero_complex(a)
    ires = injective_resolution(m)
    return Resolution(
        "complete", m, z,
        eta=ModuleHom(m, zero_module(a), a.field.zeros(m.dim, 0)),
        canonical=ChainMap.zero(ires.complex, z),
    )


# -- lifting ---------------------------------------------------------------------------


def extend_chain_map(x: ChainComplex, y: ChainComplex, eta_x: ModuleHom, g: np.ndarray, down: bool = True) -> ChainMap:
    """Chain map ``F: X -> Y`` with ``eta_x F^0 = g``.

    Upward steps solve ``d_X F^{p+1} = F^p d_Y`` using injectivity of
    ``Y^{p+1}``; downward steps solve ``F^{p-1} d_Y = d_X F^p`` and need ``Y``
    totally acyclic with ``X^{p-1}`` injective.  Requires ``X`` exact at
    degrees ``>= 1`` with ``ker d_X^0 = image(eta_x)`` and ``g d_Y^0 = 0``.
    """
    F = x.field
    comps: dict[int, np.ndarray] = {}
    lock = threading.RLock()

    def comp(p):
        with lock:
            if p in comps:
                return comps[p]
            xs, ys = x.term(p), y.term(p)
            if p == 0:
                sol = solve_hom(xs, ys, [(eta_x.matrix, None, g)])
            elif p > 0:
                prev = comp(p - 1)
                sol = solve_hom(xs, ys, [(x.diff(p - 1), None, F.matmul(prev, y.diff(p - 1)))])
            else:
                if not down:
                    sol = ModuleHom(xs, ys, F.zeros(xs.dim, ys.dim))
                else:
                    nxt = comp(p + 1)
                    sol = solve_hom(xs, ys, [(None, y.diff(p), F.matmul(x.diff(p), nxt))])
            if sol is None:
                raise LiftError(f"no extension of the chain map in degree {p}")
            comps[p] = sol.matrix
            return comps[p]

    return ChainMap(x, y, comp)


def lift_map(f: ModuleHom, rx: Resolution, ry: Resolution) -> ChainMap:
    """Lift ``f: M -> N`` to resolutions of ``M`` and ``N`` (injective or complete)."""
    if rx.eta is None or ry.eta is None:
        raise LiftError("lifting needs injective or complete resolutions")
    F = f.field
    g = F.matmul(f.matrix, ry.eta.matrix)
    down = rx.kind == "complete"
    if down and ry.kind != "complete":
        down = False
    return extend_chain_map(rx.complex, ry.complex, rx.eta, g, down)


# -- resolving bounded complexes ----------------------------------------------------------


def resolve_complex(x: ChainComplex, minimalize: bool = True) -> tuple[Resolution, ChainMap]:
    """Complex of injectives ``iX`` with a quasi-isomorphism ``X -> iX``.

    Step ``n`` forms ``Q_n = (I^{n-1} + X^n) / {(phi x, -d x), (d y, 0)}`` and
    embeds it into its envelope ``I^n``.
    """
    if not x.bounded:
        raise ComplexError("resolve_complex needs a bounded complex")
    a = x.algebra
    F = a.field
    lo, hi = x.lo, x.hi
    if lo > hi:
        z = zero_complex(a)
        return Resolution("injective", zero_module(a), z), ChainMap.zero(x, z)

    # state for degree n: (I^n, phi^n: X^n -> I^n, rho^n: I^n -> Q_{n+1}, sigma_{n+1}: X^{n+1} -> Q_{n+1})
    def build(n, prev):
        xn = x.term(n)
        if prev is None:
            i_prev = zero_module(a)
            phi_prev = F.zeros(x.term(n - 1).dim, 0)
            d_prev = F.zeros(0, 0)  # d_I^{n-2}: I^{n-2} -> I^{n-1}
        else:
            i_prev, phi_prev, d_prev = prev[0], prev[1], prev[3]
        s, incl, _ = direct_sum(i_prev, xn)
        rel = []
        if x.term(n - 1).dim:
            rel.append(np.concatenate([phi_prev, F.neg(x.diff(n - 1))], axis=1))
        if d_prev.shape[0]:
            rel.append(np.concatenate([d_prev, F.zeros(d_prev.shape[0], xn.dim)], axis=1))
        rows = F.row_basis(np.concatenate(rel)) if rel else F.zeros(0, s.dim)
        q, pi = quotient(s, rows)
        e, iota = injective_envelope(q)
        to_e = F.matmul(pi.matrix, iota.matrix)
        d_in = to_e[: i_prev.dim]  # I^{n-1} -> I^n
        phi = to_e[i_prev.dim:]  # X^n -> I^n
        return e, phi, d_in, d_in

    states: dict[int, tuple] = {}
    lock = threading.RLock()

    def state(n):
        with lock:
            if n < lo:
                return None
            if n not in states:
                states[n] = build(n, state(n - 1))
            return states[n]

    def term(n):
        return state(n)[0]

    def diff(n):
        return state(n + 1)[2]

    ix = ChainComplex(a, term, diff, lo, None, f"i({x.name})")
    phi = ChainMap(x, ix, lambda n: state(n)[1] if n >= lo else F.zeros(x.term(n).dim, 0))
    if not minimalize:
        return Resolution("injective", zero_module(a), ix), phi
    md = minimal_decomposition(ix, (lo, hi + 1))
    res = Resolution("injective", zero_module(a), md.minimal)
    return res, phi.then(md.proj_minimal)


def is_quasi_isomorphism(f: ChainMap, lo: int, hi: int) -> bool:
    return is_acyclic(cone(f), lo, hi)


@dataclass
class Horseshoe:
    """Complete resolution of the middle term of ``0 -> B' -> B -> B'' -> 0``.

    ``T^n = T'^n + T''^n`` with differential ``[[d', 0], [tau, d'']]``, where
    ``tau: T'' -> T'[1]`` lifts the extension class.  The inclusion and the
    projection are chain maps lifting ``B' -> B`` and ``B -> B''``.
    """

    resolution: Resolution
    left: Resolution
    right: Resolution
    tau: ChainMap
    incl: ChainMap
    proj: ChainMap


def horseshoe(inj: ModuleHom, surj: ModuleHom, provider: Provider | None = None) -> Horseshoe:
    b1, b, b2 = inj.source, inj.target, surj.target
    a = b.algebra
    F = a.field
    if provider is None:
        provider = detect_regime(a)
    if provider.regime != SELF_INJECTIVE:
        raise UnsupportedAlgebraError("horseshoe gluing of complete resolutions needs a self-injective algebra")
    r1, r2 = complete_resolution(b1, provider), complete_resolution(b2, provider)
    t1, t2 = r1.complex, r2.complex
    # theta: B -> T'^0 extending eta' along B' -> B
    theta = solve_hom(b, t1.term(0), [(inj.matrix, None, r1.eta.matrix)])
    if theta is None:
        raise LiftError("cannot extend the augmentation along the inclusion")
    w = F.matmul(theta.matrix, t1.diff(0))
    c = solve_hom(b2, t1.term(1), [(surj.matrix, None, w)])
    if c is None:
        raise LiftError("extension cocycle does not factor through the quotient")
    tau = extend_chain_map(t2, shift(t1, 1), r2.eta, F.neg(c.matrix))
    sums: dict[int, tuple] = {}
    lock = threading.RLock()

    def data(n):
        with lock:
            if n not in sums:
                sums[n] = direct_sum(t1.term(n), t2.term(n))
            return sums[n]

    def diff(n):
        p1, p2 = t1.term(n).dim, t2.term(n).dim
        q1, q2 = t1.term(n + 1).dim, t2.term(n + 1).dim
        out = F.zeros(p1 + p2, q1 + q2)
        out[:p1, :q1] = t1.diff(n)
        out[p1:, :q1] = tau[n]
        out[p1:, q1:] = t2.diff(n)
        return out

    t = ChainComplex(a, lambda n: data(n)[0], diff, None, None, f"t({b.name})", totally_acyclic=True)
    eta = ModuleHom(b, t.term(0), np.concatenate([theta.matrix, F.matmul(surj.matrix, r2.eta.matrix)], axis=1))
    res = Resolution("complete", b, t, eta=eta)
    incl = ChainMap(t1, t, lambda n: data(n)[1][0].matrix)
    proj = ChainMap(t, t2, lambda n: data(n)[2][1].matrix)
    return Horseshoe(res, r1, r2, tau, incl, proj)
