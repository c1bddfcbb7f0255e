import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tatecoh.algebra import base_field, preset
from tatecoh.corpus import module_corpus, random_module
from tatecoh.exactla import GF
from tatecoh.modrep import (
    _complement_by_retraction,
    _module_complement,
    generated_submodule,
    submodule,
    Module,
    ModuleError,
    ModuleHom,
    cogenerator,
    coinduced,
    cokernel,
    cosyzygy,
    direct_sum,
    dual,
    hom_basis,
    hom_basis_by_generators,
    hom_basis_by_intertwining,
    injective_envelope,
    is_injective,
    kernel,
    projective_cover,
    regular_module,
    socle,
    socle_rows,
    stable_hom,
    stable_iso_witness,
    syzygy,
    trivial_module,
    zero_module,
)

from conftest import SELF_INJECTIVE_PRESETS

F2 = GF(2)


# -- brute-force oracles over F_2 ----------------------------------------------------

def brute_hom_dim(m, n):
    """Count all intertwining d_m x d_n matrices over F_2."""
    count = 0
    for bits in itertools.product((0, 1), repeat=m.dim * n.dim):
        x = np.array(bits, dtype=np.int64).reshape(m.dim, n.dim)
        if all(np.array_equal(F2.matmul(m.action[i], x), F2.matmul(x, n.action[i])) for i in range(m.algebra.dim)):
            count += 1
    return count.bit_length() - 1


def all_subspaces(d):
    """Every subspace of F_2^d, as RREF row bases (deduplicated)."""
    seen = {}
    vectors = [np.array(v, dtype=np.int64) for v in itertools.product((0, 1), repeat=d)]
    for r in range(d + 1):
        for combo in itertools.combinations(vectors, r):
            rows = F2.row_basis(np.array(combo, dtype=np.int64).reshape(r, d)) if r else F2.zeros(0, d)
            seen.setdefault(rows.tobytes() + bytes([rows.shape[0]]), rows)
    return list(seen.values())


def brute_envelope_dim(m):
    """Largest essential extension of M inside its coinduced module, by exhaustive search."""
    c, emb = coinduced(m)
    image = emb.matrix
    best = 0
    for rows in all_subspaces(c.dim):
        if rows.shape[0] < m.dim:
            continue
        if not all(F2.in_span(rows, v) for v in image):
            continue
        if not all(F2.in_span(rows, v) for i in range(c.algebra.dim) for v in F2.matmul(rows, c.action[i])):
            continue
        sub_action = np.stack([F2.solve_left(rows, F2.matmul(rows, c.action[i])) for i in range(c.algebra.dim)])
        sub = Module(c.algebra, sub_action)
        soc = F2.matmul(socle_rows(sub), rows) if sub.dim else F2.zeros(0, c.dim)
        if all(F2.in_span(image, v) for v in soc):
            best = max(best, rows.shape[0])
    return best


# -- Hom ---------------------------------------------------------------------------

def test_hom_examples(dual_numbers):
    k, lam = trivial_module(dual_numbers), regular_module(dual_numbers)
    assert hom_basis(k, k).dim == 1
    assert hom_basis(k, lam).dim == 1 == brute_hom_dim(k, lam)
    assert hom_basis(lam, k).dim == 1


@pytest.mark.parametrize("name", ["k[t]/t^2@F2", "kC2@F2", "T2@F2"])
def test_hom_matches_enumeration(name):
    a = preset(name)
    mods = [regular_module(a), cogenerator(a)] + ([trivial_module(a)] if a.augmentation is not None else [])
    for m in mods:
        for n in mods:
            if m.dim * n.dim <= 12:
                assert hom_basis(m, n).dim == brute_hom_dim(m, n)


def test_hom_from_free_module_is_target(klein):
    lam = regular_module(klein)
    for m in module_corpus(klein, 6, seed=3):
        assert hom_basis(lam, m).dim == m.dim


def test_hom_across_algebras(dual_numbers, klein):
    with pytest.raises(ModuleError):
        hom_basis(trivial_module(dual_numbers), trivial_module(klein))


def test_hom_basis_elements_intertwine(klein):
    for m in module_corpus(klein, 6, seed=1):
        for h in hom_basis(m, cogenerator(klein)).homs():
            assert h.is_homomorphism()


@pytest.mark.parametrize("name", ["kV4@F2", "T3@Q", "kC3@F3", "exterior(2)@Q"])
def test_two_hom_algorithms_agree(name):
    a = preset(name)
    mods = module_corpus(a, 5, seed=7, max_dim=8)
    F = a.field
    for m in mods:
        for n in mods:
            x, y = hom_basis_by_intertwining(m, n), hom_basis_by_generators(m, n)
            assert x.dim == y.dim
            if x.dim:
                assert F.rank(np.concatenate([x.basis, y.basis])) == x.dim
                assert np.array_equal(y.basis[:, y.pivots], F.eye(y.dim))


# -- kernels, socles, duals --------------------------------------------------------

def test_kernel_cokernel_basics(dual_numbers):
    lam = regular_module(dual_numbers)
    assert kernel(lam.identity())[0].dim == 0
    z = zero_module(dual_numbers)
    assert cokernel(ModuleHom(z, lam, F2.zeros(0, 2)))[0].dim == 2


def test_kernel_of_t_is_trivial(dual_numbers):
    lam = regular_module(dual_numbers)
    t = ModuleHom(lam, lam, lam.action[1])
    assert t.is_homomorphism()
    ker, _ = kernel(t)
    assert ker.dim == 1
    assert np.array_equal(ker.action, trivial_module(dual_numbers).action)


def test_socle_examples(dual_numbers, klein):
    lam = regular_module(dual_numbers)
    assert np.array_equal(socle_rows(lam), F2.array([[0, 1]]))
    assert socle(regular_module(klein))[0].dim == 1
    k = trivial_module(klein)
    assert socle(direct_sum(k, k, k)[0])[0].dim == 3


def test_dual_examples(dual_numbers, t2):
    assert np.array_equal(dual(trivial_module(dual_numbers)).action, trivial_module(dual_numbers).action)
    e = dual(regular_module(t2))
    assert e.dim == 3 and e.algebra is t2.opposite()
    lam = regular_module(t2)
    assert np.array_equal(dual(dual(lam)).action, lam.action)


@given(st.sampled_from(SELF_INJECTIVE_PRESETS + ["T2@F2", "T3@F3"]), st.integers(0, 10**6))
def test_duality_reverses_hom(name, seed):
    a = preset(name)
    m, n = random_module(a, seed), random_module(a, seed + 1)
    assert dual(m).dim == m.dim
    assert hom_basis(m, n).dim == hom_basis(dual(n), dual(m)).dim


def test_coinduced(dual_numbers, klein):
    assert coinduced(zero_module(dual_numbers))[0].dim == 0
    m = random_module(klein, 4)
    c, emb = coinduced(m)
    assert c.dim == 4 * m.dim and emb.is_injective() and emb.is_homomorphism()
    ck, _ = coinduced(trivial_module(dual_numbers))
    # C(k) and Lambda have isomorphic structure: an invertible intertwiner exists
    hs = hom_basis(ck, regular_module(dual_numbers))
    assert any(F2.rank(h.matrix) == 2 for h in hs.homs())


# -- envelopes and covers ----------------------------------------------------------

def test_envelope_examples(dual_numbers):
    k = trivial_module(dual_numbers)
    e, iota = injective_envelope(k)
    assert e.dim == 2 == brute_envelope_dim(k)
    kk = direct_sum(k, k)[0]
    assert injective_envelope(kk)[0].dim == 4 == brute_envelope_dim(kk)
    lam = regular_module(dual_numbers)
    e, iota = injective_envelope(lam)
    assert e.dim == 2 and iota.is_injective()


def test_envelope_matches_search_on_klein(klein):
    k = trivial_module(klein)
    assert injective_envelope(k)[0].dim == brute_envelope_dim(k) == 4


def test_is_injective_examples(dual_numbers, t2):
    assert is_injective(regular_module(dual_numbers))
    assert not is_injective(trivial_module(dual_numbers))
    assert is_injective(zero_module(dual_numbers))
    assert not is_injective(regular_module(t2))
    assert is_injective(cogenerator(t2))


def test_projective_cover_examples(dual_numbers):
    k = trivial_module(dual_numbers)
    p, pi = projective_cover(k)
    assert p.dim == 2 and pi.is_surjective() and pi.is_homomorphism()
    ker = kernel(pi)[0]
    assert ker.dim == 1 and np.array_equal(ker.action, k.action)
    lam = regular_module(dual_numbers)
    assert projective_cover(lam)[0].dim == 2


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS + ["T2@F2", "T3@Q"])
def test_envelope_invariants_on_corpus(name):
    a = preset(name)
    F = a.field
    for m in module_corpus(a, 8, seed=11):
        e, iota = injective_envelope(m)
        assert iota.is_injective() and iota.is_homomorphism()
        assert is_injective(e)
        soc_e = socle_rows(e)
        assert socle_rows(m).shape[0] == soc_e.shape[0]
        assert all(F.in_span(iota.matrix, v) for v in soc_e)
        p, pi = projective_cover(m)
        assert pi.is_surjective() and pi.is_homomorphism()


# -- stable Hom and (co)syzygies -----------------------------------------------------

def test_stable_hom_examples(dual_numbers):
    k, lam = trivial_module(dual_numbers), regular_module(dual_numbers)
    assert stable_hom(k, k).dim == 1
    assert stable_hom(lam, k).dim == 0
    f = base_field(F2)
    assert stable_hom(regular_module(f), regular_module(f)).dim == 0


@pytest.mark.parametrize("name", ["kV4@F2", "kC3@F3", "exterior(2)@F2"])
def test_stable_hom_zero_from_injectives(name):
    a = preset(name)
    for m in module_corpus(a, 6, seed=5):
        assert stable_hom(regular_module(a), m).dim == 0


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS)
def test_injective_iff_stably_zero(name):
    a = preset(name)
    for m in module_corpus(a, 8, seed=2):
        assert is_injective(m) == (stable_hom(m, m).dim == 0)


@given(st.sampled_from(["k[t]/t^2@F2", "kV4@F2", "kC3@F3"]), st.integers(0, 10**6))
def test_stable_hom_ignores_injective_summands(name, seed):
    a = preset(name)
    m, n = random_module(a, seed, 4), random_module(a, seed + 7, 4)
    e = cogenerator(a)
    base = stable_hom(m, n).dim
    assert stable_hom(direct_sum(m, e)[0], n).dim == base
    assert stable_hom(m, direct_sum(n, e)[0]).dim == base


def test_syzygy_examples(dual_numbers, klein):
    k = trivial_module(dual_numbers)
    assert np.array_equal(cosyzygy(k).action, k.action)
    assert cosyzygy(regular_module(dual_numbers)).dim == 0
    assert syzygy(trivial_module(klein)).dim == 3


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS)
def test_sigma_omega_inverse_stably(name):
    a = preset(name)
    for m in module_corpus(a, 6, seed=9):
        assert stable_iso_witness(cosyzygy(syzygy(m)), m) is not None
        assert stable_iso_witness(syzygy(cosyzygy(m)), m) is not None


# -- complements in semisimple modules ---------------------------------------------------

@pytest.mark.parametrize("name", ["T3@Q", "T3@F3", "kV4@F2", "exterior(2)@F2"])
@given(seed=st.integers(0, 10**6))
def test_module_complement_in_semisimple(name, seed):
    a = preset(name)
    F = a.field
    m = random_module(a, seed, max_dim=3)
    c, _ = coinduced(m)
    n_mod, _ = submodule(c, socle_rows(c))
    rng = np.random.default_rng(seed)
    t = generated_submodule(n_mod, F.random(rng, int(rng.integers(0, 3)), n_mod.dim))
    for comp in (_module_complement(n_mod, t), _complement_by_retraction(n_mod, t)):
        assert comp.shape[0] + t.shape[0] == n_mod.dim
        assert F.rank(np.concatenate([comp, t])) == n_mod.dim
        if comp.shape[0]:
            assert np.array_equal(generated_submodule(n_mod, comp), F.row_basis(comp))
