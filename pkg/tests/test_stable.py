import pytest

from tatecoh.algebra import exterior_algebra, preset
from tatecoh.complexes import ChainMap, is_null_homotopic
from tatecoh.corpus import module_corpus, random_ses
from tatecoh.exactla import GF, QQ
from tatecoh.modrep import (
    ModuleError,
    ShortExactSequence,
    cogenerator,
    cokernel,
    direct_sum,
    hom_basis,
    injective_envelope,
    is_injective,
    regular_module,
    socle,
    stable_hom,
    stable_iso_witness,
    trivial_module,
)
from tatecoh.resolutions import UnsupportedAlgebraError, detect_regime, splice
from tatecoh.stable import (
    approximation,
    check_replacement_adjunction,
    comparison_map,
    ext_group,
    gorenstein_replacement,
    hopf_report,
    invertible_class,
    les_check,
    stabilize_hopf,
    tate_cohomology,
    tate_ring,
    vanishing_report,
    xclass_member,
    yclass_member,
)

from conftest import FGD_PRESETS, SELF_INJECTIVE_PRESETS

F2 = GF(2)


def dual_numbers_ses(a):
    """0 -> k -> Lambda -> k -> 0 over k[t]/t^2."""
    lam = regular_module(a)
    inc = socle(lam)[1]
    q, pi = cokernel(inc)
    return ShortExactSequence(inc, pi)


# -- Tate groups -------------------------------------------------------------------

def test_dual_numbers_tate_all_ones(dual_numbers):
    k = trivial_module(dual_numbers)
    for n in range(-5, 6):
        g = tate_cohomology(k, k, n)
        assert g.dim == 1 and set(g.routes.values()) == {1}


@pytest.mark.parametrize("name", ["kV4@F2", "kC3@F3"])
def test_injective_argument_gives_zero(name):
    a = preset(name)
    lam = regular_module(a)
    for m in module_corpus(a, 5, seed=1):
        for n in range(-2, 3):
            assert tate_cohomology(lam, m, n).dim == 0
            assert tate_cohomology(m, lam, n).dim == 0


@pytest.mark.parametrize("name", FGD_PRESETS)
def test_fgd_tate_vanishes(name):
    a = preset(name)
    mods = module_corpus(a, 4, seed=0)
    for m in mods:
        for n in (-1, 0, 1):
            assert tate_cohomology(m, mods[-1], n).dim == 0


def test_unknown_route(dual_numbers):
    k = trivial_module(dual_numbers)
    with pytest.raises(ValueError):
        tate_cohomology(k, k, 0, routes=["route9"])


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS)
def test_routes_agree_on_corpus(name):
    a = preset(name)
    mods = module_corpus(a, 4, seed=21, max_dim=4)
    for i, m in enumerate(mods):
        n_mod = mods[(i + 1) % len(mods)]
        for n in range(-2, 3):
            g = tate_cohomology(m, n_mod, n)
            assert len(set(g.routes.values())) == 1


# -- ordinary Ext and comparison -------------------------------------------------------

def test_ext_examples(klein):
    k = trivial_module(klein)
    assert [ext_group(k, k, n) for n in range(0, 5)] == [1, 2, 3, 4, 5]
    for m in module_corpus(klein, 5, seed=3):
        assert ext_group(m, k, 0) == hom_basis(m, k).dim
        assert ext_group(regular_module(klein), m, 1) == 0
    with pytest.raises(ValueError):
        ext_group(k, k, -1)


@pytest.mark.parametrize("name", ["k[t]/t^2@F2", "kV4@F2", "kC3@F3"])
def test_comparison_map(name):
    a = preset(name)
    F = a.field
    mods = module_corpus(a, 5, seed=17, max_dim=4)
    for i, m in enumerate(mods):
        b = mods[(i + 2) % len(mods)]
        for n in range(1, 4):
            c = comparison_map(m, b, n)
            assert c.shape[0] == c.shape[1] and F.rank(c) == c.shape[0]
        c0 = comparison_map(m, b, 0)
        assert (F.rank(c0) if c0.size else 0) == stable_hom(m, b).dim


def test_comparison_examples(dual_numbers):
    k = trivial_module(dual_numbers)
    c = comparison_map(k, k, 0)
    assert c.shape == (1, 1) and F2.rank(c) == 1
    assert comparison_map(k, regular_module(dual_numbers), 1).shape[1] == 0


# -- Gorenstein replacement and approximations ----------------------------------------

@pytest.mark.parametrize("name", ["k[t]/t^2@F2", "kV4@F2", "kC3@F3", "exterior(2)@F2"])
def test_replacement_self_injective(name):
    a = preset(name)
    mods = module_corpus(a, 5, seed=5)
    for m in mods:
        ta, unit = gorenstein_replacement(m)
        assert unit.is_homomorphism()
        assert stable_iso_witness(ta, m) is not None
        assert check_replacement_adjunction(m, mods[:3]).passed
        for n in (-1, 0, 1):
            assert tate_cohomology(ta, mods[1], n).dim == tate_cohomology(m, mods[1], n).dim


def test_replacement_fgd_and_injective(t2, klein):
    for m in module_corpus(t2, 4, seed=2):
        assert gorenstein_replacement(m)[0].dim == 0
    ta, _ = gorenstein_replacement(regular_module(klein))
    assert stable_hom(ta, ta).dim == 0


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS + FGD_PRESETS)
def test_approximation_certificates(name):
    a = preset(name)
    p = detect_regime(a)
    for m in module_corpus(a, 5, seed=12, max_dim=4):
        ap = approximation(m, p)
        assert ap.report.passed, ap.report.to_json()
        assert ap.right.right is m or ap.right.right.dim == m.dim
        assert ap.left.left.dim == m.dim


def test_approximation_over_triangular(t2):
    for m in module_corpus(t2, 5, seed=4):
        ap = approximation(m)
        e = injective_envelope(m)[0]
        assert ap.left.middle.dim == e.dim and is_injective(ap.left.middle)
        assert ap.left.right.dim == e.dim - m.dim


def test_approximation_of_injective_splits(klein):
    e = cogenerator(klein)
    ap = approximation(e)
    assert stable_hom(ap.left.right, ap.left.right).dim == 0
    assert stable_hom(ap.right.left, ap.right.left).dim == 0


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS[:3] + FGD_PRESETS[:1])
def test_x_and_y_meet_in_injectives(name):
    a = preset(name)
    for m in module_corpus(a, 6, seed=14, max_dim=4):
        both = xclass_member(m) and yclass_member(m)
        assert both == is_injective(m)


# -- vanishing criteria ----------------------------------------------------------------

def test_xclass_examples(dual_numbers, t2):
    assert xclass_member(regular_module(dual_numbers))
    assert not xclass_member(trivial_module(dual_numbers))
    assert all(xclass_member(m) for m in module_corpus(t2, 5, seed=3))


@pytest.mark.parametrize("name", ["k[t]/t^2@F2", "kV4@F2", "kC3@F3", "T2@F2"])
def test_vanishing_criteria_agree(name):
    a = preset(name)
    for m in module_corpus(a, 5, seed=6, max_dim=4):
        rep = vanishing_report(m, degrees=(-2, 2))
        assert rep.passed, rep.to_json()


# -- long exact sequences ---------------------------------------------------------------

def test_les_dual_numbers(dual_numbers):
    s = dual_numbers_ses(dual_numbers)
    k = trivial_module(dual_numbers)
    rep = les_check(s, k)
    assert rep.passed
    assert all(v == [1, 0, 1] for key, v in rep.dims.items() if key.startswith("cov"))


def test_les_split_and_injective(klein):
    k = trivial_module(klein)
    m = module_corpus(klein, 5, seed=1)[-1]
    s, incs, projs = direct_sum(k, m)
    split = ShortExactSequence(incs[0], projs[1])
    assert les_check(split, k, window=(-2, 2)).passed
    lam = regular_module(klein)
    s2, i2, p2 = direct_sum(lam, lam)
    rep = les_check(ShortExactSequence(i2[0], p2[1]), k, window=(-2, 2))
    assert rep.passed and all(v == [0, 0, 0] for v in rep.dims.values())


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS + ["T2@F2"])
def test_les_random(name):
    a = preset(name)
    for seed in range(3):
        s = random_ses(a, seed, 4)
        c = module_corpus(a, 4, seed=seed)[-1]
        rep = les_check(s, c, window=(-2, 2))
        assert rep.passed, rep.to_json()


# -- Tate ring -------------------------------------------------------------------------

def test_ring_c2(c2):
    ring = tate_ring(detect_regime(c2), -4, 4)
    assert all(d == 1 for d in ring.dims.values())
    assert all(c.passed for c in ring.checks)
    for n in range(-4, 5):
        assert invertible_class(ring, n, F2.eye(1)[0], F2) is not None


def test_ring_rational_exterior():
    a = exterior_algebra(1, QQ)
    ring = tate_ring(detect_regime(a), -3, 3)
    assert all(d == 1 for d in ring.dims.values())
    assert all(c.passed for c in ring.checks)
    assert invertible_class(ring, 1, QQ.eye(1)[0], QQ) is not None


def test_ring_unsupported(t2):
    with pytest.raises(UnsupportedAlgebraError):
        tate_ring(detect_regime(t2))


# -- Hopf layer ------------------------------------------------------------------------

def test_stabilize_unit_and_regular(klein):
    k = trivial_module(klein)
    t = stabilize_hopf(k)
    assert t.dims(-2, 2) == splice(k).complex.dims(-2, 2)
    tl = stabilize_hopf(regular_module(klein))
    assert is_null_homotopic(ChainMap.identity(tl), (-1, 1)) is not None


def test_stabilize_dimensions(klein):
    tk = splice(trivial_module(klein)).complex
    for m in module_corpus(klein, 5, seed=2):
        t = stabilize_hopf(m)
        assert all(t.term(n).dim == m.dim * tk.term(n).dim for n in range(-2, 3))


@pytest.mark.parametrize("name", ["kC2@F2", "kC3@F3", "exterior(2)@F2"])
def test_hopf_report(name):
    a = preset(name)
    for m in module_corpus(a, 4, seed=7, max_dim=4):
        rep = hopf_report(m)
        assert rep.passed, rep.to_json()


def test_hopf_needs_datum(dual_numbers):
    with pytest.raises(ModuleError):
        stabilize_hopf(trivial_module(dual_numbers))
