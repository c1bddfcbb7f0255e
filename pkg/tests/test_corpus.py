import numpy as np
import pytest

from tatecoh.algebra import preset
from tatecoh.corpus import module_corpus, random_injective_complex, random_module, random_ses
from tatecoh.modrep import is_injective

from conftest import FGD_PRESETS, SELF_INJECTIVE_PRESETS


@pytest.mark.parametrize("name", SELF_INJECTIVE_PRESETS + FGD_PRESETS)
def test_corpus_modules_are_valid(name):
    a = preset(name)
    mods = module_corpus(a, 8, seed=0)
    assert len(mods) == 8
    for m in mods:
        m.check()
        assert m.dim > 0


def test_corpus_is_reproducible(klein):
    a = [m.action for m in module_corpus(klein, 8, seed=3)]
    b = [m.action for m in module_corpus(klein, 8, seed=3)]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))


def test_random_module_respects_bound(klein):
    for seed in range(20):
        assert 0 < random_module(klein, seed, 5).dim <= 5


@pytest.mark.parametrize("name", ["kV4@F2", "T3@Q", "kC3@F3"])
def test_random_ses_is_exact(name):
    a = preset(name)
    for seed in range(5):
        random_ses(a, seed).check()


@pytest.mark.parametrize("name", ["k[t]/t^2@F2", "kV4@F2", "kC3@F3", "T2@F2"])
def test_random_injective_complexes(name):
    a = preset(name)
    for seed in range(5):
        x = random_injective_complex(a, seed, max_dim=12)
        x.check()
        for n in range(x.lo, x.hi + 1):
            assert x.term(n).dim <= 12 and is_injective(x.term(n))
