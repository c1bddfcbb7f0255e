"""Exact computations of Tate cohomology, stable Hom and Gorenstein injective approximations
for finite-dimensional algebras."""

__version__ = "0.1.0"

from .algebra import Algebra, make_algebra, preset  # noqa: E402
from .modrep import Module, ModuleHom, injective_envelope, stable_hom  # noqa: E402
from .complexes import ChainComplex, ChainMap, hom_cohomology, minimal_decomposition  # noqa: E402
from .resolutions import complete_resolution, detect_regime, injective_resolution, projective_resolution  # noqa: E402
from .stable import approximation, ext_group, tate_cohomology, tate_ring  # noqa: E402

__all__ = [
    "Algebra", "make_algebra", "preset", "Module", "ModuleHom", "injective_envelope", "stable_hom",
    "ChainComplex", "ChainMap", "hom_cohomology", "minimal_decomposition", "complete_resolution",
    "detect_regime", "injective_resolution", "projective_resolution", "approximation", "ext_group",
    "tate_cohomology", "tate_ring",
]
