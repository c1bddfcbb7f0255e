"""JSON loading and deterministic dumping for algebras, modules and complexes."""

from __future__ import annotations

import json
import os
from fractions import Fraction
from pathlib import Path

import numpy as np

from .algebra import Algebra, algebra_from_json, preset
from .exactla import same_field
from .complexes import ChainComplex, complex_from_terms
from .modrep import (
    Module,
    ModuleError,
    cogenerator,
    module_from_json,
    regular_module,
    trivial_module,
)

SCHEMA = 1


class InputError(ValueError):
    """Malformed or inconsistent input file."""


def read_json(path: str | os.PathLike) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def load_algebra(source: str | dict) -> Algebra:
    """From an inline JSON object, a file path, or a preset name.

    Output of the ``preset`` command (the algebra wrapped with a schema tag) is accepted as well.
    """
    if isinstance(source, str):
        if not os.path.exists(source):
            return preset(source)
        source = read_json(source)
    if not isinstance(source, dict):
        raise InputError("algebra JSON must be an object")
    if "field" not in source and isinstance(source.get("algebra"), dict):
        source = source["algebra"]
    try:
        return algebra_from_json(source)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed algebra JSON: {exc!r}") from exc


def named_module(a: Algebra, name: str) -> Module | None:
    if name == "k":
        if a.augmentation is None:
            raise ModuleError("module 'k' needs an augmentation on the algebra")
        return trivial_module(a)
    if name in ("Lambda", "A", "regular"):
        return regular_module(a)
    if name in ("E", "D(Lambda)", "cogenerator"):
        return cogenerator(a)
    return None


def load_module(a: Algebra, source: str | dict, base_dir: str | None = None) -> Module:
    """A named module (``k``, ``Lambda``, ``E``) or a module JSON object/file.

    A file's ``algebra`` entry, when present, must describe the same algebra as ``a``.
    """
    if isinstance(source, str):
        m = named_module(a, source)
        if m is not None:
            return m
        base_dir = base_dir or str(Path(source).parent)
        obj = read_json(source)
    else:
        obj = source
    alg_ref = obj.get("algebra")
    if alg_ref is not None:
        if isinstance(alg_ref, str) and base_dir and not os.path.isabs(alg_ref) and os.path.exists(os.path.join(base_dir, alg_ref)):
            alg_ref = os.path.join(base_dir, alg_ref)
        other = load_algebra(alg_ref)
        if not same_algebra(a, other):
            raise InputError("module file refers to a different algebra")
    if "dim" not in obj or "action" not in obj:
        raise InputError("module JSON needs 'dim' and 'action'")
    try:
        return module_from_json(a, obj)
    except (KeyError, TypeError, IndexError) as exc:
        raise InputError(f"malformed module JSON: {exc!r}") from exc


def same_algebra(a: Algebra, b: Algebra) -> bool:
    return (
        same_field(a.field, b.field)
        and a.dim == b.dim
        and np.array_equal(a.mult, b.mult)
        and np.array_equal(a.unit, b.unit)
    )


def load_complex(a: Algebra, source: str | dict) -> ChainComplex:
    """``{"terms": {deg: module}, "diffs": {deg: matrix}}``; the window is the set of listed terms."""
    obj = read_json(source) if isinstance(source, str) else source
    if "terms" not in obj:
        raise InputError("complex JSON needs 'terms'")
    F = a.field
    terms = {int(n): load_module(a, m) for n, m in obj["terms"].items()}
    diffs = {}
    for n, mat in obj.get("diffs", {}).items():
        n = int(n)
        rows, cols = terms.get(n), terms.get(n + 1)
        if rows is None or cols is None:
            raise InputError(f"differential {n} has no source or target term")
        arr = np.asarray(mat, dtype=object).reshape(rows.dim, cols.dim)
        diffs[n] = F.array(arr) if arr.size else F.zeros(rows.dim, cols.dim)
    x = complex_from_terms(a, terms, diffs, obj.get("name", ""))
    if x.bounded and x.lo <= x.hi:
        x.check()
    return x


def matrix_to_json(F, m: np.ndarray) -> list:
    return [[F.scalar_to_json(x) for x in row] for row in np.asarray(m)]


def envelope(payload: dict, **meta) -> dict:
    """Attach the schema version and any metadata (window, regime) to a result."""
    out = {"schema": SCHEMA}
    out.update(meta)
    out.update(payload)
    return out


def dumps(obj) -> str:
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def _plain(obj):
    # numpy scalars and tuples into JSON-native values
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else str(obj)
    return obj
