"""Batch command-line front end.

Exit status: 0 on success, 1 on domain errors (bad input, unsupported
algebra), 2 when independent computations disagree or a verification
check fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from typing import Callable

import numpy as np

from . import __version__
from .algebra import PRESET_HELP, AlgebraError
from .complexes import (
    ChainMap,
    ComplexError,
    hom_cohomology,
    is_minimal_at,
    is_null_homotopic,
    minimal_decomposition,
)
from .corpus import module_corpus, random_ses
from .exactla import FieldMismatchError
from .modrep import ModuleError, ShortExactSequence, generated_submodule, quotient, stable_hom, submodule
from .resolutions import (
    SELF_INJECTIVE,
    LiftError,
    UnsupportedAlgebraError,
    complete_resolution,
    detect_regime,
    injective_resolution,
    projective_resolution,
)
from .serialize import (
    InputError,
    dumps,
    envelope,
    load_algebra,
    load_complex,
    load_module,
    matrix_to_json,
    read_json,
)
from .stable import (
    ConsistencyError,
    Report,
    approximation,
    ext_group,
    hopf_report,
    invertible_class,
    les_check,
    routes_available,
    tate_cohomology,
    tate_ring,
)


class CheckFailure(Exception):
    """Raised after output is written when a report contains a failed check."""


# -- helpers ----------------------------------------------------------------------------


def _algebra(args):
    src = args.algebra if args.algebra else args.preset
    if src is None:
        raise InputError("give --preset NAME or --algebra FILE")
    return load_algebra(src)


def _provider(args, a):
    return detect_regime(a, args.cutoff)


def _window(args) -> tuple[int, int]:
    lo, hi = args.window
    if lo > hi:
        raise InputError(f"empty window [{lo}, {hi}]")
    return lo, hi


def _meta(args, a, window=None) -> dict:
    p = _provider(args, a)
    out = {"regime": p.regime, "algebra": a.name or (args.preset or args.algebra)}
    if window is not None:
        out["window"] = list(window)
    return out


def _table_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def _emit(args, payload: dict, table: list[dict] | None = None, columns: list[str] | None = None) -> None:
    if args.format == "csv":
        if table is None:
            raise InputError(f"command {args.command!r} has no dimension table for CSV output")
        meta = {"regime": payload.get("regime"), "window_lo": None, "window_hi": None}
        if payload.get("window") is not None:
            meta["window_lo"], meta["window_hi"] = payload["window"]
        rows = [dict(r, **meta) for r in table]
        text = _table_csv(rows, list(columns) + ["regime", "window_lo", "window_hi"])
    else:
        text = dumps(payload)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _finish(args, report_like: dict, passed: bool, table=None, columns=None) -> None:
    _emit(args, report_like, table, columns)
    if not passed:
        raise CheckFailure("one or more checks failed")


# -- commands ---------------------------------------------------------------------------


def cmd_preset(args) -> None:
    if args.list:
        _emit(args, envelope({"presets": PRESET_HELP}))
        return
    a = load_algebra(args.name)
    _emit(args, envelope({"algebra": a.to_json()}, regime=detect_regime(a, args.cutoff).regime))


def cmd_regime(args) -> None:
    a = _algebra(args)
    p = _provider(args, a)
    if args.format == "json":
        _emit(args, envelope({"regime": p.regime, "detail": p.detail, "cutoff": p.cutoff}))
    else:
        _emit(args, envelope({"regime": p.regime}), [{"cutoff": p.cutoff}], ["cutoff"])


def cmd_resolve(args) -> None:
    a = _algebra(args)
    m = load_module(a, args.module)
    lo, hi = _window(args)
    if args.kind == "injective":
        res = injective_resolution(m)
    elif args.kind == "projective":
        res = projective_resolution(m)
    else:
        p = _provider(args, a)
        p.require()
        res = complete_resolution(m, p)
    x = res.complex
    dims = x.dims(lo, hi)
    payload = envelope({"kind": args.kind, "dims": dims, "complex": x.to_json(lo, hi)}, **_meta(args, a, (lo, hi)))
    _emit(args, payload, [{"degree": n, "dim": d} for n, d in dims.items()], ["degree", "dim"])


def _routes(args, a) -> list[str] | None:
    if args.routes == "all":
        return None
    return [r.strip() for r in args.routes.split(",") if r.strip()]


def cmd_tate(args) -> None:
    a = _algebra(args)
    p = _provider(args, a)
    p.require()
    src, tgt = load_module(a, args.source), load_module(a, args.target)
    lo, hi = _window(args)
    routes = _routes(args, a)
    table = []
    for n in range(lo, hi + 1):
        g = tate_cohomology(src, tgt, n, p, routes)
        table.append({"degree": n, "dim": g.dim, "routes": g.routes})
    payload = envelope({"dims": {r["degree"]: r["dim"] for r in table},
                        "routes": routes if routes is not None else routes_available(src),
                        "table": table}, **_meta(args, a, (lo, hi)))
    _emit(args, payload, table, ["degree", "dim"])


def cmd_ext(args) -> None:
    a = _algebra(args)
    src, tgt = load_module(a, args.source), load_module(a, args.target)
    lo, hi = _window(args)
    if lo < 0:
        raise InputError("ordinary Ext needs a window inside n >= 0")
    table = [{"degree": n, "dim": ext_group(src, tgt, n, cross_check=True)} for n in range(lo, hi + 1)]
    payload = envelope({"dims": {r["degree"]: r["dim"] for r in table}}, **_meta(args, a, (lo, hi)))
    _emit(args, payload, table, ["degree", "dim"])


def cmd_stable_hom(args) -> None:
    a = _algebra(args)
    src, tgt = load_module(a, args.source), load_module(a, args.target)
    sh = stable_hom(src, tgt)
    payload = envelope({
        "dim": sh.dim,
        "hom_dim": sh.homs.dim,
        "representatives": [matrix_to_json(a.field, r.matrix) for r in sh.reps()],
    }, **_meta(args, a))
    _emit(args, payload, [{"dim": sh.dim, "hom_dim": sh.homs.dim}], ["dim", "hom_dim"])


def cmd_ring(args) -> None:
    a = _algebra(args)
    p = _provider(args, a)
    p.require()
    lo, hi = _window(args)
    F = a.field
    ring = tate_ring(p, lo, hi)
    inverses = {}
    for n in range(max(lo, -hi), min(hi, -lo) + 1):
        if n == 0 or ring.dims.get(n, 0) == 0:
            continue
        found = []
        for j in range(ring.dims[n]):
            y = invertible_class(ring, n, F.eye(ring.dims[n])[j], F)
            found.append(None if y is None else [F.scalar_to_json(v) for v in y])
        inverses[n] = found
    body = ring.to_json(F)
    body["inverses"] = inverses
    payload = envelope(body, **_meta(args, a, (lo, hi)))
    table = [{"degree": n, "dim": d} for n, d in ring.dims.items()]
    _finish(args, payload, all(c.passed for c in ring.checks), table, ["degree", "dim"])


def cmd_approximate(args) -> None:
    a = _algebra(args)
    m = load_module(a, args.module)
    pair = approximation(m, _provider(args, a), window=args.width)
    rep = pair.report
    payload = envelope(rep.to_json(), **_meta(args, a, rep.window))
    table = [{"name": k, "dim": v} for k, v in rep.dims.items()]
    _finish(args, payload, rep.passed, table, ["name", "dim"])


def cmd_minimize(args) -> None:
    a = _algebra(args)
    x = load_complex(a, args.complex)
    if not x.bounded or x.lo > x.hi:
        payload = envelope({"minimal": {}, "contractible": {}, "checks": []}, **_meta(args, a, None))
        _emit(args, payload, [], ["degree", "input", "minimal", "contractible"])
        return
    lo, hi = (x.lo, x.hi) if args.window is None else _window(args)
    rng = np.random.default_rng(args.seed) if args.seed is not None else None
    md = minimal_decomposition(x, (lo, hi), rng)
    rep = Report("minimize", (lo, hi))
    rep.add("reassembly", md.check_reassembly(lo, hi + 1))
    rep.add("minimal part minimal", all(is_minimal_at(md.minimal, n) for n in range(lo, hi + 1)))
    rep.add("contractible part null-homotopic", is_null_homotopic(ChainMap.identity(md.contractible)) is not None)
    table = [{"degree": n, "input": x.term(n).dim, "minimal": md.minimal.term(n).dim,
              "contractible": md.contractible.term(n).dim} for n in range(lo, hi + 1)]
    body = rep.to_json()
    body["minimal"] = md.minimal.to_json(lo, hi)
    body["contractible"] = md.contractible.to_json(lo, hi)
    body["table"] = table
    _finish(args, envelope(body, **_meta(args, a, (lo, hi))), rep.passed, table,
            ["degree", "input", "minimal", "contractible"])


def _load_ses(a, path: str) -> ShortExactSequence:
    obj = read_json(path)
    if "module" not in obj or "generators" not in obj:
        raise InputError("sequence JSON needs 'module' and 'generators'")
    mid = load_module(a, obj["module"])
    gens = np.asarray(obj["generators"], dtype=object).reshape(-1, mid.dim)
    rows = generated_submodule(mid, a.field.array(gens))
    _, inc = submodule(mid, rows)
    _, pi = quotient(mid, rows)
    return ShortExactSequence(inc, pi)


def cmd_les(args) -> None:
    a = _algebra(args)
    p = _provider(args, a)
    p.require()
    c = load_module(a, args.coeff)
    lo, hi = _window(args)
    if args.ses:
        seqs = [_load_ses(a, args.ses)]
    else:
        rng = np.random.default_rng(args.seed)
        seqs = [random_ses(a, rng) for _ in range(args.count)]
    reports = [les_check(s, c, p, (lo, hi)) for s in seqs]
    passed = all(r.passed for r in reports)
    payload = envelope({"sequences": [
        {"dims": [s.left.dim, s.middle.dim, s.right.dim], "passed": r.passed, "report": r.to_json()}
        for s, r in zip(seqs, reports)
    ], "passed": passed}, **_meta(args, a, (lo, hi)))
    table = [{"index": i, "left": s.left.dim, "middle": s.middle.dim, "right": s.right.dim, "passed": r.passed}
             for i, (s, r) in enumerate(zip(seqs, reports))]
    _finish(args, payload, passed, table, ["index", "left", "middle", "right", "passed"])


def cmd_verify(args) -> None:
    """Cross-check the constructions on a small seeded corpus."""
    a = _algebra(args)
    p = _provider(args, a)
    p.require()
    lo, hi = _window(args)
    mods = module_corpus(a, args.count, seed=args.seed)
    rep = Report("verify", (lo, hi), {"modules": [m.dim for m in mods]})
    for i, m in enumerate(mods):
        for j, n in enumerate(mods[:3]):
            for d in range(lo, hi + 1):
                try:
                    g = tate_cohomology(m, n, d, p)
                    rep.add(f"routes agree ({i},{j},{d})", True, g.routes)
                except ConsistencyError as exc:
                    rep.add(f"routes agree ({i},{j},{d})", False, str(exc))
            if p.regime == SELF_INJECTIVE:
                t0 = hom_cohomology(complete_resolution(m, p).complex, complete_resolution(n, p).complex, 0, (-1, 1)).dim
                rep.add(f"H^0 Hom(tA,tB) = stable Hom ({i},{j})", t0 == stable_hom(m, n).dim)
        rep.add(f"approximation ({i})", approximation(m, p).report.passed)
    if p.regime == SELF_INJECTIVE and a.augmentation is not None:
        ring = tate_ring(p, max(lo, -2), min(hi, 2))
        for c in ring.checks:
            rep.add(f"ring {c.name}", c.passed)
        if a.hopf is not None:
            for i, m in enumerate(mods[:3]):
                rep.add(f"hopf ({i})", hopf_report(m, p).passed)
    rng = np.random.default_rng(args.seed)
    for i in range(min(3, args.count)):
        rep.add(f"les ({i})", les_check(random_ses(a, rng), mods[0], p, (max(lo, -2), min(hi, 2))).passed)
    payload = envelope(rep.to_json(), **_meta(args, a, (lo, hi)))
    table = [{"check": c.name, "pass": c.passed} for c in rep.checks]
    _finish(args, payload, rep.passed, table, ["check", "pass"])


# -- parser -----------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, window: tuple[int, int] | None = None, algebra: bool = True) -> None:
    if algebra:
        g = p.add_mutually_exclusive_group()
        g.add_argument("--preset", help=f"preset algebra ({PRESET_HELP})")
        g.add_argument("--algebra", help="algebra JSON file")
    p.add_argument("--cutoff", type=int, default=20, help="resolution length bound for regime detection")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    if window is not None:
        p.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"), default=list(window))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tatecoh", description="Tate cohomology and stable module computations")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preset", help="emit a preset algebra as JSON")
    p.add_argument("name", nargs="?", default="kV4@F2")
    p.add_argument("--list", action="store_true")
    _common(p, algebra=False)
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("regime", help="detect the complete-resolution regime")
    _common(p)
    p.set_defaults(func=cmd_regime)

    p = sub.add_parser("resolve", help="materialize a resolution on a window")
    _common(p, (0, 4))
    p.add_argument("--module", default="k")
    p.add_argument("--kind", choices=("injective", "projective", "complete"), default="injective")
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("tate", help="Tate cohomology dimensions")
    _common(p, (-3, 3))
    p.add_argument("--source", default="k")
    p.add_argument("--target", default="k")
    p.add_argument("--routes", default="all", help="comma list of route1,route2,route3,hopf or 'all'")
    p.set_defaults(func=cmd_tate)

    p = sub.add_parser("ext", help="ordinary Ext dimensions (both resolutions)")
    _common(p, (0, 4))
    p.add_argument("--source", default="k")
    p.add_argument("--target", default="k")
    p.set_defaults(func=cmd_ext)

    p = sub.add_parser("stable-hom", help="stable Hom dimension and representatives")
    _common(p)
    p.add_argument("--source", default="k")
    p.add_argument("--target", default="k")
    p.set_defaults(func=cmd_stable_hom)

    p = sub.add_parser("ring", help="Tate cohomology ring of k")
    _common(p, (-3, 3))
    p.set_defaults(func=cmd_ring)

    p = sub.add_parser("approximate", help="Gorenstein injective approximation sequences")
    _common(p)
    p.add_argument("--module", default="k")
    p.add_argument("--width", type=int, default=3, help="half-width of the certificate window")
    p.set_defaults(func=cmd_approximate)

    p = sub.add_parser("minimize", help="split a bounded complex of injectives")
    _common(p)
    p.add_argument("--complex", required=True, help="complex JSON file")
    p.add_argument("--window", nargs=2, type=int, metavar=("LO", "HI"))
    p.add_argument("--seed", type=int, help="randomize complements and retractions")
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("les", help="check long exact Tate sequences")
    _common(p, (-3, 3))
    p.add_argument("--ses", help="JSON with 'module' and submodule 'generators'")
    p.add_argument("--coeff", default="k")
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_les)

    p = sub.add_parser("verify", help="run the cross-checks on a seeded corpus")
    _common(p, (-2, 2))
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)
    return parser


DOMAIN_ERRORS = (InputError, AlgebraError, ModuleError, UnsupportedAlgebraError, FieldMismatchError, ComplexError)


def _error(kind: str, exc: BaseException) -> None:
    sys.stderr.write(dumps({"schema": 1, "error": kind, "type": type(exc).__name__, "message": str(exc)}))


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler: Callable = args.func
    try:
        handler(args)
    except CheckFailure as exc:
        _error("check_failed", exc)
        return 2
    except (ConsistencyError, LiftError) as exc:
        _error("consistency", exc)
        return 2
    except DOMAIN_ERRORS as exc:
        _error("domain", exc)
        return 1
    except ValueError as exc:
        _error("domain", exc)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
