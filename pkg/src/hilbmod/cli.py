"""Command-line front end.

Every command produces a report with the keys ``command, inputs, verdicts,
residuals, witnesses, results, seed, ok``.  Predicates (classify-ideal,
check-hom, check-blockwise, check-extension) answer yes or no and are ``ok``
whenever their independent routes agree.  Constructions (quotient,
extend-hom, split) are ``ok`` only when the object was built and certified.
Exit status is 0 when ``ok``, 1 on a verdict failure and 2 for unusable input.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from .core import HilbmodError, RankAmbiguityError, RefusalError, StructuralError, VerificationError
from .extensions import (
    busby_trivial_witness,
    construct_splitting,
    diagonal_extensions,
    to_blockwise_extension,
    verify_short_exact,
)
from .fdcstar import BlockIdeal
from .fixtures import FIXTURES, load_fixture
from .ideals import classify, corollary_check, supplement_correspondences
from .linking import LinkingAlgebra, check_blockwise, extend_to_blockwise, is_ternary_hom
from .probes import SearchConfig, hereditary_search, q1_search
from .quotient import is_generalized_isometry, quotient_module
from .sampling import Bounds
from .scene import Scene, SceneError, encode_element, encode_matrix, load_scene

COMMANDS = ("classify-ideal", "correspondences", "quotient", "check-hom", "extend-hom",
            "check-extension", "split", "search-hereditary", "search-q1", "check-blockwise")
SCENELESS = ("search-hereditary", "search-q1")


class InputError(HilbmodError):
    """Unusable command-line input (exit status 2)."""


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _element(x) -> dict:
    return {"space": repr(x.parent), "blocks": encode_element(x.parent, x.vec)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_jsonable(v) for v in obj)
    if isinstance(obj, BlockIdeal):
        return sorted(obj.blocks)
    if hasattr(obj, "vec") and hasattr(obj, "parent"):
        return _element(obj)
    if isinstance(obj, np.ndarray):
        return encode_matrix(obj.reshape(1, -1))[0] if obj.ndim == 1 else encode_matrix(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return None if math.isnan(float(obj)) else float(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def _report(command, inputs, verdicts, residuals=None, witnesses=None, results=None, seed=None, ok=True):
    return {
        "command": command,
        "inputs": inputs,
        "verdicts": verdicts,
        "residuals": residuals or {},
        "witnesses": witnesses or {},
        "results": results or {},
        "seed": seed,
        "ok": bool(ok),
    }


def _pick(scene: Scene, section: str, name: str | None) -> str:
    names = list(getattr(scene, section))
    if name is None:
        if not names:
            raise InputError(f"scene has no {section}")
        return names[0]
    if name not in names:
        raise InputError(f"no entry '{name}' in {section}; available: {names}")
    return name


# -- commands ----------------------------------------------------------------


def cmd_classify(scene: Scene, args) -> dict:
    name = _pick(scene, "subspaces", args.subspace)
    k = scene.subspace(name, args.tol)
    try:
        cls = classify(k, args.tol)
    except VerificationError as exc:
        return _report("classify-ideal", {"subspace": name}, {"agreement": False},
                       results={"error": str(exc), "flags": exc.report}, ok=False)
    one = corollary_check(k, args.tol)
    verdicts = {
        "submodule": cls.is_submodule,
        "ternary_subspace": cls.is_ternary_subspace,
        "ternary_ideal": cls.is_ternary_ideal,
        "ideal_submodule": cls.is_ideal_submodule,
        "linking_ideal": cls.is_linking_ideal,
        "left_condition": bool(one.left),
        "right_condition": bool(one.right),
        "agreement": True,
    }
    results = {
        "dim": k.dim,
        "module": repr(k.parent),
        "ideal": cls.ideal_submodule_witness,
        "minimal_ideal": cls.minimal_ideal,
    }
    return _report("classify-ideal", {"subspace": name}, verdicts, cls.residuals, cls.witnesses, results)


def cmd_correspondences(scene: Scene, args) -> dict:
    name = _pick(scene, "modules", args.module)
    table = supplement_correspondences(scene.modules[name], args.tol)
    rows = [
        {"ideal": r.ideal, "submodule": r.submodule, "compact_ideal": r.compact_ideal,
         "linking_ideal": r.linking_ideal, "checks": r.checks}
        for r in table.rows
    ]
    results = {
        "rows": rows,
        "reduced_linking_ideals": table.reduced_linking_ideals,
        "full_linking_ideals": table.full_linking_ideals,
        "distinct_submodules_from_all_base_ideals": table.distinct_from_base,
        "failures": [list(map(str, f)) for f in table.failures],
    }
    verdicts = {"bijections": table.ok, "count": len(table.rows)}
    return _report("correspondences", {"module": name}, verdicts, results=results, ok=table.ok)


def cmd_quotient(scene: Scene, args) -> dict:
    name = _pick(scene, "subspaces", args.subspace)
    k = scene.subspace(name, args.tol)
    if not hasattr(k.parent, "multiplicities"):
        raise InputError(f"subspace '{name}' does not live in a module")
    ideal = None
    if args.ideal is not None:
        ideal = BlockIdeal(k.parent.base, frozenset(args.ideal))
    try:
        rep = quotient_module(k.parent, k, ideal, args.tol)
    except RefusalError as exc:
        cls = exc.report
        verdicts = {"ternary_ideal": False}
        if cls is not None:
            verdicts.update(submodule=cls.is_submodule, ideal_submodule=cls.is_ideal_submodule,
                            linking_ideal=cls.is_linking_ideal)
        return _report("quotient", {"subspace": name}, verdicts, witnesses=getattr(cls, "witnesses", {}),
                       results={"refusal": str(exc)}, ok=False)

    def describe(q):
        return {
            "ideal": q.ideal,
            "quotient_base": list(q.quotient_module.base.block_dims),
            "quotient_multiplicities": list(q.quotient_module.multiplicities),
            "kept_blocks": list(q.kept),
            "v": q.v.matrix,
        }

    results = {"canonical": describe(rep.canonical)}
    residuals = {"phi_isometry": rep.canonical.isometry_residual, "ternary": rep.canonical.v.residual}
    if rep.alternative is not None:
        results["alternative"] = describe(rep.alternative)
        residuals["phi_isometry_alternative"] = rep.alternative.isometry_residual
    verdicts = {"ternary_ideal": True, "kernel_is_K": rep.canonical.kernel_ok,
                "phi_isometry": rep.canonical.isometry_residual <= args.tol}
    return _report("quotient", {"subspace": name, "ideal": args.ideal}, verdicts, residuals, results=results,
                   ok=all(verdicts.values()))


def _module_map(scene: Scene, name: str):
    src, tgt = scene.map_ends(name)
    v = scene.linear_map(name)
    if not (src in scene.modules and tgt in scene.modules):
        raise InputError(f"map '{name}' must go between modules")
    return v


def cmd_check_hom(scene: Scene, args) -> dict:
    name = _pick(scene, "maps", args.map)
    v = _module_map(scene, name)
    chk = is_ternary_hom(v, args.tol)
    gen = is_generalized_isometry(v, args.tol) if chk else None
    verdicts = {"ternary_hom": bool(chk)}
    results = {}
    if gen is not None:
        verdicts["generalized_isometry"] = bool(gen)
        verdicts["norm_preserving"] = bool(gen.faithful) if gen else False
        if gen:
            results["phi"] = gen.phi.matrix
    return _report("check-hom", {"map": name}, verdicts, {"ternary": chk.residual}, results=results)


def cmd_extend_hom(scene: Scene, args) -> dict:
    name = _pick(scene, "maps", args.map)
    v = _module_map(scene, name)
    ext = extend_to_blockwise(v, reduced=not args.full, tol=args.tol)
    blockwise = check_blockwise(ext.assembled, ext.source, ext.target, args.tol)
    results = {
        "source_carrier": list(ext.source.carrier.block_dims),
        "target_carrier": list(ext.target.carrier.block_dims),
        "phi": ext.phi.matrix,
        "psi": ext.psi.matrix,
    }
    verdicts = {"extends": True, "blockwise": bool(blockwise), "reduced": not args.full}
    return _report("extend-hom", {"map": name, "full": args.full}, verdicts, ext.residuals, results=results,
                   ok=bool(blockwise))


def cmd_check_extension(scene: Scene, args) -> dict:
    name = _pick(scene, "sequences", args.sequence)
    seq = scene.sequence(name)
    rep = verify_short_exact(seq, args.tol)
    verdicts = {"exact": rep.ok, **{f"sequence_{k}": v for k, v in rep.checks.items()}}
    residuals = dict(rep.residuals)
    results = {}
    if rep.ok:
        bw = to_blockwise_extension(seq, args.tol)
        ranges, compacts = diagonal_extensions(seq, args.tol)
        verdicts.update(blockwise_exact=bw.report.ok, range_sequence_exact=ranges.report.ok,
                        compact_sequence_exact=compacts.report.ok)
        residuals.update({f"round_trip_{k}": v for k, v in bw.round_trip.items()})
        results = {
            "linking_algebras": [list(bw.psi.source.carrier.block_dims), list(bw.psi.target.carrier.block_dims),
                                 list(bw.phi.target.carrier.block_dims)],
            "range_sequence": [list(a.block_dims) for a in ranges.algebras],
            "compact_sequence": [list(a.block_dims) for a in compacts.algebras],
        }
    return _report("check-extension", {"sequence": name}, verdicts, residuals, rep.witnesses, results)


def cmd_split(scene: Scene, args) -> dict:
    name = _pick(scene, "sequences", args.sequence)
    seq = scene.sequence(name)
    split = construct_splitting(seq, args.tol)
    busby = busby_trivial_witness(seq, args.tol)
    residuals = {"u_s_minus_id": split.residual, "s_ternary": split.s.residual, **busby.residuals}
    results = {"s": split.s.matrix, "w": busby.w.matrix, "range_blocks": busby.range_blocks}
    verdicts = {"split": True, "s_ternary": split.s.verified, "w_ternary_iso": busby.w.verified}
    return _report("split", {"sequence": name}, verdicts, residuals, results=results, ok=all(verdicts.values()))


def cmd_check_blockwise(scene: Scene, args) -> dict:
    name = _pick(scene, "maps", args.map)
    src, tgt = scene.map_ends(name)
    if not (isinstance(src, tuple) and isinstance(tgt, tuple)):
        raise InputError(f"map '{name}' must act between linking algebras")
    ls = LinkingAlgebra(scene.modules[src[1]], src[2])
    lt = LinkingAlgebra(scene.modules[tgt[1]], tgt[2])
    chk = check_blockwise(scene.linear_map(name), ls, lt, args.tol)
    witnesses = {}
    if not chk:
        corner, leak = chk.witness
        witnesses["corner"] = {"corner": list(corner), "leak": leak}
    return _report("check-blockwise", {"map": name}, {"blockwise": bool(chk)}, {"leak": chk.residual}, witnesses)


def _search_config(args) -> SearchConfig:
    bounds = Bounds(*args.bounds) if args.bounds else Bounds(2, 2, 2)
    return SearchConfig(count=args.count, bounds=bounds, seed=args.seed or 0, workers=args.workers,
                        tol=args.tol)


def cmd_search_hereditary(scene, args) -> dict:
    cfg = _search_config(args)
    rep = hereditary_search(cfg)
    verdicts = {"implications_hold": rep["ok"], "discrepancy_count": rep["discrepancy_count"]}
    return _report("search-hereditary", cfg.to_json(), verdicts, results=rep, seed=cfg.seed, ok=rep["ok"])


def cmd_search_q1(scene, args) -> dict:
    cfg = _search_config(args)
    rep = q1_search(cfg)
    return _report("search-q1", cfg.to_json(), {"completed": True}, results=rep, seed=cfg.seed, ok=rep["ok"])


HANDLERS = {
    "classify-ideal": cmd_classify,
    "correspondences": cmd_correspondences,
    "quotient": cmd_quotient,
    "check-hom": cmd_check_hom,
    "extend-hom": cmd_extend_hom,
    "check-extension": cmd_check_extension,
    "split": cmd_split,
    "search-hereditary": cmd_search_hereditary,
    "search-q1": cmd_search_q1,
    "check-blockwise": cmd_check_blockwise,
}


def run_command(scene: Scene | None, command: str, args) -> dict:
    if command not in HANDLERS:
        raise InputError(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
    if args.tol is None:
        args.tol = scene.tol if scene is not None else 1e-9
    if args.seed is None and scene is not None:
        args.seed = scene.seed
    report = HANDLERS[command](scene, args)
    if report["seed"] is None:
        report["seed"] = args.seed
    return _jsonable(report)


# -- text rendering ----------------------------------------------------------


def render_text(report: dict) -> str:
    cmd, v = report["command"], report["verdicts"]
    lines = []
    if cmd == "classify-ideal" and "submodule" in v:
        lines.append(
            f"submodule: {_yes(v['submodule'])}; ternary ideal: {_yes(v['ternary_ideal'])}; "
            f"ideal submodule: {_yes(v['ideal_submodule'])}; linking ideal: {_yes(v['linking_ideal'])}"
        )
        lines.append(f"ternary subspace: {_yes(v['ternary_subspace'])}; "
                     f"left condition: {_yes(v['left_condition'])}; right condition: {_yes(v['right_condition'])}")
        if report["results"].get("ideal") is not None:
            lines.append(f"ideal (0-based blocks): {report['results']['ideal']}")
    elif cmd == "quotient" and "canonical" in report["results"]:
        c = report["results"]["canonical"]
        lines.append(f"quotient base: M{' + M'.join(map(str, c['quotient_base'])) if c['quotient_base'] else '0'}; "
                     f"multiplicities: {c['quotient_multiplicities']}; divided ideal: {c['ideal']}")
    else:
        for key, val in v.items():
            lines.append(f"{key.replace('_', ' ')}: {_yes(val) if isinstance(val, bool) else val}")
    for key, val in report["residuals"].items():
        lines.append(f"residual {key}: {val if val is None else f'{val:.3e}'}")
    for key in report["witnesses"]:
        lines.append(f"witness {key}: {json.dumps(report['witnesses'][key])}")
    if cmd == "split":
        lines.append(f"splitting matrix s: {json.dumps(report['results']['s'])}")
    if cmd.startswith("search-"):
        lines.append(json.dumps(report["results"], sort_keys=True, indent=1))
    lines.append(f"ok: {_yes(report['ok'])}")
    return "\n".join(lines)


def _bounds(text: str):
    try:
        vals = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("bounds must be three integers r,n,m") from None
    if len(vals) != 3 or min(vals) < 1:
        raise argparse.ArgumentTypeError("bounds must be three positive integers r,n,m")
    return vals


def _blocks(text: str):
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated block indices") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hilbmod", description="Ideals, homomorphisms and extensions of "
                                "finite-dimensional Hilbert modules.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--scene", help=f"scene file or shipped fixture ({', '.join(FIXTURES)})")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--bounds", type=_bounds, default=None, help="max blocks, block size, multiplicity: r,n,m")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--subspace")
    p.add_argument("--module")
    p.add_argument("--map")
    p.add_argument("--sequence")
    p.add_argument("--ideal", type=_blocks, default=None, help="larger ideal for quotient, 0-based blocks")
    p.add_argument("--full", action="store_true", help="extend to full (not reduced) linking algebras")
    return p


def _load(name: str) -> Scene:
    if name in FIXTURES and not Path(name).exists():
        return load_fixture(name)
    return load_scene(name)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        scene = None
        if args.command not in SCENELESS:
            if not args.scene:
                raise InputError(f"{args.command} needs --scene")
            scene = _load(args.scene)
        if args.tol is not None and not args.tol > 0:
            raise InputError("--tol must be positive")
        report = run_command(scene, args.command, args)
    except (SceneError, InputError, StructuralError, RankAmbiguityError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RefusalError, VerificationError) as exc:
        print(f"verdict failure: {exc}", file=sys.stderr)
        return 1
    if args.format == "structured":
        print(json.dumps(report, sort_keys=True))
    else:
        print(render_text(report))
    return 0 if report["ok"] else 1


if __name__ == "__main__":
    sys.exit(main())
