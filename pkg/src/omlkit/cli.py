"""Command-line interface.

Exit codes: 0 success, 1 a checked property failed, 2 input error,
3 a resource cap was hit.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Any

from . import __version__, catalog
from .adjunction import (
    PastingError,
    adjunction_check,
    blocks_diagram,
    find_isomorphism,
    paste_colimit,
    probe_base,
    representable,
)
from .formats import Loaded, load, read_source
from .frames import BooleanAlgebra, boolean_algebra, enumerate_blocks, enumerate_boolean_subalgebras, enumerate_frames
from .gluing import check_intersection, pullback, verify_cocycles
from .ks import DEFAULT_CAP, atom_blocks, ks_search, parity_certificate
from .oml import FiniteOML, validate_ortholattice, verify_orthomodularity
from .scenario import BlockScenario, InputError, OrthoposetOnly, RayScenario, load_block_scenario

EXIT_OK, EXIT_PROPERTY, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3


class CapHit(Exception):
    pass


def _require_lattice(src: Loaded) -> FiniteOML:
    if isinstance(src.lattice, OrthoposetOnly):
        raise _NotLattice(src.lattice.reason)
    return src.lattice


class _NotLattice(Exception):
    pass


def _labels(L: FiniteOML, xs) -> list[str]:
    return [L.labels[x] for x in xs]


# commands ------------------------------------------------------------------------


def cmd_validate(args, src: Loaded):
    L = src.lattice
    if isinstance(L, OrthoposetOnly):
        return {"elements": len(L), "lattice": False, "reason": L.reason}, {}, EXIT_PROPERTY
    report = validate_ortholattice(L)
    witness = verify_orthomodularity(L) if report.valid else None
    results = {
        "elements": len(L),
        "lattice": True,
        "ortholattice": {
            "valid": report.valid,
            "violations": [{"axiom": v.axiom, "witness": list(v.witness)} for v in report.violations],
        },
        "orthomodular": {
            "checked": report.valid,
            "ok": report.valid and witness is None,
            "witness": _labels(L, witness) if witness else None,
        },
    }
    ok = report.valid and witness is None
    return results, {}, EXIT_OK if ok else EXIT_PROPERTY


def cmd_blocks(args, src: Loaded):
    L = _require_lattice(src)
    blocks = enumerate_blocks(L)
    subs = enumerate_boolean_subalgebras(L)
    results = {
        "elements": len(L),
        "block_count": len(blocks),
        "blocks": [list(b.algebra.atoms) for b in blocks],
        "subalgebra_count": len(subs),
    }
    return results, {}, EXIT_OK


def _probe_algebra(probe: str) -> BooleanAlgebra:
    if probe.isdigit():
        n = int(probe)
        if n < 1:
            raise InputError("--probe size must be at least 1")
        return boolean_algebra(n)
    name, text = read_source(probe)
    S = load_block_scenario(text, name)
    if len(S.blocks) != 1:
        raise InputError("a probe block file must contain exactly one block", source=name)
    return BooleanAlgebra(f"B{1 << len(S.blocks[0])}", S.blocks[0])


def cmd_frames(args, src: Loaded):
    L = _require_lattice(src)
    B = _probe_algebra(args.probe)
    frames = enumerate_frames(B, L)
    results = {
        "probe": {"name": B.name, "atoms": list(B.atoms)},
        "frame_count": len(frames),
        "injective_count": sum(f.injective for f in frames),
        "frames": [
            {"images": _labels(L, f.images), "injective": f.injective} for f in frames
        ],
    }
    return results, {}, EXIT_OK


def cmd_glue(args, src: Loaded):
    L = _require_lattice(src)
    frames = [b.frame for b in enumerate_blocks(L)]
    pairs = []
    all_ok = True
    for i in range(len(frames)):
        for j in range(i + 1, len(frames)):
            pb = pullback(frames[i], frames[j])
            inter = check_intersection(frames[i], frames[j])
            all_ok &= inter
            pairs.append({
                "blocks": [i, j],
                "carrier_size": len(pb.carrier),
                "overlap": sorted(_labels(L, pb.image_in_target())),
                "intersection_law": inter,
            })
    rep = verify_cocycles(frames)
    all_ok &= rep.ok
    results = {
        "blocks": [list(f.source.atoms) for f in frames],
        "pullbacks": pairs,
        "cocycles": {
            "identity_law": rep.identity_law,
            "symmetry_law": rep.symmetry_law,
            "triangle_law": rep.triangle_law,
            "pairs": rep.pairs,
            "triples": rep.triples,
            "nontrivial_triples": rep.nontrivial_triples,
        },
    }
    return results, {}, EXIT_OK if all_ok else EXIT_PROPERTY


def cmd_ks(args, src: Loaded):
    S = src.scenario
    if S is None:
        S = atom_blocks(_require_lattice(src))
    res = ks_search(S, enumerate_all=args.all, cap=args.cap, max_nodes=args.max_nodes)
    results: dict[str, Any] = {
        "outcome": res.outcome,
        "variables": len(S.names) if isinstance(S, RayScenario) else len(S.atoms),
        "contexts": len(S.contexts) if isinstance(S, RayScenario) else len(S.blocks),
        "valuation": res.valuation,
        "parity_certificate": parity_certificate(S),
    }
    if isinstance(S, RayScenario):
        results["warnings"] = list(S.warnings)
    if args.all:
        results["solution_count"] = res.solution_count
        results["truncated"] = res.truncated
        results["solutions"] = list(res.solutions)
    stats = {"nodes": res.stats.nodes, "propagations": res.stats.propagations}
    if res.node_cap_hit or res.truncated:
        return results, stats, EXIT_CAP
    if args.expect and res.outcome.lower() != args.expect:
        return results, stats, EXIT_PROPERTY
    return results, stats, EXIT_OK


def _pasted_summary(K):
    return {
        "elements": len(K),
        "labels": list(K.labels),
        "lattice": K.lattice is not None,
        "orthomodular": K.orthomodular,
        "lattice_flag": K.lattice_flag,
        "reason": K.reason,
    }


def cmd_paste(args, src: Loaded):
    L = _require_lattice(src)
    K = paste_colimit(blocks_diagram(L))
    return _pasted_summary(K), {}, EXIT_OK if K.lattice_flag else EXIT_PROPERTY


def cmd_reconstruct(args, src: Loaded):
    L = _require_lattice(src)
    K = paste_colimit(blocks_diagram(L))
    results = {"pasted": _pasted_summary(K)}
    if not K.lattice_flag:
        results.update(status="not isomorphic", invariant=K.reason, isomorphism=None)
        return results, {}, EXIT_PROPERTY
    iso = find_isomorphism(K.lattice, L)
    results["status"] = "isomorphic" if iso.isomorphic else "not isomorphic"
    results["invariant"] = iso.invariant
    results["isomorphism"] = (
        {K.lattice.labels[x]: L.labels[y] for x, y in enumerate(iso.mapping)} if iso.isomorphic else None
    )
    return results, {}, EXIT_OK if iso.isomorphic else EXIT_PROPERTY


def cmd_adjoint(args, src: Loaded):
    L = _require_lattice(src)
    if args.probe:
        B = _probe_algebra(args.probe)
        P = representable(probe_base(B), B)
        diagram = f"representable at {B.name}"
    else:
        P = blocks_diagram(L)
        diagram = "blocks diagram"
    try:
        rep = adjunction_check(P, L)
    except PastingError as e:
        return {"diagram": diagram, "status": str(e)}, {}, EXIT_PROPERTY
    results = {
        "diagram": diagram,
        "base_objects": len(P.base.objects),
        "left_count": rep.left_count,
        "right_count": rep.right_count,
        "bijective": rep.bijective,
        "naturality": dict(sorted(rep.naturality_spot_checks.items())),
        "scope": rep.scope,
    }
    return results, {}, EXIT_OK if rep.ok else EXIT_PROPERTY


COMMANDS = {
    "validate": cmd_validate,
    "blocks": cmd_blocks,
    "frames": cmd_frames,
    "glue": cmd_glue,
    "ks": cmd_ks,
    "paste": cmd_paste,
    "reconstruct": cmd_reconstruct,
    "adjoint": cmd_adjoint,
}


# rendering -----------------------------------------------------------------------


def render_text(report: dict) -> str:
    out = [f"command: {report['command']}", f"version: {report['version']}"]
    for inp in report["inputs"]:
        out.append(f"input: {inp['name']} sha256={inp['sha256']}")
    _render(report["results"], out, 0)
    if report["stats"]:
        out.append("stats:")
        _render(report["stats"], out, 1)
    return "\n".join(out) + "\n"


def _scalar(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v):
        return "[" + ", ".join(_scalar(x) for x in v) + "]"
    if isinstance(v, dict) and all(not isinstance(x, (dict, list)) for x in v.values()) and len(v) > 6:
        return "{" + ", ".join(f"{k}={_scalar(x)}" for k, x in v.items()) + "}"
    return str(v)


def _render(obj, out, depth):
    pad = "  " * depth
    for key, v in obj.items():
        if isinstance(v, dict) and not (all(not isinstance(x, (dict, list)) for x in v.values()) and len(v) > 6):
            out.append(f"{pad}{key}:")
            _render(v, out, depth + 1)
        elif isinstance(v, list) and any(isinstance(x, (dict, list)) for x in v):
            out.append(f"{pad}{key}: ({len(v)})")
            for item in v:
                if isinstance(item, dict):
                    out.append(f"{pad}  - " + "; ".join(f"{k}={_scalar(x)}" for k, x in item.items()))
                else:
                    out.append(f"{pad}  - {_scalar(item)}")
        else:
            out.append(f"{pad}{key}: {_scalar(v)}")


# entry point -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--max-nodes", type=int, default=None, help="node limit for searches")

    p = argparse.ArgumentParser(prog="omlkit", description="Finite quantum event algebras and their Boolean frames.")
    p.add_argument("--version", action="version", version=f"omlkit {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("validate", "ortholattice axioms and orthomodular law"),
        ("blocks", "maximal Boolean subalgebras"),
        ("glue", "pullbacks and cocycle laws over all block frames"),
        ("paste", "colimit of the blocks diagram"),
        ("reconstruct", "paste the blocks diagram and search for an isomorphism"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file")
    sp = sub.add_parser("frames", parents=[common], help="Boolean frames of a probe algebra")
    sp.add_argument("file")
    sp.add_argument("--probe", required=True, help="number of atoms, or a block file with one block")
    sp = sub.add_parser("ks", parents=[common], help="two-valued valuation search")
    sp.add_argument("file")
    sp.add_argument("--all", action="store_true", help="enumerate all valuations")
    sp.add_argument("--cap", type=int, default=DEFAULT_CAP, help="solution cap for --all")
    sp.add_argument("--expect", choices=("sat", "unsat"))
    sp = sub.add_parser("adjoint", parents=[common], help="check the frames/lattice adjunction bijection")
    sp.add_argument("file")
    sp.add_argument("--probe", help="use the representable diagram at this probe instead of the blocks diagram")
    sp = sub.add_parser("catalog", parents=[common], help="bundled scenarios")
    sp.add_argument("action", choices=("list", "show"))
    sp.add_argument("name", nargs="?")
    return p


def _emit(report: dict, fmt: str):
    if fmt == "json":
        sys.stdout.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    else:
        sys.stdout.write(render_text(report))


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "catalog":
        return _catalog(args)
    try:
        src = load(args.file)
        results, stats, code = COMMANDS[args.command](args, src)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _NotLattice as e:
        print(f"error: {args.file}: input is not a lattice ({e})", file=sys.stderr)
        return EXIT_PROPERTY
    report = {
        "command": args.command,
        "version": __version__,
        "inputs": [{"name": src.name, "sha256": src.sha256}],
        "results": results,
        "stats": stats,
    }
    _emit(report, args.format)
    return code


def _catalog(args) -> int:
    if args.action == "list":
        results = {"entries": [{"name": n, "description": catalog.describe(n)} for n in catalog.names()]}
        report = {"command": "catalog", "version": __version__, "inputs": [], "results": results, "stats": {}}
        _emit(report, args.format)
        return EXIT_OK
    if not args.name:
        print("error: catalog show needs a name", file=sys.stderr)
        return EXIT_INPUT
    try:
        text = catalog.read(args.name)
    except KeyError as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return EXIT_INPUT
    if args.format == "json":
        report = {
            "command": "catalog",
            "version": __version__,
            "inputs": [{"name": f"catalog:{args.name}", "sha256": hashlib.sha256(text.encode()).hexdigest()}],
            "results": {"name": args.name, "description": catalog.describe(args.name), "text": text},
            "stats": {},
        }
        _emit(report, "json")
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
