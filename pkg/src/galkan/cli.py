"""Command-line entry point: ``galkan <subcommand> ...``.

Reports are JSON on standard output (``--pretty`` for an indented human
view). Exit status is 0 when every check passes, 1 when a check fails and
2 on unusable input.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .corpus import DATA, MUTATIONS, Registry
from .errors import (
    ComparisonFailure,
    GalkanError,
    NaturalityViolation,
    NoLifting,
    NotAGroupoidAfterReflection,
    NotNormal,
    NotNormalCover,
    SchemaError,
)
from .fingrp import DEFAULT_HOM_BUDGET, abelian_invariants, abelianization, center, commutator_subgroup, mk_group

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Config:
    def __init__(self, args):
        self.max_order = args.max_order
        self.hom_budget = args.hom_budget
        self.max_word_len = args.max_word_len
        self.threads = args.threads


# -- file resolution ------------------------------------------------------------------


def _load_json(path: Path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from exc


def _resolve(ref: str, *kinds: str) -> Path:
    p = Path(ref)
    if p.exists():
        return p
    for kind in kinds:
        where = MUTATIONS if kind == "mutations" else DATA / kind
        for cand in (where / p.name, (where / p.name).with_suffix(".json")):
            if cand.exists():
                return cand
    raise InputError(f"no such {kinds[0][:-1]} file or fixture: {ref}")


def _registry_for(path: Path, cfg) -> Registry:
    """Names inside a fixture resolve next to it when it sits in a corpus layout."""
    root = path.resolve().parent.parent
    if not (root / "groups").is_dir():
        root = DATA
    return Registry(root, max_order=cfg.max_order)


# -- subcommands -----------------------------------------------------------------------


def cmd_group(ref, cfg):
    path = _resolve(ref, "groups")
    G = mk_group(_load_json(path), max_order=cfg.max_order)
    Q, _ = abelianization(G)
    return True, {
        "group": G.name or path.stem,
        "order": G.order,
        "abelian": G.is_abelian,
        "center_order": len(center(G).elements),
        "derived_order": len(commutator_subgroup(G).elements),
        "abelianization": abelian_invariants(Q).as_list(),
    }


def _extension(ref, cfg):
    path = _resolve(ref, "extensions")
    reg = _registry_for(path, cfg)
    return reg.extension_from_json(_load_json(path)), path


def cmd_ext(ref, cfg):
    from .galois_structure import classify

    p, path = _extension(ref, cfg)
    return True, classify(p).to_json(p.name or path.stem)


def cmd_gal(ref, cfg):
    from .galois_group import galois_group

    p, path = _extension(ref, cfg)
    try:
        r = galois_group(p)
    except NotNormal as exc:
        return False, {"extension": p.name or path.stem, "normal": False, "error": str(exc)}
    except ComparisonFailure as exc:
        return False, {"extension": p.name or path.stem, "paths_agree": False, "error": str(exc)}
    return True, {
        "extension": p.name or path.stem,
        "order": r.order,
        "gal_invariants": r.invariants.as_list(),
        "groupoid_order": r.via_groupoid.order,
        "paths_agree": True,
    }


def cmd_pi1(ref, cfg, cover=None, family=None):
    from .galois_group import pi1_object, pi1_report, verify_weakly_universal
    from .kan_check import certificate_for

    path = _resolve(ref, "groups")
    reg = _registry_for(path, cfg)
    base = path.stem
    if cover:
        u = reg.extension(cover)
        fam = [reg.extension(f) for f in (family or [cover])]
        cert = verify_weakly_universal(u, fam, budget=cfg.hom_budget, names=family or [cover])
    else:
        cert = certificate_for(base, reg)
    pi1_object(cert.u.cod, cert)
    return True, pi1_report(cert, base_name=base, cover_name=cover or cert.u.name)


def cmd_kan(ref, cfg):
    from .kan_check import check_iota_factorization, check_kappa_kan, load_scenario

    path = _resolve(ref, "scenarios", "mutations")
    reg = _registry_for(path, cfg)
    try:
        s = load_scenario(_load_json(path), reg, budget=cfg.hom_budget)
    except NaturalityViolation as exc:
        return False, {"scenario": path.stem, "pass": False, "valid": False,
                       "witnesses": [{"square": exc.square, "element": exc.element,
                                      "reason": str(exc)}]}
    verdict = check_kappa_kan(s)
    iota = check_iota_factorization(s)
    out = verdict.to_json()
    out["valid"] = True
    out["iota_factorization_ok"] = iota.ok
    out["pass"] = verdict.ok and iota.ok
    return out["pass"], out


def cmd_h2(ref, cfg, sparse=False):
    from .homology import h2_report

    path = _resolve(ref, "groups")
    G = mk_group(_load_json(path), max_order=cfg.max_order)
    rep = h2_report(G, sparse=True if sparse else None)
    return True, {"group": G.name or path.stem, **rep}


def _cover(ref, cfg):
    from .graphcover import GraphRegistry

    path = _resolve(ref, "covers")
    root = path.resolve().parent.parent
    return GraphRegistry(root if (root / "graphs").is_dir() else None).cover(str(path))


def cmd_graph(action, ref, cfg):
    from . import graphcover as gc

    c = _cover(ref, cfg)
    if action == "exactseq":
        rep = gc.exact_sequence_check(c, cfg.max_word_len)
        return rep.ok, rep.to_json()
    if action == "deck":
        sub = gc.restrict_to_base_component(c)
        d = gc.deck_group(sub)
        return True, {"cover": c.name, "deck_order": d.group.order, "sheets": sub.sheets,
                      "regular": d.is_regular}
    try:
        r = gc.graph_galois_group(c)
    except (NotNormalCover, NotAGroupoidAfterReflection) as exc:
        return True, {"cover": c.name, "regular": False, "reason": str(exc)}
    return True, {"cover": c.name, "regular": True, "galois_order": r.order,
                  "deck_order": r.deck_order, "fiber_points": list(r.fiber_points)}


# -- suite ----------------------------------------------------------------------------------


def _infer(spec) -> str | None:
    if not isinstance(spec, dict):
        return None
    if "bases" in spec:
        return "kan"
    if "total" in spec and "base" in spec:
        return "cover"
    if "darts" in spec:
        return "graph"
    if {"dom", "cod", "map"} <= spec.keys():
        return "ext"
    if "table" in spec or "generators" in spec:
        return "group"
    return None


def _suite_file(path: str, cfg_dict: dict):
    cfg = argparse.Namespace(**cfg_dict)
    p = Path(path)
    t0 = time.perf_counter()
    try:
        spec = _load_json(p)
        kind = _infer(spec)
        checks = []
        if kind == "group":
            checks.append(("group",) + cmd_group(str(p), cfg))
            G = mk_group(spec, max_order=cfg.max_order)
            if G.order <= 16:
                ok, rep = cmd_h2(str(p), cfg)
                checks.append(("h2", ok, rep))
        elif kind == "ext":
            checks.append(("ext",) + cmd_ext(str(p), cfg))
            if checks[-1][2]["normal"]:
                checks.append(("gal",) + cmd_gal(str(p), cfg))
        elif kind == "kan":
            checks.append(("kan",) + cmd_kan(str(p), cfg))
        elif kind == "cover":
            for action in ("exactseq", "deck", "galois"):
                checks.append((f"graph {action}",) + cmd_graph(action, str(p), cfg))
        elif kind == "graph":
            from .graphcover import graph_from_json

            G = graph_from_json(spec)
            checks.append(("graph", True, {"graph": G.name or p.stem, "vertices": G.n,
                                           "edges": G.edges}))
        else:
            checks.append(("unknown", False, {"error": "cannot infer the file type"}))
    except (InputError, SchemaError) as exc:
        checks = [("input", False, {"error": str(exc)})]
    except GalkanError as exc:
        checks = [("error", False, {"error": f"{type(exc).__name__}: {exc}"})]
    ms = round((time.perf_counter() - t0) * 1000, 1)
    return {"file": str(path), "ms": ms,
            "checks": [{"check": name, "pass": ok, "report": rep} for name, ok, rep in checks],
            "pass": all(ok for _, ok, _ in checks)}


def cmd_suite(directory, cfg):
    root = Path(directory)
    if not root.is_dir():
        raise InputError(f"cannot read directory {directory}")
    files = sorted(str(p) for p in root.rglob("*.json"))
    cfg_dict = {"max_order": cfg.max_order, "hom_budget": cfg.hom_budget,
                "max_word_len": cfg.max_word_len, "threads": 1}
    if cfg.threads > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_suite_file, files, [cfg_dict] * len(files)))
    else:
        results = [_suite_file(f, cfg_dict) for f in files]
    failed = [r["file"] for r in results if not r["pass"]]
    return not failed, {"directory": str(directory), "files": len(results),
                        "checks": sum(len(r["checks"]) for r in results),
                        "failed": failed, "results": results}


# -- plumbing --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", help="human-readable output")
    common.add_argument("--no-timing", action="store_true", help="omit timing fields")
    common.add_argument("--max-order", type=int, default=1024, help="largest group accepted")
    common.add_argument("--hom-budget", type=int, default=DEFAULT_HOM_BUDGET,
                        help="node budget for hom searches")
    common.add_argument("--max-word-len", type=int, default=8, help="word bound for pi_1 checks")
    common.add_argument("--threads", type=int, default=1, help="worker processes for suite")

    ap = argparse.ArgumentParser(prog="galkan", parents=[common],
                                 description="Galois groups, fundamental groups and Kan checks")
    ap.add_argument("--version", action="version", version=f"galkan {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)
    for name, helptext in (("group", "summary of a group fixture"),
                           ("ext", "classify an extension"),
                           ("gal", "Galois group of a normal extension"),
                           ("kan", "verify a Kan scenario")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file")
    sp = sub.add_parser("pi1", parents=[common], help="certified fundamental group of a base")
    sp.add_argument("file")
    sp.add_argument("--cover", help="extension fixture to certify")
    sp.add_argument("--family", nargs="*", help="family the cover is certified against")
    sp = sub.add_parser("h2", parents=[common], help="integral homology in degrees 1 and 2")
    sp.add_argument("file")
    sp.add_argument("--sparse", action="store_true", help="use the relation-rewriting mode")
    sp = sub.add_parser("graph", parents=[common], help="graph covering checks")
    sp.add_argument("action", choices=("exactseq", "deck", "galois"))
    sp.add_argument("file")
    sp = sub.add_parser("suite", parents=[common], help="run every fixture in a directory")
    sp.add_argument("directory")
    return ap


def _strip_timing(obj):
    if isinstance(obj, dict):
        return {k: _strip_timing(v) for k, v in obj.items() if k != "ms"}
    if isinstance(obj, list):
        return [_strip_timing(v) for v in obj]
    return obj


def _pretty(obj, indent=0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, ensure_ascii=False)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(_pretty(v, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(v, ensure_ascii=False)}")
    else:
        lines.append(pad + json.dumps(obj))
    return "\n".join(lines)


def _flat(v) -> bool:
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def run(argv=None) -> tuple[int, dict | None]:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_INPUT if exc.code else EXIT_OK), None
    cfg = Config(args)
    t0 = time.perf_counter()
    try:
        if args.command == "graph":
            ok, body = cmd_graph(args.action, args.file, cfg)
        elif args.command == "suite":
            ok, body = cmd_suite(args.directory, cfg)
        elif args.command == "pi1":
            ok, body = cmd_pi1(args.file, cfg, args.cover, args.family)
        elif args.command == "h2":
            ok, body = cmd_h2(args.file, cfg, args.sparse)
        else:
            ok, body = globals()[f"cmd_{args.command}"](args.file, cfg)
    except (InputError, SchemaError) as exc:
        print(f"galkan: {exc}", file=sys.stderr)
        return EXIT_INPUT, None
    except (NoLifting, GalkanError) as exc:
        ok, body = False, {"error": f"{type(exc).__name__}: {exc}"}
    report = {"command": ["galkan", *(argv if argv is not None else sys.argv[1:])],
              "version": __version__, "pass": ok, "report": body,
              "ms": round((time.perf_counter() - t0) * 1000, 1)}
    if args.no_timing:
        report = _strip_timing(report)
    text = _pretty(report) if args.pretty else json.dumps(report, sort_keys=False)
    print(text)
    return (EXIT_OK if ok else EXIT_FAIL), report


def main(argv=None) -> int:
    code, _ = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
