"""Shipped fixtures: groups, extensions, scenarios, graphs and covers.

The JSON files under ``galkan/data`` are produced by :func:`write_all`
(``python -m galkan.corpus --write``) and loaded through :class:`Registry`,
which hands out one shared object per group name so that codomains of
extensions over the same base are identical objects.
"""
from __future__ import annotations

import argparse
import json
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import SchemaError
from .fingrp import (
    Extension,
    Group,
    Hom,
    center,
    closure_elements,
    direct_product,
    enumerate_homs,
    is_isomorphic,
    mk_group,
    mk_hom,
    perm_from_cycles,
    quotient,
)

DATA = Path(__file__).parent / "data"
# fixtures that are meant to fail, kept apart from the shipped corpus
MUTATIONS = Path(__file__).parent / "mutations"


# -- group fixtures -------------------------------------------------------------


def _cycles(perm):
    seen = set()
    out = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        out.append(cyc)
    return out


def _matrix_perms(gens, p):
    """Matrices over F_p acting on the nonzero vectors of F_p^2 (row vector times matrix)."""
    vecs = [(a, b) for a in range(p) for b in range(p) if (a, b) != (0, 0)]
    index = {v: i for i, v in enumerate(vecs)}
    perms = []
    for m in gens:
        perms.append(tuple(index[((v[0] * m[0][0] + v[1] * m[1][0]) % p,
                                  (v[0] * m[0][1] + v[1] * m[1][1]) % p)] for v in vecs))
    return perms, len(vecs)


def _perm_spec(name, degree, perms):
    return {"name": name, "degree": degree, "generators": [_cycles(p) for p in perms]}


def _cyc_spec(name, degree, cycles):
    return {"name": name, "degree": degree, "generators": cycles}


def group_specs() -> dict:
    specs = {
        "trivial": {"name": "trivial", "order": 1, "table": [[0]]},
        "z2": _cyc_spec("z2", 2, [[[0, 1]]]),
        "z3": _cyc_spec("z3", 3, [[[0, 1, 2]]]),
        "z4": _cyc_spec("z4", 4, [[[0, 1, 2, 3]]]),
        "z5": _cyc_spec("z5", 5, [[[0, 1, 2, 3, 4]]]),
        "z6": _cyc_spec("z6", 6, [[[0, 1, 2, 3, 4, 5]]]),
        "z7": _cyc_spec("z7", 7, [[[0, 1, 2, 3, 4, 5, 6]]]),
        "z8": _cyc_spec("z8", 8, [[[0, 1, 2, 3, 4, 5, 6, 7]]]),
        "v4": _cyc_spec("v4", 4, [[[0, 1]], [[2, 3]]]),
        "z4xz2": _cyc_spec("z4xz2", 6, [[[0, 1, 2, 3]], [[4, 5]]]),
        "z2cubed": _cyc_spec("z2cubed", 6, [[[0, 1]], [[2, 3]], [[4, 5]]]),
        "s3": _cyc_spec("s3", 3, [[[0, 1, 2]], [[0, 1]]]),
        "d4": _cyc_spec("d4", 4, [[[0, 1, 2, 3]], [[0, 2]]]),
        "dic3": _cyc_spec("dic3", 7, [[[0, 1, 2]], [[1, 2], [3, 4, 5, 6]]]),
        "a4": _cyc_spec("a4", 4, [[[0, 1, 2]], [[0, 1], [2, 3]]]),
        "s4": _cyc_spec("s4", 4, [[[0, 1, 2, 3]], [[0, 1]]]),
        "a5": _cyc_spec("a5", 5, [[[0, 1, 2, 3, 4]], [[0, 1, 2]]]),
    }
    q8, deg = _matrix_perms([((0, 2), (1, 0)), ((1, 1), (1, 2))], 3)
    specs["q8"] = _perm_spec("q8", deg, q8)
    sl23, deg = _matrix_perms([((1, 1), (0, 1)), ((1, 0), (1, 1))], 3)
    specs["sl23"] = _perm_spec("sl23", deg, sl23)
    sl25, deg = _matrix_perms([((1, 1), (0, 1)), ((1, 0), (1, 1))], 5)
    specs["sl25"] = _perm_spec("sl25", deg, sl25)
    return specs


# the eleven groups named as the core fixture set
CORE_GROUPS = ("z2", "z3", "z4", "z6", "v4", "s3", "d4", "q8", "a4", "a5", "sl25")
# every isomorphism type of order at most 8
SMALL_GROUPS = ("trivial", "z2", "z3", "z4", "v4", "z5", "z6", "s3", "z7", "z8", "z4xz2",
                "z2cubed", "d4", "q8")


def permutation_elements(spec) -> list:
    """Permutations in the element order used by :func:`mk_group`."""
    degree = int(spec["degree"])
    perms = [perm_from_cycles(g, degree) for g in spec["generators"]] or [tuple(range(degree))]
    elements, _ = closure_elements(perms, lambda x, y: tuple(y[i] for i in x),
                                   tuple(range(degree)), max_order=10**6)
    return elements


# -- registry ---------------------------------------------------------------------


class Registry:
    """Loads fixtures by name and caches one object per group and extension."""

    def __init__(self, root=DATA, *, max_order=1024):
        self.root = Path(root)
        self.max_order = max_order
        self.groups: dict = {}
        self.extensions: dict = {}

    def group(self, name) -> Group:
        if isinstance(name, Group):
            return name
        if name not in self.groups:
            spec = self._load(name, "groups")
            self.groups[name] = mk_group(spec, max_order=self.max_order)
        return self.groups[name]

    def add_group(self, name, G: Group) -> Group:
        self.groups[name] = G
        return G

    def _resolve(self, ref, kind) -> Path:
        p = Path(ref)
        if p.suffix == ".json":
            return p if p.is_absolute() or p.exists() else self.root / kind / p.name
        return self.root / kind / f"{ref}.json"

    def _load(self, ref, kind) -> dict:
        path = self._resolve(ref, kind)
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except FileNotFoundError as exc:
            raise SchemaError(f"unknown {kind[:-1]} {ref}") from exc
        except (OSError, json.JSONDecodeError) as exc:
            raise SchemaError(f"{path}: {exc}") from exc

    def hom_from_json(self, spec) -> Hom:
        dom = self.group(spec["dom"])
        cod = self.group(spec["cod"])
        return mk_hom(dom, cod, spec["map"])

    def extension_from_json(self, spec) -> Extension:
        return Extension(self.hom_from_json(spec), spec.get("name", ""))

    def extension(self, name) -> Extension:
        if name not in self.extensions:
            spec = self._load(name, "extensions")
            self.extensions[name] = self.extension_from_json(spec)
        return self.extensions[name]

    def all_groups(self) -> dict:
        for path in sorted((self.root / "groups").glob("*.json")):
            self.group(path.stem)
        return dict(self.groups)

    def extension_names(self) -> list:
        return sorted(p.stem for p in (self.root / "extensions").glob("*.json"))


@lru_cache(maxsize=1)
def default_registry() -> Registry:
    return Registry()


# -- extension fixtures -----------------------------------------------------------


def _find_surjection(E, B):
    for h in enumerate_homs(E, B):
        if h.is_surjective:
            return h
    raise ValueError(f"no surjection {E.name} -> {B.name}")


def _onto_by_quotient(E, N, B):
    Q, q = quotient(E, N)
    ok, iso = is_isomorphic(Q, B)
    if not ok:
        raise ValueError(f"{E.name}/N is not isomorphic to {B.name}")
    return q.then(iso)


def _inclusion_of_perm_groups(specs, small, big, reg):
    small_els = permutation_elements(specs[small])
    big_els = permutation_elements(specs[big])
    deg = int(specs[big]["degree"])
    index = {p: i for i, p in enumerate(big_els)}
    images = [index[tuple(p) + tuple(range(len(p), deg))] for p in small_els]
    return mk_hom(reg.group(small), reg.group(big), images)


def _ext_json(name, hom: Hom, dom_name, cod_name):
    return {"name": name, "dom": dom_name, "cod": cod_name, "map": hom.map.tolist()}


def extension_specs(reg: Registry, specs: dict) -> dict:
    """Named extensions; product domains are stored as explicit tables."""
    out = {}
    extra_groups = {}

    def store(name, hom, dom_name, cod_name):
        out[name] = _ext_json(name, hom, dom_name, cod_name)

    g = reg.group
    q8 = g("q8")
    store("q8_to_v4", _onto_by_quotient(q8, center(q8), g("v4")), "q8", "v4")
    store("z4_to_z2", _find_surjection(g("z4"), g("z2")), "z4", "z2")
    store("s3_to_z2", _find_surjection(g("s3"), g("z2")), "s3", "z2")
    store("dic3_to_z4", _find_surjection(g("dic3"), g("z4")), "dic3", "z4")
    d4 = g("d4")
    store("d4_to_v4", _onto_by_quotient(d4, center(d4), g("v4")), "d4", "v4")
    sl23 = g("sl23")
    store("sl23_to_a4", _onto_by_quotient(sl23, center(sl23), g("a4")), "sl23", "a4")
    sl25 = g("sl25")
    u = _onto_by_quotient(sl25, center(sl25), g("a5"))
    store("sl25_to_a5", u, "sl25", "a5")
    store("a4_to_z3", _find_surjection(g("a4"), g("z3")), "a4", "z3")
    store("s4_to_s3", _find_surjection(g("s4"), g("s3")), "s4", "s3")
    store("q8_to_z2", _find_surjection(q8, g("z2")), "q8", "z2")
    for name in ("z2", "v4", "a4", "a5"):
        store(f"id_{name}", g(name).identity_hom(), name, name)

    # products over A5 and V4
    for base, cover, factors in (("a5", "sl25", ("z2", "z3")), ("v4", "d4", ("z2", "z3"))):
        B = g(base)
        for f in factors:
            P, p1, _ = direct_product(B, g(f), name=f"{base}x{f}")
            extra_groups[f"{base}x{f}"] = P
            store(f"{base}x{f}_to_{base}", p1, f"{base}x{f}", base)
        P, p1, _ = direct_product(g(cover), g("z2"), name=f"{cover}xz2")
        extra_groups[f"{cover}xz2"] = P
        cover_map = u if base == "a5" else Hom(d4, B, np.array(out["d4_to_v4"]["map"]))
        store(f"{cover}xz2_to_{base}", p1.then(cover_map), f"{cover}xz2", base)
    # non-central extension of A5 with kernel Z2 x S3
    P, p1, _ = direct_product(sl25, g("s3"), name="sl25xs3")
    extra_groups["sl25xs3"] = P
    store("sl25xs3_to_a5", p1.then(u), "sl25xs3", "a5")
    return out, extra_groups


def write_all(root=DATA) -> None:
    root = Path(root)
    specs = group_specs()
    for sub in ("groups", "extensions", "scenarios", "graphs", "covers"):
        (root / sub).mkdir(parents=True, exist_ok=True)
    mutations = root.parent / "mutations" if root == DATA else root / "mutations"
    mutations.mkdir(parents=True, exist_ok=True)
    for name, spec in specs.items():
        _dump(root / "groups" / f"{name}.json", spec)
    reg = Registry(root)
    ext, extra = extension_specs(reg, specs)
    for name, G in extra.items():
        _dump(root / "groups" / f"{name}.json",
              {"name": name, "order": G.order, "table": G.table.tolist()})
    reg = Registry(root)
    for name, spec in ext.items():
        _dump(root / "extensions" / f"{name}.json", spec)
        reg.extension(name)  # validates
    from . import graphcover, kan_check

    for name, spec in kan_check.scenario_specs(reg, specs).items():
        where = mutations if name in kan_check.MUTATIONS else root / "scenarios"
        _dump(where / f"{name}.json", spec)
    for name, spec in graphcover.graph_specs().items():
        _dump(root / "graphs" / f"{name}.json", spec)
    for name, spec in graphcover.cover_specs().items():
        _dump(root / "covers" / f"{name}.json", spec)


def _dump(path, obj):
    text = json.dumps(obj, separators=(",", ":"))
    if len(text) < 4000:
        text = json.dumps(obj, indent=1)
    path.write_text(text + "\n", encoding="utf-8")


def main(argv=None):
    ap = argparse.ArgumentParser(description="regenerate the shipped fixture corpus")
    ap.add_argument("--write", action="store_true", help="write JSON files under the data dir")
    ap.add_argument("--root", default=str(DATA))
    args = ap.parse_args(argv)
    if args.write:
        write_all(args.root)
    else:
        ap.print_help()


if __name__ == "__main__":
    main()
