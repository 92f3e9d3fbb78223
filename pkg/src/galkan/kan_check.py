"""Finite checks of the Kan-extension properties of pi_1, kappa and delta.

A scenario lists bases (each with a certified weakly universal extension),
normal extensions over them, commuting squares between those extensions, a
test functor ``F`` on the bases and the components ``gamma_p``. Components
are stored as element images in ``dom(p)``; for ``kind = "gal"`` they must
land in ``Gal(p, 0)``, for ``kind = "ker"`` in ``Ker(p)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
import json

import numpy as np

from .corpus import MUTATIONS as MUTATIONS_DIR, Registry, default_registry, _inclusion_of_perm_groups
from .errors import (
    ComparisonFailure,
    GalkanError,
    NaturalityViolation,
    NoLifting,
    NotAHom,
    SchemaError,
)
from .fingrp import (
    DEFAULT_HOM_BUDGET,
    Extension,
    Group,
    Hom,
    abelianization,
    is_isomorphic,
    liftings,
    mk_hom,
)
from .galois_group import (
    WeaklyUniversalCert,
    baer_check,
    galois_group,
    kappa,
    pi1_morphism,
    verify_weakly_universal,
)
from .galois_structure import central_reflection

KINDS = ("gal", "ker")
# shipped scenarios that are meant to fail
MUTATIONS = ("v4_mutated", "v4_unnatural", "a5_ker_outside_commutator")


@dataclass(frozen=True, eq=False)
class Base:
    name: str
    group: Group
    cert: WeaklyUniversalCert


@dataclass(frozen=True, eq=False)
class BaseMorphism:
    name: str
    src: str
    dst: str
    hom: Hom


@dataclass(frozen=True, eq=False)
class Square:
    name: str
    src: str
    dst: str
    top: Hom
    bottom: str


@dataclass(eq=False)
class Scenario:
    name: str
    kind: str
    bases: dict
    extensions: dict
    ext_base: dict
    base_morphisms: dict
    squares: dict
    F_obj: dict
    F_mor: dict
    gamma: dict
    registry: Registry = field(repr=False, default=None)

    def base_of(self, ext_name) -> Base:
        return self.bases[self.ext_base[ext_name]]


@dataclass
class KanVerdict:
    scenario: str
    alpha: dict
    factorization_ok: bool
    uniqueness_ok: bool
    witnesses: list

    @property
    def ok(self) -> bool:
        return self.factorization_ok and self.uniqueness_ok

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario,
            "alpha": {k: v.map.tolist() for k, v in self.alpha.items()},
            "factorization_ok": self.factorization_ok,
            "uniqueness_ok": self.uniqueness_ok,
            "pass": self.ok,
            "witnesses": self.witnesses,
        }


@dataclass
class IotaReport:
    violations: list
    lifts: dict

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass(frozen=True, eq=False)
class KerComponent:
    """A component ``pi_1(B) -> Ker(p)``, given by element images in ``dom(p)``."""

    source: Group
    extension: Extension
    images: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, KerComponent) and self.source is other.source
                and np.array_equal(self.images, other.images))

    __hash__ = object.__hash__

    @property
    def is_zero(self) -> bool:
        return bool((self.images == 0).all())

    @property
    def is_injective(self) -> bool:
        return len(set(self.images.tolist())) == len(self.images)


# -- loading and validation ----------------------------------------------------------


def _map_array(raw, length, what):
    try:
        arr = np.asarray(raw, dtype=np.int64)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what}: not an integer list") from exc
    if arr.shape != (length,):
        raise SchemaError(f"{what}: expected {length} entries, got {arr.shape}")
    return arr


def _hom(dom, cod, raw, what) -> Hom:
    arr = _map_array(raw, dom.order, what)
    try:
        return mk_hom(dom, cod, arr)
    except (NotAHom, GalkanError) as exc:
        raise SchemaError(f"{what}: {exc}") from exc


def load_scenario(source, registry: Registry | None = None, *, budget=DEFAULT_HOM_BUDGET) -> Scenario:
    """Parse and validate a scenario (path, JSON text or dict).

    Validation covers functoriality of ``F`` on the listed base morphisms,
    naturality of ``gamma`` on the listed squares (plus, for kernel-valued
    scenarios, the squares through ``IE -> 0``), and both conditions of the
    generalised remark: every certificate is re-verified and Baer invariance
    is checked on each cover.
    """
    reg = registry or default_registry()
    spec = _read(source)
    try:
        name = spec.get("name", "")
        kind = spec.get("kind", "gal")
        if kind not in KINDS:
            raise SchemaError(f"kind must be one of {KINDS}")
        raw_bases = spec.get("bases", [])
        ext_names = list(spec.get("extensions", []))
        for b in raw_bases:
            for e in [b["cover"], *b.get("family", [])]:
                if e not in ext_names:
                    ext_names.append(e)
        extensions = {e: _load_ext(reg, e) for e in ext_names}
        groups = {b["name"]: reg.group(b["group"]) for b in raw_bases}
        ext_base = {}
        for e, p in extensions.items():
            hits = [b for b, G in groups.items() if G is p.cod]
            if len(hits) != 1:
                raise SchemaError(f"extension {e} does not sit over exactly one base")
            ext_base[e] = hits[0]
        bases = {}
        for b in raw_bases:
            u = extensions[b["cover"]]
            fam = [extensions[e] for e in b.get("family", [])] or [u]
            try:
                cert = verify_weakly_universal(u, fam, budget=budget, names=b.get("family") or [b["cover"]])
            except NoLifting as exc:
                raise SchemaError(f"certificate for {b['name']} fails: {exc}") from exc
            rep = baer_check(u, u, u.cod.identity_hom(), budget=budget)
            if not rep.ok:
                raise ComparisonFailure(f"Baer invariance fails on the cover of {b['name']}")
            bases[b["name"]] = Base(b["name"], groups[b["name"]], cert)

        fspec = spec.get("functor", {})
        F_obj = {}
        for b in bases:
            ref = fspec.get("objects", {}).get(b)
            if ref is None:
                raise SchemaError(f"functor has no value on base {b}")
            F_obj[b] = reg.group(ref)
        base_morphisms = {}
        for m in spec.get("base_morphisms", []):
            src, dst = m["src"], m["dst"]
            if src not in bases or dst not in bases:
                raise SchemaError(f"base morphism {m['name']} refers to an unknown base")
            base_morphisms[m["name"]] = BaseMorphism(
                m["name"], src, dst, _hom(bases[src].group, bases[dst].group, m["map"], m["name"]))
        F_mor = {}
        for mname, bm in base_morphisms.items():
            raw = fspec.get("morphisms", {}).get(mname)
            if raw is None:
                raise SchemaError(f"functor has no value on morphism {mname}")
            F_mor[mname] = _hom(F_obj[bm.src], F_obj[bm.dst], raw, f"F({mname})")
        _check_functorial(base_morphisms, F_mor)

        squares = {}
        for sq in spec.get("morphisms", []):
            src, dst = sq["src"], sq["dst"]
            if src not in extensions or dst not in extensions:
                raise SchemaError(f"square {sq['name']} refers to an unknown extension")
            bottom = sq.get("bottom", "id")
            if bottom == "id":
                if ext_base[src] != ext_base[dst]:
                    raise SchemaError(f"square {sq['name']}: identity bottom between different bases")
            elif bottom not in base_morphisms:
                raise SchemaError(f"square {sq['name']}: unknown bottom {bottom}")
            elif (base_morphisms[bottom].src, base_morphisms[bottom].dst) != (ext_base[src], ext_base[dst]):
                raise SchemaError(f"square {sq['name']}: bottom runs between the wrong bases")
            top = _hom(extensions[src].dom, extensions[dst].dom, sq["top"], sq["name"])
            bot = _bottom_hom(bases, base_morphisms, ext_base[src], bottom)
            try:
                from .galois_group import check_square

                check_square(extensions[src], extensions[dst], top, bot)
            except GalkanError as exc:
                raise SchemaError(f"square {sq['name']}: {exc}") from exc
            squares[sq["name"]] = Square(sq["name"], src, dst, top, bottom)

        gamma = {}
        raw_gamma = spec.get("gamma", {})
        for e, p in extensions.items():
            if e not in raw_gamma:
                raise SchemaError(f"gamma has no component at {e}")
            FB = F_obj[ext_base[e]]
            g = _hom(FB, p.dom, raw_gamma[e], f"gamma({e})")
            allowed = galois_group(p).via_intersection.mask if kind == "gal" else p.kernel.mask
            outside = np.nonzero(~allowed[g.map])[0]
            if len(outside):
                where = "Gal" if kind == "gal" else "Ker"
                raise SchemaError(f"gamma({e}) leaves {where}({e}) at element {int(outside[0])}")
            gamma[e] = g.map
    except KeyError as exc:
        raise SchemaError(f"scenario is missing {exc}") from exc

    s = Scenario(name, kind, bases, extensions, ext_base, base_morphisms, squares,
                 F_obj, F_mor, gamma, reg)
    _check_naturality(s)
    return s


def _read(source) -> dict:
    if isinstance(source, dict):
        return source
    if isinstance(source, (str, Path)) and not str(source).lstrip().startswith("{"):
        path = Path(source)
        if not path.exists():
            for where in (default_registry().root / "scenarios", MUTATIONS_DIR):
                cand = where / path.name
                if cand.suffix != ".json":
                    cand = cand.with_suffix(".json")
                if cand.exists():
                    path = cand
                    break
        try:
            with open(path, encoding="utf-8") as fh:
                return json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{path}: {exc}") from exc
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise SchemaError(str(exc)) from exc


def _load_ext(reg, name) -> Extension:
    return reg.extension(name)


def _bottom_hom(bases, base_morphisms, src_base, bottom) -> Hom:
    if bottom == "id":
        return bases[src_base].group.identity_hom()
    return base_morphisms[bottom].hom


def _check_functorial(base_morphisms, F_mor):
    for name, bm in base_morphisms.items():
        if bm.src == bm.dst and np.array_equal(bm.hom.map, np.arange(bm.hom.dom.order)):
            if not np.array_equal(F_mor[name].map, np.arange(F_mor[name].dom.order)):
                raise SchemaError(f"F does not preserve the identity {name}")
    for f in base_morphisms.values():
        for g in base_morphisms.values():
            if f.dst != g.src:
                continue
            gf = g.hom.map[f.hom.map]
            for h in base_morphisms.values():
                if (h.src, h.dst) == (f.src, g.dst) and np.array_equal(h.hom.map, gf):
                    Fgf = F_mor[g.name].map[F_mor[f.name].map]
                    if not np.array_equal(F_mor[h.name].map, Fgf):
                        raise SchemaError(f"F({h.name}) != F({g.name}) . F({f.name})")


def _F_of(s: Scenario, bottom, src_base) -> np.ndarray:
    if bottom == "id":
        return np.arange(s.F_obj[src_base].order)
    return s.F_mor[bottom].map


def _check_naturality(s: Scenario) -> None:
    for sq in s.squares.values():
        lhs = sq.top.map[s.gamma[sq.src]]
        rhs = s.gamma[sq.dst][_F_of(s, sq.bottom, s.ext_base[sq.src])]
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            raise NaturalityViolation(sq.name, int(bad[0]),
                                      f"gamma is not natural on square {sq.name} at element {int(bad[0])}")
    if s.kind == "ker":
        for e, p in s.extensions.items():
            _, eta = abelianization(p.dom)
            bad = np.nonzero(eta.map[s.gamma[e]] != 0)[0]
            if len(bad):
                sq = f"{e} -> (I{p.dom.name} -> 0)"
                raise NaturalityViolation(
                    sq, int(bad[0]),
                    f"gamma is not natural on square {sq}: eta . ker . gamma is nonzero at {int(bad[0])}")


# -- verification -----------------------------------------------------------------------


def _gal_positions(p: Extension, images) -> np.ndarray:
    gp = galois_group(p)
    pos = np.full(p.dom.order, -1, dtype=np.int64)
    pos[gp.inclusion.map] = np.arange(gp.order)
    return pos[np.asarray(images)]


def check_iota_factorization(s: Scenario) -> IotaReport:
    """``eta_E . ker(p) . gamma_p = 0`` for every ``p``; lifts each component through iota."""
    violations, lifts = [], {}
    for e, p in s.extensions.items():
        _, eta = abelianization(p.dom)
        g = s.gamma[e]
        bad = np.nonzero(eta.map[g] != 0)[0]
        if len(bad):
            violations.append({"extension": e, "element": int(bad[0]), "image": int(g[bad[0]])})
            continue
        pos = _gal_positions(p, g)
        lifts[e] = Hom(s.F_obj[s.ext_base[e]], galois_group(p).group, pos)
    return IotaReport(violations, lifts)


def check_kappa_kan(s: Scenario) -> KanVerdict:
    """``alpha_B = gamma_u`` (via iota for kernel-valued scenarios), then every check."""
    witnesses = []
    fact_ok = uniq_ok = True
    iota = check_iota_factorization(s)
    for v in iota.violations:
        fact_ok = False
        witnesses.append({"square": f"iota factorization at {v['extension']}", **v})
    alpha = {}
    for bname, base in s.bases.items():
        u_name = _ext_name(s, base.cert.u)
        if u_name in iota.lifts:
            alpha[bname] = iota.lifts[u_name]

    # naturality of alpha along base morphisms
    for bm in s.base_morphisms.values():
        if bm.src not in alpha or bm.dst not in alpha:
            continue
        p1 = pi1_morphism(bm.hom, s.bases[bm.src].cert, s.bases[bm.dst].cert)
        lhs = p1.map[alpha[bm.src].map]
        rhs = alpha[bm.dst].map[s.F_mor[bm.name].map]
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            fact_ok = False
            witnesses.append({"square": f"pi1({bm.name}) . alpha({bm.src}) = alpha({bm.dst}) . F({bm.name})",
                              "element": int(bad[0]), "lhs": int(lhs[bad[0]]), "rhs": int(rhs[bad[0]])})

    # kappa_p . alpha_B = gamma_p
    for e, p in s.extensions.items():
        bname = s.ext_base[e]
        if bname not in alpha or e not in iota.lifts:
            continue
        k = kappa(p, s.bases[bname].cert)
        lhs = k.map[alpha[bname].map]
        rhs = iota.lifts[e].map
        bad = np.nonzero(lhs != rhs)[0]
        if len(bad):
            fact_ok = False
            witnesses.append({"square": f"kappa({e}) . alpha({bname}) = gamma({e})",
                              "element": int(bad[0]), "lhs": int(lhs[bad[0]]), "rhs": int(rhs[bad[0]])})

    # uniqueness through the isomorphism kappa_u
    for bname, base in s.bases.items():
        u = base.cert.u
        ku = kappa(u, base.cert)
        if not ku.is_bijective:
            uniq_ok = False
            witnesses.append({"square": f"kappa({_ext_name(s, u)}) is not an isomorphism"})
            continue
        if bname not in alpha:
            uniq_ok = False
            continue
        forced = ku.inverse().map[iota.lifts[_ext_name(s, u)].map]
        bad = np.nonzero(forced != alpha[bname].map)[0]
        if len(bad):
            uniq_ok = False
            witnesses.append({"square": f"kappa({_ext_name(s, u)})^-1 . gamma = alpha({bname})",
                              "element": int(bad[0])})
    return KanVerdict(s.name, alpha, fact_ok, uniq_ok, witnesses)


def _ext_name(s: Scenario, p: Extension) -> str:
    for e, q in s.extensions.items():
        if q is p:
            return e
    raise KeyError(p.name)


def delta_component(p: Extension, cert: WeaklyUniversalCert) -> KerComponent:
    """``delta_p = iota . kappa_p: pi_1(B) -> Ker(p)``."""
    k = kappa(p, cert)
    gp = galois_group(p)
    return KerComponent(galois_group(cert.u).group, p, gp.inclusion.map[k.map])


def kan_via_reflection(p: Extension, cert: WeaklyUniversalCert, *, budget=DEFAULT_HOM_BUDGET) -> KerComponent:
    """The ``Ker . I1`` component at ``p``, by lifting the cover through ``I1(p)``.

    Every lifting ``h`` is restricted to ``Gal(u, 0)``; all must agree. This
    path avoids groupoids and kappa entirely, so it can be compared with
    :func:`delta_component` of the centralisation.
    """
    q, _ = central_reflection(p)
    u = cert.u
    if q.cod is not u.cod:
        raise NoLifting(p.name, "certificate is over a different base")
    lifts = liftings(u, q, budget=budget)
    if not lifts:
        raise NoLifting(q.name, f"{u.name} does not lift through {q.name}")
    gu = galois_group(u)
    result = None
    for h in lifts:
        images = h.map[gu.inclusion.map]
        if result is None:
            result = images
        elif not np.array_equal(result, images):
            raise ComparisonFailure("the reflected component depends on the lifting")
    return KerComponent(gu.group, q, result)


# -- certificates for fixtures ------------------------------------------------------------

CERTIFIED = {
    "a5": ("sl25_to_a5", ("id_a5", "a5xz2_to_a5", "a5xz3_to_a5", "sl25_to_a5", "sl25xz2_to_a5")),
    "v4": ("d4_to_v4", ("id_v4", "v4xz2_to_v4", "v4xz3_to_v4", "d4_to_v4", "d4xz2_to_v4")),
    "a4": ("sl23_to_a4", ("id_a4", "sl23_to_a4")),
}


def certificate_for(base: str, registry: Registry | None = None) -> WeaklyUniversalCert:
    """The shipped certificate over ``base``; otherwise the identity, relative to itself."""
    reg = registry or default_registry()
    if base in CERTIFIED:
        cover, family = CERTIFIED[base]
        return _cached_cert(reg, cover, family)
    return _cached_cert(reg, f"id:{base}", (f"id:{base}",))


@lru_cache(maxsize=None)
def _cached_cert(reg, cover, family):
    def ext(name):
        if name.startswith("id:"):
            G = reg.group(name[3:])
            key = f"id_{name[3:]}"
            if key not in reg.extensions:
                reg.extensions[key] = Extension(G.identity_hom(), key)
            return reg.extensions[key]
        return reg.extension(name)

    return verify_weakly_universal(ext(cover), [ext(f) for f in family],
                                   names=[f.replace("id:", "id_") for f in family])


# -- shipped scenarios --------------------------------------------------------------------


def _gamma_from_kappa(reg, ext_names, cert, F):
    """``gamma_p = iota . kappa_p . phi`` with ``phi: F(B) -> pi_1(B)`` an isomorphism."""
    pi1 = galois_group(cert.u).group
    ok, phi = is_isomorphic(F, pi1)
    if not ok:
        raise ValueError("test functor value is not isomorphic to pi_1")
    out = {}
    for e in ext_names:
        p = reg.extension(e)
        k = kappa(p, cert)
        out[e] = galois_group(p).inclusion.map[k.map[phi.map]].tolist()
    return out


def _lift_top(p: Extension, q: Extension, bottom: Hom) -> Hom:
    found = liftings(p.hom.then(bottom), q, limit=1)
    if not found:
        raise NoLifting(q.name)
    return found[0]


def scenario_specs(reg: Registry, specs: dict) -> dict:
    out = {"empty": {"name": "empty", "kind": "gal", "bases": [], "extensions": [],
                     "functor": {"objects": {}, "morphisms": {}}, "gamma": {}}}
    z2 = reg.group("z2")

    # A5 with the A4 base and the inclusion A4 -> A5
    a5_cover, a5_family = CERTIFIED["a5"]
    a4_cover, a4_family = CERTIFIED["a4"]
    cert5 = verify_weakly_universal(reg.extension(a5_cover), [reg.extension(e) for e in a5_family])
    cert4 = verify_weakly_universal(reg.extension(a4_cover), [reg.extension(e) for e in a4_family])
    incl = _inclusion_of_perm_groups(specs, "a4", "a5", reg)
    ident5 = reg.group("a5").identity_hom()
    ext = {n: reg.extension(n) for n in (*a5_family, *a4_family)}
    squares = [
        ("sl23_in_sl25", "sl23_to_a4", "sl25_to_a5",
         _lift_top(ext["sl23_to_a4"], ext["sl25_to_a5"], incl), "incl"),
        ("sl25xz2_onto_sl25", "sl25xz2_to_a5", "sl25_to_a5",
         _lift_top(ext["sl25xz2_to_a5"], ext["sl25_to_a5"], ident5), "id"),
        ("sl25_onto_a5", "sl25_to_a5", "id_a5", ext["sl25_to_a5"].hom, "id"),
        ("a5xz2_onto_a5", "a5xz2_to_a5", "id_a5", ext["a5xz2_to_a5"].hom, "id"),
    ]
    gamma = {**_gamma_from_kappa(reg, a5_family, cert5, z2),
             **_gamma_from_kappa(reg, a4_family, cert4, z2)}
    a5 = {
        "name": "a5",
        "kind": "gal",
        "bases": [{"name": "A5", "group": "a5", "cover": a5_cover, "family": list(a5_family)},
                  {"name": "A4", "group": "a4", "cover": a4_cover, "family": list(a4_family)}],
        "extensions": list(a5_family) + list(a4_family),
        "base_morphisms": [{"name": "incl", "src": "A4", "dst": "A5", "map": incl.map.tolist()}],
        "morphisms": [{"name": n, "src": s, "dst": d, "top": t.map.tolist(), "bottom": b}
                      for n, s, d, t, b in squares],
        "functor": {"objects": {"A5": "z2", "A4": "z2"}, "morphisms": {"incl": [0, 1]}},
        "gamma": gamma,
    }
    out["a5"] = a5

    ker = json.loads(json.dumps(a5))
    ker["name"] = "a5_ker"
    ker["kind"] = "ker"
    out["a5_ker"] = ker
    bad = json.loads(json.dumps(ker))
    bad["name"] = "a5_ker_outside_commutator"
    p = reg.extension("a5xz2_to_a5")
    _, eta = abelianization(p.dom)
    hit = next(int(x) for x in p.kernel.elements if eta.map[x] != 0)
    bad["gamma"]["a5xz2_to_a5"] = [0, hit]
    out["a5_ker_outside_commutator"] = bad

    # V4 relative to the shipped family
    v4_cover, v4_family = CERTIFIED["v4"]
    cert_v = verify_weakly_universal(reg.extension(v4_cover), [reg.extension(e) for e in v4_family])
    extv = {n: reg.extension(n) for n in v4_family}
    identv = reg.group("v4").identity_hom()
    vsq = [
        ("d4xz2_onto_d4", "d4xz2_to_v4", "d4_to_v4",
         _lift_top(extv["d4xz2_to_v4"], extv["d4_to_v4"], identv), "id"),
        ("d4_onto_v4", "d4_to_v4", "id_v4", extv["d4_to_v4"].hom, "id"),
        ("v4xz2_onto_v4", "v4xz2_to_v4", "id_v4", extv["v4xz2_to_v4"].hom, "id"),
    ]
    v4 = {
        "name": "v4",
        "kind": "gal",
        "bases": [{"name": "V4", "group": "v4", "cover": v4_cover, "family": list(v4_family)}],
        "extensions": list(v4_family),
        "base_morphisms": [],
        "morphisms": [{"name": n, "src": s, "dst": d, "top": t.map.tolist(), "bottom": b}
                      for n, s, d, t, b in vsq],
        "functor": {"objects": {"V4": "z2"}, "morphisms": {}},
        "gamma": _gamma_from_kappa(reg, v4_family, cert_v, z2),
    }
    out["v4"] = v4
    # zeroing gamma on a component no listed square constrains: loads, fails the Kan check
    mutated = json.loads(json.dumps(v4))
    mutated["name"] = "v4_mutated"
    mutated["morphisms"] = [m for m in mutated["morphisms"] if m["name"] != "d4xz2_onto_d4"]
    mutated["gamma"]["d4xz2_to_v4"] = [0, 0]
    out["v4_mutated"] = mutated
    # the same change with the square kept: rejected at load time
    unnatural = json.loads(json.dumps(v4))
    unnatural["name"] = "v4_unnatural"
    unnatural["gamma"]["d4xz2_to_v4"] = [0, 0]
    out["v4_unnatural"] = unnatural
    return out
