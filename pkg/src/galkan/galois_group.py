"""Galois groups of normal extensions, Baer invariance, pi_1 and kappa.

``Gal(p, 0)`` is computed twice: as the loops at 0 of the reflected kernel
pair groupoid, and as ``Ker(p) ∩ Ker(eta_E)`` inside ``E``. The second form
is the canonical one returned to callers; the first is kept with an explicit
comparison isomorphism ``k -> [(0, k)]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import (
    CodMismatch,
    ComparisonFailure,
    MissingCertificate,
    NoLifting,
    NotAHom,
    NotNormal,
    SquareDoesNotCommute,
)
from .fingrp import (
    DEFAULT_HOM_BUDGET,
    AbelianInvariants,
    Extension,
    Group,
    Hom,
    Subgroup,
    abelian_invariants,
    abelianization,
    center,
    commutator_subgroup,
    intersection,
    liftings,
    mk_hom,
)
from .galois_structure import is_normal_extension, pullback_square
from .groupoid import (
    InternalGroupoid,
    apply_I_groupoid,
    arrow_pair_lookup,
    aut_at_zero_with_inclusion,
    induced_map_on_aut,
    kernel_pair_functor,
    kernel_pair_groupoid,
    reflect_functor,
)


@dataclass(frozen=True, eq=False)
class GaloisGroupResult:
    extension: Extension
    group: Group
    via_intersection: Subgroup
    inclusion: Hom
    via_groupoid: Group
    comparison: Hom
    groupoid: InternalGroupoid
    reflected: InternalGroupoid

    @property
    def order(self) -> int:
        return self.group.order

    @property
    def invariants(self) -> AbelianInvariants:
        return abelian_invariants(self.group)


@dataclass(frozen=True, eq=False)
class ExtMorphism:
    """A commuting square ``(top, bottom): src -> dst`` of extensions."""

    src: Extension
    dst: Extension
    top: Hom
    bottom: Hom
    name: str = ""

    def __post_init__(self):
        check_square(self.src, self.dst, self.top, self.bottom)


@dataclass(frozen=True, eq=False)
class BaerReport:
    tested: int
    distinct: int
    induced: Hom | None

    @property
    def ok(self) -> bool:
        return self.distinct <= 1


@dataclass(frozen=True, eq=False)
class WeaklyUniversalCert:
    u: Extension
    family: tuple
    liftings: tuple
    stem: bool
    names: tuple = field(default_factory=tuple)

    @property
    def base(self) -> Group:
        return self.u.cod


def check_square(p: Extension, q: Extension, top: Hom, bottom: Hom) -> None:
    if top.dom is not p.dom or top.cod is not q.dom:
        raise CodMismatch("top map does not run between the extension domains")
    if bottom.dom is not p.cod or bottom.cod is not q.cod:
        raise CodMismatch("bottom map does not run between the extension codomains")
    lhs = q.hom.map[top.map]
    rhs = bottom.map[p.hom.map]
    bad = np.nonzero(lhs != rhs)[0]
    if len(bad):
        raise SquareDoesNotCommute(f"square fails at element {int(bad[0])}")


@lru_cache(maxsize=256)
def galois_group(p: Extension, check_normal: bool = True) -> GaloisGroupResult:
    """``Gal(p, 0)`` by both paths, with the comparison verified bijective."""
    if check_normal and not is_normal_extension(p):
        raise NotNormal(f"{p} is not a normal extension")
    E = p.dom
    _, eta = abelianization(E)
    inter = intersection(p.kernel, eta.kernel)
    group, incl = inter.as_group(name=f"Gal({p.name or E.name})")

    R = kernel_pair_groupoid(p)
    IR = apply_I_groupoid(R)
    GA, loops = aut_at_zero_with_inclusion(IR)
    pairs = arrow_pair_lookup(R)
    arrows = pairs[0, incl.map]
    labels = IR.units[1].map[arrows]
    pos = np.full(IR.arr.size, -1, dtype=np.int64)
    pos[loops] = np.arange(len(loops))
    img = pos[labels]
    if (img < 0).any():
        raise ComparisonFailure("an element of the intersection is not a loop at 0")
    try:
        comparison = mk_hom(group, GA, img)
    except NotAHom as exc:
        raise ComparisonFailure(f"comparison is not a hom: {exc}") from exc
    if not comparison.is_bijective:
        raise ComparisonFailure(
            f"groupoid path has order {GA.order}, intersection path {group.order}"
        )
    return GaloisGroupResult(p, group, inter, incl, GA, comparison, R, IR)


def gal_on_morphism(p: Extension, q: Extension, top: Hom, bottom: Hom) -> Hom:
    """``Gal((top, bottom), 0): Gal(p, 0) -> Gal(q, 0)``.

    The restriction of ``top`` to the intersections, checked against the
    restriction of the reflected kernel-pair functor to the loops at 0.
    """
    check_square(p, q, top, bottom)
    gp, gq = galois_group(p), galois_group(q)
    images = top.map[gp.inclusion.map]
    pos = np.full(q.dom.order, -1, dtype=np.int64)
    pos[gq.inclusion.map] = np.arange(gq.order)
    restricted = pos[images]
    if (restricted < 0).any():
        raise ComparisonFailure("top map leaves the Galois group")
    hom = Hom(gp.group, gq.group, restricted)
    F = kernel_pair_functor(gp.groupoid, gq.groupoid, top, bottom)
    IF = reflect_functor(F, gp.reflected, gq.reflected)
    on_loops = induced_map_on_aut(IF)
    if not np.array_equal(gq.comparison.map[hom.map], on_loops.map[gp.comparison.map]):
        raise ComparisonFailure("groupoid and intersection paths induce different maps")
    return hom


def gal_of(m: ExtMorphism) -> Hom:
    return gal_on_morphism(m.src, m.dst, m.top, m.bottom)


def baer_check(p: Extension, q: Extension, b: Hom, *, budget=DEFAULT_HOM_BUDGET) -> BaerReport:
    """Enumerate every ``f`` with ``q f = b p`` and compare the induced Gal maps."""
    if b.dom is not p.cod or b.cod is not q.cod:
        raise CodMismatch("b must run from cod(p) to cod(q)")
    target = p.hom.then(b)
    lifts = liftings(target, q, budget=budget)
    seen = {}
    for f in lifts:
        h = gal_on_morphism(p, q, f, b)
        seen.setdefault(h.map.tobytes(), h)
    first = next(iter(seen.values()), None)
    return BaerReport(len(lifts), len(seen), first)


def is_stem(u: Extension) -> bool:
    E = u.dom
    z = center(E).mask & commutator_subgroup(E).mask
    return bool(z[list(u.kernel.elements)].all())


def verify_weakly_universal(u: Extension, family, *, budget=DEFAULT_HOM_BUDGET,
                            names=None) -> WeaklyUniversalCert:
    """One lifting of ``u`` through every member of ``family`` (all normal)."""
    family = tuple(family)
    if not is_normal_extension(u):
        raise NotNormal(f"{u} is not normal")
    lifts = []
    for p in family:
        if p.cod is not u.cod:
            raise CodMismatch(f"{p} is not over the base of {u}")
        if not is_normal_extension(p):
            raise NotNormal(f"family member {p} is not normal")
        found = liftings(u, p, budget=budget, limit=1)
        if not found:
            raise NoLifting(p.name or repr(p))
        lifts.append(found[0])
    return WeaklyUniversalCert(u, family, tuple(lifts), is_stem(u),
                               tuple(names) if names else tuple(p.name for p in family))


def pi1_object(B: Group, cert: WeaklyUniversalCert | None, others=()) -> Group:
    """``pi_1(B) = Gal(u, 0)``; other certificates for ``B`` must give the same group."""
    if cert is None or cert.u.cod is not B:
        raise MissingCertificate(f"no certified weakly universal extension of {B}")
    G = galois_group(cert.u).group
    ident = B.identity_hom()
    for other in others:
        if other.u.cod is not B:
            raise MissingCertificate("certificate for a different base")
        there = liftings(cert.u, other.u, limit=1)
        back = liftings(other.u, cert.u, limit=1)
        if not there or not back:
            raise NoLifting(other.u.name, "certified extensions do not lift to each other")
        a = gal_on_morphism(cert.u, other.u, there[0], ident)
        b = gal_on_morphism(other.u, cert.u, back[0], ident)
        if not np.array_equal(b.map[a.map], np.arange(G.order)):
            raise ComparisonFailure("pi_1 depends on the chosen weakly universal extension")
    return G


def pi1_morphism(f: Hom, cert_a: WeaklyUniversalCert, cert_b: WeaklyUniversalCert, *,
                 budget=DEFAULT_HOM_BUDGET) -> Hom:
    """``pi_1(f)`` by pulling back ``u_B`` along ``f`` and lifting ``v``.

    Every lifting is tried and all must induce the same map.
    """
    v, u = cert_a.u, cert_b.u
    if f.dom is not v.cod or f.cod is not u.cod:
        raise CodMismatch("f must run between the two certified bases")
    pulled, to_u = pullback_square(u, f)
    lifts = liftings(v, pulled, budget=budget)
    if not lifts:
        raise NoLifting(pulled.name, f"{v.name} does not lift through the pullback of {u.name}")
    result = None
    for h in lifts:
        g = h.then(to_u)
        hom = gal_on_morphism(v, u, g, f)
        if result is None:
            result = hom
        elif not np.array_equal(result.map, hom.map):
            raise ComparisonFailure("pi_1(f) depends on the lifting")
    return result


def kappa(p: Extension, cert: WeaklyUniversalCert, *, budget=DEFAULT_HOM_BUDGET,
          all_liftings=True) -> Hom:
    """``kappa_p = Gal((h, 1_B), 0): pi_1(B) -> Gal(p, 0)``, independent of ``h``."""
    u = cert.u
    if p.cod is not u.cod:
        raise CodMismatch(f"{p} is not over the base of {u}")
    lifts = liftings(u, p, budget=budget, limit=None if all_liftings else 1)
    if not lifts:
        raise NoLifting(p.name or repr(p))
    ident = p.cod.identity_hom()
    result = None
    for h in lifts:
        hom = gal_on_morphism(u, p, h, ident)
        if result is None:
            result = hom
        elif not np.array_equal(result.map, hom.map):
            raise ComparisonFailure("kappa depends on the lifting")
    return result


def pi1_report(cert: WeaklyUniversalCert, base_name="", cover_name="") -> dict:
    G = galois_group(cert.u).group
    return {
        "base": base_name or cert.u.cod.name,
        "cover": cover_name or cert.u.name,
        "family": list(cert.names),
        "pi1_invariants": abelian_invariants(G).as_list(),
        "stem": cert.stem,
    }
