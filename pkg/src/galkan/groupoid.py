"""Internal categories and groupoids over finite carriers.

Carriers are either groups (structure maps must be homs) or pointed finite
sets. Arrows are indices into the arrow carrier; composable pairs live in an
explicit pullback carrier so every axiom check is a total scan.

Composition is written in diagrammatic order: ``m(a, b)`` is "a then b" and
requires ``c(a) == d(b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    AxiomViolation,
    NotAGroup,
    NotAGroupOnLoops,
    NotAGroupoidAfterReflection,
    RestrictionEscapes,
    SearchBudgetExceeded,
)
from .fingrp import (
    Extension,
    Group,
    Hom,
    abelianization,
    group_from_table,
    induced_on_quotients,
    pullback,
)

MU_SEARCH_BUDGET = 10**6


@dataclass(frozen=True, eq=False)
class Carrier:
    """A group, or a finite set of ``size`` points with a basepoint."""

    kind: str
    group: Group | None = None
    size: int = 0
    basepoint: int = 0
    labels: tuple | None = None

    @classmethod
    def of_group(cls, G: Group) -> "Carrier":
        return cls("group", G, G.order, 0)

    @classmethod
    def pointed(cls, size, basepoint=0, labels=None) -> "Carrier":
        if not 0 <= basepoint < size:
            raise ValueError("basepoint outside the carrier")
        return cls("pointed", None, int(size), int(basepoint),
                   tuple(labels) if labels is not None else None)

    @property
    def order(self) -> int:
        return self.size

    @property
    def is_group(self) -> bool:
        return self.kind == "group"


def _as_carrier(x) -> Carrier:
    if isinstance(x, Carrier):
        return x
    if isinstance(x, Group):
        return Carrier.of_group(x)
    raise TypeError(f"cannot use {x!r} as a carrier")


def _arr(x, n=None) -> np.ndarray:
    a = np.asarray(x, dtype=np.int64).copy()
    if n is not None and a.shape != (n,):
        raise AxiomViolation("shape", f"expected {n} entries, got {a.shape}")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class InternalGroupoid:
    """Validated internal groupoid; see :func:`mk_internal_groupoid`.

    ``comp`` is the carrier of composable pairs, with projections ``p1``
    and ``p2``; ``pair_index[a, b]`` is the position of ``(a, b)`` in it or -1.
    """

    obj: Carrier
    arr: Carrier
    d: np.ndarray
    c: np.ndarray
    e: np.ndarray
    s: np.ndarray
    comp: Carrier
    p1: np.ndarray
    p2: np.ndarray
    m: np.ndarray
    pair_index: np.ndarray
    name: str = ""
    origin: Any = None
    units: tuple | None = None

    def compose(self, a, b) -> int:
        k = int(self.pair_index[a, b])
        if k < 0:
            raise AxiomViolation("composable", (int(a), int(b)))
        return int(self.m[k])

    def loops(self) -> np.ndarray:
        base = self.obj.basepoint
        return np.nonzero((self.d == base) & (self.c == base))[0]

    def arrows_from_base(self) -> np.ndarray:
        return np.nonzero(self.d == self.obj.basepoint)[0]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": {"kind": self.obj.kind, "size": self.obj.size},
            "arrows": {"kind": self.arr.kind, "size": self.arr.size},
            "composable": self.comp.size,
            "d": self.d.tolist(),
            "c": self.c.tolist(),
            "e": self.e.tolist(),
            "s": self.s.tolist(),
            "checks": "passed",
        }


@dataclass(frozen=True, eq=False)
class InternalFunctor:
    dom: InternalGroupoid
    cod: InternalGroupoid
    f0: np.ndarray
    f1: np.ndarray
    # (top, bottom) maps when the functor is Eq of a morphism of extensions
    square: tuple | None = None


@dataclass(frozen=True, eq=False)
class InternalNatTrans:
    source: InternalFunctor
    target: InternalFunctor
    mu: np.ndarray


# -- composable pairs -----------------------------------------------------


def composable_pairs(obj: Carrier, arr: Carrier, d, c):
    """The pullback ``R1 x_R0 R1`` of ``c`` and ``d``: carrier, projections, index."""
    d = np.asarray(d)
    c = np.asarray(c)
    if arr.is_group:
        G = arr.group
        R0 = obj.group
        P, q1, q2 = pullback(Hom(G, R0, c), Hom(G, R0, d), name=f"{G.name}x{G.name}")
        comp = Carrier.of_group(P)
        p1, p2 = q1.map, q2.map
    else:
        a_idx, b_idx = np.nonzero(c[:, None] == d[None, :])
        p1, p2 = a_idx.astype(np.int64), b_idx.astype(np.int64)
        hits = np.nonzero((p1 == arr.basepoint) & (p2 == arr.basepoint))[0]
        comp = Carrier.pointed(len(p1), int(hits[0]) if len(hits) else 0)
    n = arr.size
    index = np.full((n, n), -1, dtype=np.int64)
    index[p1, p2] = np.arange(len(p1))
    return comp, _arr(p1), _arr(p2), index


# -- validation -------------------------------------------------------------


def _first_bad(mask):
    bad = np.nonzero(~np.asarray(mask))[0]
    return int(bad[0]) if len(bad) else None


def _require(cond, diagram, witness_fn):
    w = _first_bad(cond)
    if w is not None:
        raise AxiomViolation(diagram, witness_fn(w))


def _check_hom(src: Carrier, dst: Carrier, f, name):
    if src.is_group and dst.is_group:
        lhs = f[src.group.table]
        rhs = dst.group.table[f[:, None], f[None, :]]
        bad = np.argwhere(lhs != rhs)
        if len(bad):
            raise AxiomViolation(f"{name} is a hom", tuple(int(x) for x in bad[0]))
    elif f[src.basepoint] != dst.basepoint:
        raise AxiomViolation(f"{name} preserves basepoints", src.basepoint)


def _composable_triples(R_d, R_c, p1, p2, pair_index):
    """Triples ``(a, b, x)`` with ``(a, b)`` and ``(b, x)`` composable."""
    order = np.argsort(R_d, kind="stable")
    sorted_d = R_d[order]
    tgt = R_c[p2]
    lo = np.searchsorted(sorted_d, tgt, side="left")
    hi = np.searchsorted(sorted_d, tgt, side="right")
    counts = hi - lo
    pair_rep = np.repeat(np.arange(len(p1)), counts)
    offsets = np.arange(counts.sum()) - np.repeat(np.cumsum(counts) - counts, counts)
    third = order[np.repeat(lo, counts) + offsets]
    return p1[pair_rep], p2[pair_rep], third


def _validate(R: InternalGroupoid) -> None:
    n0, n1 = R.obj.size, R.arr.size
    d, c, e, s, m = R.d, R.c, R.e, R.s, R.m
    p1, p2, idx = R.p1, R.p2, R.pair_index
    for name, f, src, dst in (("d", d, R.arr, R.obj), ("c", c, R.arr, R.obj),
                              ("e", e, R.obj, R.arr), ("s", s, R.arr, R.arr),
                              ("m", m, R.comp, R.arr)):
        if f.min(initial=0) < 0 or f.max(initial=0) >= dst.size:
            raise AxiomViolation(f"{name} in range", int(np.argmax((f < 0) | (f >= dst.size))))
        _check_hom(src, dst, f, name)
    ar0 = np.arange(n0)
    ar1 = np.arange(n1)
    _require(d[e] == ar0, "d.e = 1", lambda w: w)
    _require(c[e] == ar0, "c.e = 1", lambda w: w)
    _require(d[m] == d[p1], "(2) d.m = d.p1", lambda w: (int(p1[w]), int(p2[w])))
    _require(c[m] == c[p2], "(3) c.m = c.p2", lambda w: (int(p1[w]), int(p2[w])))
    # unit laws m<1, ec> = 1 and m<ed, 1> = 1
    right = idx[ar1, e[c]]
    _require(right >= 0, "unit m<1,ec> defined", lambda w: w)
    _require(m[right] == ar1, "unit m<1,ec> = 1", lambda w: w)
    left = idx[e[d], ar1]
    _require(left >= 0, "unit m<ed,1> defined", lambda w: w)
    _require(m[left] == ar1, "unit m<ed,1> = 1", lambda w: w)
    # associativity
    a, b, x = _composable_triples(d, c, p1, p2, idx)
    ab = m[idx[a, b]]
    bx = m[idx[b, x]]
    lhs_i = idx[ab, x]
    rhs_i = idx[a, bx]
    _require((lhs_i >= 0) & (rhs_i >= 0) & (m[np.maximum(lhs_i, 0)] == m[np.maximum(rhs_i, 0)]),
             "associativity", lambda w: (int(a[w]), int(b[w]), int(x[w])))
    # inverses
    _require(d[s] == c, "d.s = c", lambda w: w)
    _require(c[s] == d, "c.s = d", lambda w: w)
    inv_r = idx[ar1, s]
    inv_l = idx[s, ar1]
    _require((inv_r >= 0) & (m[np.maximum(inv_r, 0)] == e[d]), "m<1,s> = ed", lambda w: w)
    _require((inv_l >= 0) & (m[np.maximum(inv_l, 0)] == e[c]), "m<s,1> = ec", lambda w: w)
    # squares (2) and (3) are pullbacks: comparison maps are bijective
    for label, proj, leg in (("(2) pullback", p1, d), ("(3) pullback", p2, c)):
        size = int(np.dot(np.bincount(leg, minlength=n0), np.bincount(leg, minlength=n0)))
        codes = m * n1 + proj
        if size != len(m) or len(np.unique(codes)) != len(m):
            uniq, first, counts = np.unique(codes, return_index=True, return_counts=True)
            dup = first[counts > 1]
            raise AxiomViolation(label, int(dup[0]) if len(dup) else None)


def _derive_inverse(arr_size, d, c, e, idx, m) -> np.ndarray:
    s = np.full(arr_size, -1, dtype=np.int64)
    for a in range(arr_size):
        cands = np.nonzero(d == c[a])[0]
        cands = cands[c[cands] == d[a]]
        for b in cands:
            k1, k2 = idx[a, b], idx[b, a]
            if k1 >= 0 and k2 >= 0 and m[k1] == e[d[a]] and m[k2] == e[c[a]]:
                s[a] = b
                break
        else:
            raise AxiomViolation("inverse exists", a)
    return s


def mk_internal_groupoid(obj, arr, d, c, e, m, s=None, *, name="", origin=None,
                         units=None) -> InternalGroupoid:
    """Build and exhaustively validate an internal groupoid.

    ``m`` is an array aligned with the composable-pairs carrier (in the
    order produced by :func:`composable_pairs`), a mapping ``{(a, b): x}``, or
    a callable ``(a, b) -> x``. When ``s`` is omitted the unique inverse is
    searched for. Raises :class:`AxiomViolation` naming the failing diagram.
    """
    obj = _as_carrier(obj)
    arr = _as_carrier(arr)
    d = _arr(d, arr.size)
    c = _arr(c, arr.size)
    e = _arr(e, obj.size)
    comp, p1, p2, idx = composable_pairs(obj, arr, d, c)
    if callable(m) and not isinstance(m, (np.ndarray, list, tuple, dict)):
        m = [m(int(a), int(b)) for a, b in zip(p1, p2)]
    elif isinstance(m, dict):
        vals = []
        for a, b in zip(p1.tolist(), p2.tolist()):
            if (a, b) not in m:
                raise AxiomViolation("composition defined", (a, b))
            vals.append(m[(a, b)])
        m = vals
    m = _arr(m, comp.size)
    if s is None:
        s = _derive_inverse(arr.size, d, c, e, idx, m)
    s = _arr(s, arr.size)
    idx.setflags(write=False)
    R = InternalGroupoid(obj, arr, d, c, e, s, comp, p1, p2, m, idx, name, origin, units)
    _validate(R)
    return R


def discrete_groupoid(X) -> InternalGroupoid:
    X = _as_carrier(X)
    ident = np.arange(X.size)
    return mk_internal_groupoid(X, X, ident, ident, ident, lambda a, b: a, ident,
                                name="discrete")


def kernel_pair_groupoid(p: Extension) -> InternalGroupoid:
    """``Eq(p)`` over ``E``: arrows ``(x, y)`` with ``p x = p y``, composed by pasting."""
    E = p.dom
    P, q1, q2 = pullback(p.hom, p.hom, name=f"Eq({p.name or E.name})")
    pairs = np.full((E.order, E.order), -1, dtype=np.int64)
    pairs[q1.map, q2.map] = np.arange(P.order)
    d, c = q1.map, q2.map
    e = pairs[np.arange(E.order), np.arange(E.order)]
    s = pairs[c, d]
    obj, arr = Carrier.of_group(E), Carrier.of_group(P)
    _, p1, p2, _ = composable_pairs(obj, arr, d, c)
    m = pairs[d[p1], c[p2]]
    return mk_internal_groupoid(obj, arr, d, c, e, m, s, name=P.name, origin=p)


def arrow_pair_lookup(R: InternalGroupoid) -> np.ndarray:
    """For a kernel-pair groupoid, the ``(x, y) -> arrow`` table."""
    n = R.obj.size
    table = np.full((n, n), -1, dtype=np.int64)
    table[R.d, R.c] = np.arange(R.arr.size)
    return table


# -- reflection -------------------------------------------------------------


def apply_I_groupoid(R, reflector="abelianization") -> InternalGroupoid:
    """Apply the reflector to every carrier and induce the structure maps.

    The composable-pairs carrier of the image must again be a pullback; when
    ``I(R1 x_R0 R1) -> I(R1) x_I(R0) I(R1)`` is not bijective, or the induced
    structure fails an axiom, :class:`NotAGroupoidAfterReflection` is raised.
    """
    if reflector == "pi0":
        from . import graphcover

        return graphcover.reflect_groupoid(R)
    if reflector != "abelianization":
        raise ValueError(f"unknown reflector {reflector!r}")
    if not (R.obj.is_group and R.arr.is_group):
        raise TypeError("abelianisation needs group carriers")
    R0, R1, C = R.obj.group, R.arr.group, R.comp.group
    I0, eta0 = abelianization(R0)
    I1, eta1 = abelianization(R1)
    IC, etaC = abelianization(C)

    def ind(f, src, dst):
        return induced_on_quotients(f, src, dst).map

    d = ind(Hom(R1, R0, R.d), eta1, eta0)
    c = ind(Hom(R1, R0, R.c), eta1, eta0)
    e = ind(Hom(R0, R1, R.e), eta0, eta1)
    s = ind(Hom(R1, R1, R.s), eta1, eta1)
    ip1 = ind(Hom(C, R1, R.p1), etaC, eta1)
    ip2 = ind(Hom(C, R1, R.p2), etaC, eta1)
    im = ind(Hom(C, R1, R.m), etaC, eta1)
    obj, arr = Carrier.of_group(I0), Carrier.of_group(I1)
    comp, q1, q2, idx = composable_pairs(obj, arr, d, c)
    # comparison I(C) -> I(R1) x_I(R0) I(R1)
    cmp = idx[ip1, ip2]
    if (cmp < 0).any() or len(np.unique(cmp)) != IC.order or comp.size != IC.order:
        raise NotAGroupoidAfterReflection(
            f"I does not preserve the composable-pairs pullback of {R.name}"
            f" ({IC.order} vs {comp.size})"
        )
    m = np.empty(comp.size, dtype=np.int64)
    m[cmp] = im
    try:
        return mk_internal_groupoid(obj, arr, d, c, e, m, s, name=f"I({R.name})",
                                   origin=R, units=(eta0, eta1))
    except AxiomViolation as exc:
        raise NotAGroupoidAfterReflection(f"reflected structure fails: {exc}") from exc


# -- loops --------------------------------------------------------------------


def aut_at_zero_with_inclusion(R: InternalGroupoid) -> tuple[Group, np.ndarray]:
    """``Aut_R(0)`` on ``Ker d ∩ Ker c`` and its inclusion into the arrows."""
    loops = R.loops()
    pos = np.full(R.arr.size, -1, dtype=np.int64)
    pos[loops] = np.arange(len(loops))
    k = R.pair_index[loops[:, None], loops[None, :]]
    if (k < 0).any():
        raise NotAGroupOnLoops("loops are not all composable")
    table = pos[R.m[k]]
    if (table < 0).any():
        raise NotAGroupOnLoops("composite of loops is not a loop")
    # the identity loop must sit at index 0 for the table convention
    ident = R.e[R.obj.basepoint]
    if loops[0] != ident:
        order = np.concatenate([[ident], loops[loops != ident]])
        pos[order] = np.arange(len(order))
        k = R.pair_index[order[:, None], order[None, :]]
        table = pos[R.m[k]]
        loops = order
    try:
        G = group_from_table(table, f"Aut_{R.name}(0)", max_order=max(len(loops), 1))
    except NotAGroup as exc:
        raise NotAGroupOnLoops(str(exc)) from exc
    return G, loops


def aut_at_zero(R: InternalGroupoid) -> Group:
    return aut_at_zero_with_inclusion(R)[0]


# -- functors and natural transformations --------------------------------------


def mk_internal_functor(R: InternalGroupoid, S: InternalGroupoid, f0, f1,
                        square=None) -> InternalFunctor:
    f0 = _arr(f0, R.obj.size)
    f1 = _arr(f1, R.arr.size)
    _check_hom(R.obj, S.obj, f0, "f0")
    _check_hom(R.arr, S.arr, f1, "f1")
    _require(S.d[f1] == f0[R.d], "functor commutes with d", lambda w: w)
    _require(S.c[f1] == f0[R.c], "functor commutes with c", lambda w: w)
    _require(f1[R.e] == S.e[f0], "functor commutes with e", lambda w: w)
    k = S.pair_index[f1[R.p1], f1[R.p2]]
    _require((k >= 0) & (S.m[np.maximum(k, 0)] == f1[R.m]), "functor commutes with m",
             lambda w: (int(R.p1[w]), int(R.p2[w])))
    return InternalFunctor(R, S, f0, f1, square)


def identity_functor(R: InternalGroupoid) -> InternalFunctor:
    return mk_internal_functor(R, R, np.arange(R.obj.size), np.arange(R.arr.size))


def kernel_pair_functor(R: InternalGroupoid, S: InternalGroupoid, top: Hom,
                        bottom: Hom) -> InternalFunctor:
    """``Eq(top): Eq(p) -> Eq(p')`` for a morphism ``(top, bottom): p -> p'``."""
    p, q = R.origin, S.origin
    if not np.array_equal(q.hom.map[top.map], bottom.map[p.hom.map]):
        from .errors import SquareDoesNotCommute

        raise SquareDoesNotCommute("the square of extensions does not commute")
    pairs = arrow_pair_lookup(S)
    f1 = pairs[top.map[R.d], top.map[R.c]]
    return mk_internal_functor(R, S, top.map, f1, square=(top, bottom))


def reflect_functor(F: InternalFunctor, IR: InternalGroupoid,
                    IS: InternalGroupoid) -> InternalFunctor:
    """``I(F)`` between reflected groupoids (units stored on the reflections)."""
    (r0, r1), (s0, s1) = IR.units, IS.units
    f0 = induced_on_quotients(Hom(r0.dom, s0.dom, F.f0), r0, s0).map
    f1 = induced_on_quotients(Hom(r1.dom, s1.dom, F.f1), r1, s1).map
    return mk_internal_functor(IR, IS, f0, f1, square=F.square)


def check_nat_trans(f: InternalFunctor, g: InternalFunctor, mu) -> InternalNatTrans:
    """Validate conditions (i)-(iii) for ``mu: R0 -> S1``."""
    S = f.cod
    R = f.dom
    mu = _arr(mu, R.obj.size)
    _check_hom(R.obj, S.arr, mu, "mu")
    _require(S.d[mu] == f.f0, "(i) d.mu = f0", lambda w: w)
    _require(S.c[mu] == g.f0, "(ii) c.mu = g0", lambda w: w)
    k1 = S.pair_index[f.f1, mu[R.c]]
    k2 = S.pair_index[mu[R.d], g.f1]
    ok = (k1 >= 0) & (k2 >= 0) & (S.m[np.maximum(k1, 0)] == S.m[np.maximum(k2, 0)])
    _require(ok, "(iii) m<f1,mu c> = m<mu d,g1>", lambda w: w)
    return InternalNatTrans(f, g, mu)


def are_naturally_isomorphic(f: InternalFunctor, g: InternalFunctor, *,
                             budget=MU_SEARCH_BUDGET) -> InternalNatTrans | None:
    """A natural transformation ``f => g`` (automatically invertible), or None.

    For functors induced on kernel pairs by morphisms of extensions with the
    same bottom component, ``mu = <f, g>`` is used directly. Otherwise all
    assignments of an arrow ``f0(x) -> g0(x)`` to each object ``x`` are
    searched, pruned by condition (iii); the search refuses to start when the
    number of assignments exceeds ``budget``.
    """
    R, S = f.dom, f.cod
    if g.dom is not R or g.cod is not S:
        raise ValueError("functors must share domain and codomain")
    if (f.square is not None and g.square is not None and S.origin is not None
            and isinstance(S.origin, Extension)
            and np.array_equal(f.square[1].map, g.square[1].map)):
        pairs = arrow_pair_lookup(S)
        mu = pairs[f.f0, g.f0]
        if (mu >= 0).all():
            try:
                return check_nat_trans(f, g, mu)
            except AxiomViolation:
                pass
    cands = []
    total = 1
    for x in range(R.obj.size):
        opts = np.nonzero((S.d == f.f0[x]) & (S.c == g.f0[x]))[0]
        if not len(opts):
            return None
        cands.append(opts)
        total *= len(opts)
        if total > budget:
            raise SearchBudgetExceeded(f"mu search space {total} exceeds {budget}")
    # arrows grouped by the later of their two endpoints, for pruning
    later = np.maximum(R.d, R.c)
    by_obj = [np.nonzero(later == x)[0] for x in range(R.obj.size)]
    mu = np.full(R.obj.size, -1, dtype=np.int64)

    def ok_upto(x):
        for a in by_obj[x]:
            k1 = S.pair_index[f.f1[a], mu[R.c[a]]]
            k2 = S.pair_index[mu[R.d[a]], g.f1[a]]
            if k1 < 0 or k2 < 0 or S.m[k1] != S.m[k2]:
                return False
        return True

    def rec(x):
        if x == R.obj.size:
            try:
                return check_nat_trans(f, g, mu.copy())
            except AxiomViolation:
                return None
        for opt in cands[x]:
            mu[x] = opt
            if ok_upto(x):
                found = rec(x + 1)
                if found is not None:
                    return found
        mu[x] = -1
        return None

    return rec(0)


def induced_map_on_aut(F: InternalFunctor) -> Hom:
    """Restriction of ``f1`` to the loops at the basepoint."""
    GR, loops_r = aut_at_zero_with_inclusion(F.dom)
    GS, loops_s = aut_at_zero_with_inclusion(F.cod)
    pos = np.full(F.cod.arr.size, -1, dtype=np.int64)
    pos[loops_s] = np.arange(len(loops_s))
    img = pos[F.f1[loops_r]]
    if (img < 0).any():
        raise RestrictionEscapes("f1 sends a loop outside the loops at 0")
    return Hom(GR, GS, img)


def unit_law_maps(R: InternalGroupoid) -> tuple[np.ndarray, np.ndarray]:
    """``m<1,ec>`` and ``m<ed,1>`` as arrays; both must be the identity."""
    ar = np.arange(R.arr.size)
    return R.m[R.pair_index[ar, R.e[R.c]]], R.m[R.pair_index[R.e[R.d], ar]]

