"""Finite groups as multiplication tables.

A :class:`Group` is an ``order x order`` table of element indices with the
identity at index 0. Everything else in the package (extensions, groupoids,
Galois groups) is built from these tables, homomorphisms between them and a
handful of constructions: subgroups, quotients, pullbacks, abelianisation.
"""
from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from . import kernels
from .errors import (
    CodMismatch,
    IndexOutOfRange,
    NotAbelian,
    NotAGroup,
    NotAHom,
    NotNormal,
    NotSurjective,
    OrderBound,
    ParentMismatch,
    SearchBudgetExceeded,
)

DEFAULT_MAX_ORDER = 256
DEFAULT_HOM_BUDGET = 10**7
# exhaustive commutator enumeration is used up to this many pairs
_PAIR_LIMIT = 4_000_000


@dataclass(frozen=True, eq=False)
class Group:
    """Finite group given by its multiplication table.

    ``table[x, y]`` is the index of ``x * y``; index 0 is the identity.
    Instances are immutable; the table is stored read-only.
    """

    table: np.ndarray
    name: str = ""

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int32, copy=True)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def order(self) -> int:
        return self.table.shape[0]

    def __len__(self):
        return self.order

    def __repr__(self):
        return f"Group({self.name or '?'}, order={self.order})"

    def mul(self, x, y):
        return int(self.table[x, y])

    @cached_property
    def inverses(self) -> np.ndarray:
        inv = np.argmin(self.table, axis=1).astype(np.int64)
        inv.setflags(write=False)
        return inv

    def inv(self, x) -> int:
        return int(self.inverses[x])

    def power(self, x, k) -> int:
        y = 0
        for _ in range(k):
            y = int(self.table[y, x])
        return y

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        for k in range(1, n + 1):
            hit = (cur == 0) & (orders == 0)
            orders[hit] = k
            if orders.all():
                break
            cur = self.table[cur, np.arange(n)]
        orders.setflags(write=False)
        return orders

    @cached_property
    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    @cached_property
    def generators(self) -> tuple:
        """A small generating set, found greedily (large element orders first)."""
        return tuple(generating_set(self, range(self.order)))

    def identity_hom(self) -> "Hom":
        return Hom(self, self, np.arange(self.order))

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order, "table": self.table.tolist()}


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: Group
    elements: tuple

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(sorted(int(x) for x in self.elements)))

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, x):
        return bool(self.mask[x])

    def __iter__(self):
        return iter(self.elements)

    def __repr__(self):
        return f"Subgroup(of {self.parent.name or '?'}, order={self.order})"

    @cached_property
    def mask(self) -> np.ndarray:
        m = np.zeros(self.parent.order, dtype=bool)
        m[list(self.elements)] = True
        m.setflags(write=False)
        return m

    def same_elements(self, other: "Subgroup") -> bool:
        return self.elements == other.elements

    def is_normal(self) -> bool:
        g = self.parent
        els = np.array(self.elements)
        conj = g.table[g.table[g.inverses[:, None], els[None, :]], np.arange(g.order)[:, None]]
        return bool(self.mask[conj].all())

    def as_group(self, name=None) -> tuple[Group, "Hom"]:
        """The subgroup as a group in its own right, plus the inclusion."""
        els = np.array(self.elements, dtype=np.int64)
        pos = np.full(self.parent.order, -1, dtype=np.int64)
        pos[els] = np.arange(len(els))
        table = pos[self.parent.table[els[:, None], els[None, :]]]
        if (table < 0).any():
            raise NotAGroup("subset is not closed under multiplication")
        sub = Group(table, name or f"sub({self.parent.name})")
        return sub, Hom(sub, self.parent, els)


@dataclass(frozen=True, eq=False)
class Hom:
    """Homomorphism given by the image index of every domain element."""

    dom: Group
    cod: Group
    map: np.ndarray

    def __post_init__(self):
        m = np.array(self.map, dtype=np.int64, copy=True)
        m.setflags(write=False)
        object.__setattr__(self, "map", m)

    def __call__(self, x):
        return int(self.map[x])

    def __repr__(self):
        return f"Hom({self.dom.name or '?'} -> {self.cod.name or '?'})"

    def __eq__(self, other):
        if not isinstance(other, Hom):
            return NotImplemented
        return (self.dom is other.dom and self.cod is other.cod
                and np.array_equal(self.map, other.map))

    __hash__ = object.__hash__

    def then(self, other: "Hom") -> "Hom":
        """Composite ``other . self``."""
        if other.dom is not self.cod:
            raise CodMismatch(f"cannot compose {self} with {other}")
        return Hom(self.dom, other.cod, other.map[self.map])

    @cached_property
    def kernel(self) -> Subgroup:
        return Subgroup(self.dom, np.nonzero(self.map == 0)[0])

    @cached_property
    def image(self) -> Subgroup:
        return Subgroup(self.cod, np.unique(self.map))

    @property
    def is_surjective(self) -> bool:
        return self.image.order == self.cod.order

    @property
    def is_injective(self) -> bool:
        return self.kernel.order == 1

    @property
    def is_bijective(self) -> bool:
        return self.is_injective and self.is_surjective

    def is_zero(self) -> bool:
        return not self.map.any()

    def inverse(self) -> "Hom":
        if not self.is_bijective:
            raise NotAHom("hom is not invertible")
        inv = np.empty(self.cod.order, dtype=np.int64)
        inv[self.map] = np.arange(self.dom.order)
        return Hom(self.cod, self.dom, inv)

    def restrict(self, sub: Subgroup, target: Subgroup | None = None) -> "Hom":
        """Restriction to ``sub`` (and corestriction to ``target`` when given)."""
        if sub.parent is not self.dom:
            raise ParentMismatch("subgroup does not live in the domain")
        s_group, inc = sub.as_group()
        images = self.map[inc.map]
        if target is None:
            return Hom(s_group, self.cod, images)
        if target.parent is not self.cod:
            raise ParentMismatch("target subgroup does not live in the codomain")
        if not target.mask[images].all():
            raise NotAHom("restriction leaves the target subgroup")
        t_group, t_inc = target.as_group()
        pos = np.full(self.cod.order, -1, dtype=np.int64)
        pos[t_inc.map] = np.arange(t_group.order)
        return Hom(s_group, t_group, pos[images])


@dataclass(frozen=True, eq=False)
class Extension:
    """A surjective hom ``dom -> cod`` with its kernel cached."""

    hom: Hom
    name: str = ""

    def __post_init__(self):
        if not self.hom.is_surjective:
            raise NotSurjective(f"{self.hom} is not surjective")

    @property
    def dom(self) -> Group:
        return self.hom.dom

    @property
    def cod(self) -> Group:
        return self.hom.cod

    @property
    def kernel(self) -> Subgroup:
        return self.hom.kernel

    def __call__(self, x):
        return self.hom(x)

    def __repr__(self):
        return f"Extension({self.name or self.hom})"


@dataclass(frozen=True)
class AbelianInvariants:
    factors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(f) for f in self.factors))
        fs = self.factors
        if any(f < 2 for f in fs) or any(fs[i + 1] % fs[i] for i in range(len(fs) - 1)):
            raise ValueError(f"not an invariant factor chain: {fs}")

    @property
    def order(self) -> int:
        return math.prod(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def as_list(self) -> list:
        return list(self.factors)


# -- construction ---------------------------------------------------------


def _check_table(table: np.ndarray, max_order: int) -> None:
    n = table.shape[0]
    if table.ndim != 2 or table.shape != (n, n) or n == 0:
        raise NotAGroup("table must be a non-empty square array")
    if n > max_order:
        raise OrderBound(f"order {n} exceeds bound {max_order}")
    if table.min() < 0 or table.max() >= n:
        raise NotAGroup("table entries out of range")
    ar = np.arange(n)
    if not (np.array_equal(table[0], ar) and np.array_equal(table[:, 0], ar)):
        raise NotAGroup("row and column 0 must be the identity")
    srt_rows = np.sort(table, axis=1)
    srt_cols = np.sort(table, axis=0)
    if not ((srt_rows == ar).all() and (srt_cols == ar[:, None]).all()):
        raise NotAGroup("table is not a Latin square")
    bad = kernels.associativity_witness(np.ascontiguousarray(table, dtype=np.int32))
    if bad is not None:
        raise NotAGroup(f"associativity fails at {bad}")


def group_from_table(table, name="", *, max_order=DEFAULT_MAX_ORDER, validate=True) -> Group:
    t = np.asarray(table, dtype=np.int64)
    if validate:
        _check_table(t, max_order)
    return Group(t, name)


def _perm_mul(x, y):
    # apply x first, then y
    return tuple(y[i] for i in x)


def closure_elements(gens, mul, identity, *, max_order=DEFAULT_MAX_ORDER):
    """Breadth-first closure of ``gens`` under ``mul``, in generator index order."""
    elements = [identity]
    index = {identity: 0}
    head = 0
    while head < len(elements):
        x = elements[head]
        head += 1
        for g in gens:
            y = mul(x, g)
            if y not in index:
                if len(elements) >= max_order:
                    raise OrderBound(f"closure exceeds bound {max_order}")
                index[y] = len(elements)
                elements.append(y)
    return elements, index


def group_from_elements(gens, mul, identity, name="", *, max_order=DEFAULT_MAX_ORDER):
    """Group generated by ``gens`` inside any finite structure with a product."""
    elements, index = closure_elements(gens, mul, identity, max_order=max_order)
    n = len(elements)
    table = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(elements):
        for j, y in enumerate(elements):
            table[i, j] = index[mul(x, y)]
    return Group(table, name), elements


def perm_from_cycles(cycles, degree):
    p = list(range(degree))
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            if not (0 <= a < degree and 0 <= b < degree):
                raise NotAGroup(f"point out of range in cycle {cyc}")
            p[a] = b
    if sorted(p) != list(range(degree)):
        raise NotAGroup(f"cycles {cycles} do not define a permutation")
    return tuple(p)


def group_from_permutations(perms, name="", *, max_order=DEFAULT_MAX_ORDER):
    perms = [tuple(int(i) for i in p) for p in perms]
    degree = len(perms[0]) if perms else 0
    for p in perms:
        if sorted(p) != list(range(degree)):
            raise NotAGroup(f"{p} is not a permutation of {degree} points")
    group, _ = group_from_elements(perms, _perm_mul, tuple(range(degree)), name,
                                   max_order=max_order)
    return group


def mk_group(spec, *, max_order=DEFAULT_MAX_ORDER) -> Group:
    """Build a group from a JSON-style dict, a table, or permutation generators.

    Accepted forms: ``{"table": [[...]]}``, ``{"degree": n, "generators":
    [[cycle, ...], ...]}``, a bare square list of lists (table), or a list of
    permutation tuples.
    """
    if isinstance(spec, Group):
        return spec
    if isinstance(spec, dict):
        name = spec.get("name", "")
        if "table" in spec:
            group = group_from_table(spec["table"], name, max_order=max_order)
            if "order" in spec and spec["order"] != group.order:
                raise NotAGroup(f"declared order {spec['order']} != {group.order}")
            return group
        if "generators" in spec:
            degree = int(spec["degree"])
            perms = [perm_from_cycles(g, degree) for g in spec["generators"]]
            if not perms:
                perms = [tuple(range(degree))]
            return group_from_permutations(perms, name, max_order=max_order)
        raise NotAGroup("group spec needs 'table' or 'generators'")
    arr = np.asarray(spec)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1] and (arr.shape[0] == 0 or arr[0, 0] == 0):
        return group_from_table(arr, max_order=max_order)
    return group_from_permutations(spec, max_order=max_order)


def load_group(path, *, max_order=DEFAULT_MAX_ORDER) -> Group:
    with open(path, encoding="utf-8") as fh:
        return mk_group(json.load(fh), max_order=max_order)


def trivial_group(name="1") -> Group:
    return Group(np.zeros((1, 1), dtype=np.int64), name)


def cyclic_group(n, name=None) -> Group:
    ar = np.arange(n)
    return Group((ar[:, None] + ar[None, :]) % n, name or f"Z{n}")


# -- subgroups --------------------------------------------------------------


def _check_indices(G: Group, xs):
    xs = [int(x) for x in xs]
    for x in xs:
        if not 0 <= x < G.order:
            raise IndexOutOfRange(f"{x} is not an element index of {G}")
    return xs


def subgroup_generated(G: Group, gens) -> Subgroup:
    gens = _check_indices(G, gens)
    mask = kernels.closure_mask(G.table, [0], gens)
    return Subgroup(G, np.nonzero(mask)[0])


def generating_set(G: Group, candidates) -> list:
    """Greedy generating set for the subgroup generated by ``candidates``."""
    cands = sorted(set(int(c) for c in candidates),
                   key=lambda x: (-int(G.element_orders[x]), x))
    gens: list = []
    mask = np.zeros(G.order, dtype=bool)
    mask[0] = True
    target = kernels.closure_mask(G.table, [0], cands).sum() if cands else 1
    for c in cands:
        if mask.sum() == target:
            break
        if not mask[c]:
            gens.append(c)
            mask = kernels.closure_mask(G.table, [0], gens).astype(bool)
    return gens


def normal_closure(G: Group, xs, within=None) -> Subgroup:
    """Smallest subgroup containing ``xs`` and normalised by ``within`` (default: G)."""
    conj_by = list(G.generators) if within is None else list(within)
    seeds = set(int(x) for x in xs)
    while True:
        sub = subgroup_generated(G, seeds)
        els = np.array(sub.elements)
        if not conj_by:
            return sub
        c = np.array(conj_by)
        conj = G.table[G.table[G.inverses[c][:, None], els[None, :]], c[:, None]]
        new = set(np.unique(conj[~sub.mask[conj]]).tolist())
        if not new:
            return sub
        seeds |= new


def _commutators(G: Group, hs, ks) -> np.ndarray:
    hs = np.asarray(hs)
    ks = np.asarray(ks)
    inv = G.inverses
    t = G.table
    # h^-1 k^-1 h k
    return t[t[inv[hs][:, None], inv[ks][None, :]], t[hs[:, None], ks[None, :]]]


def commutator_subgroup(G: Group, H: Subgroup | None = None, K: Subgroup | None = None) -> Subgroup:
    """``[H, K]``, generated by all ``h^-1 k^-1 h k``; defaults to ``[G, G]``."""
    H = H if H is not None else whole(G)
    K = K if K is not None else H
    if H.parent is not G or K.parent is not G:
        raise ParentMismatch("subgroups must live in G")
    if H.order * K.order <= _PAIR_LIMIT:
        comms = np.unique(_commutators(G, H.elements, K.elements))
        return subgroup_generated(G, comms)
    # [H, K] is the normal closure in <H, K> of commutators of generators
    gh = generating_set(G, H.elements)
    gk = generating_set(G, K.elements)
    comms = np.unique(_commutators(G, gh, gk))
    return normal_closure(G, comms, within=gh + gk)


def center(G: Group) -> Subgroup:
    commutes = (G.table == G.table.T).all(axis=1)
    return Subgroup(G, np.nonzero(commutes)[0])


def whole(G: Group) -> Subgroup:
    return Subgroup(G, range(G.order))


def intersection(A: Subgroup, B: Subgroup) -> Subgroup:
    if A.parent is not B.parent:
        raise ParentMismatch("subgroups of different groups")
    return Subgroup(A.parent, np.nonzero(A.mask & B.mask)[0])


# -- homs -------------------------------------------------------------------


def mk_hom(dom: Group, cod: Group, mapping) -> Hom:
    m = np.asarray(mapping, dtype=np.int64)
    if m.shape != (dom.order,):
        raise NotAHom(f"map has length {m.size}, domain has order {dom.order}")
    if m.min() < 0 or m.max() >= cod.order:
        raise NotAHom("map values out of range")
    if m[0] != 0:
        raise NotAHom("identity is not sent to the identity")
    lhs = m[dom.table]
    rhs = cod.table[m[:, None], m[None, :]]
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        x, y = bad[0]
        raise NotAHom(f"map[{x}*{y}] != map[{x}]*map[{y}]")
    return Hom(dom, cod, m)


def mk_extension(hom: Hom, name="") -> Extension:
    return Extension(hom, name)


def compose(*homs: Hom) -> Hom:
    """Diagrammatic composite: ``compose(f, g)`` is ``g . f``."""
    out = homs[0]
    for h in homs[1:]:
        out = out.then(h)
    return out


def homs_equal(f: Hom, g: Hom) -> bool:
    return f.dom.order == g.dom.order and np.array_equal(f.map, g.map)


# -- quotients and limits ---------------------------------------------------


def quotient(G: Group, N: Subgroup, name=None) -> tuple[Group, Hom]:
    """``G/N`` with cosets labelled by their minimal member; returns the projection."""
    if N.parent is not G:
        raise ParentMismatch("N must be a subgroup of G")
    if not N.is_normal():
        raise NotNormal(f"{N} is not normal in {G}")
    els = np.array(N.elements)
    cosets = G.table[:, els]  # row x is the coset xN
    reps = cosets.min(axis=1)
    labels = np.unique(reps)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[labels] = np.arange(len(labels))
    proj = pos[reps]
    table = proj[G.table[labels[:, None], labels[None, :]]]
    Q = Group(table, name or f"{G.name}/N")
    return Q, Hom(G, Q, proj)


def pair_index(p1: Hom, p2: Hom) -> np.ndarray:
    """Lookup ``(a, c) -> index`` for a pullback given by its projections (-1 if absent)."""
    idx = np.full((p1.cod.order, p2.cod.order), -1, dtype=np.int64)
    idx[p1.map, p2.map] = np.arange(p1.dom.order)
    return idx


def pullback(f: Hom, g: Hom, name=None) -> tuple[Group, Hom, Hom]:
    """``A x_B C`` for ``f: A -> B`` and ``g: C -> B``, ordered lexicographically."""
    if f.cod is not g.cod:
        raise CodMismatch(f"{f} and {g} have different codomains")
    A, C = f.dom, g.dom
    match = f.map[:, None] == g.map[None, :]
    a_idx, c_idx = np.nonzero(match)
    idx = np.full((A.order, C.order), -1, dtype=np.int64)
    idx[a_idx, c_idx] = np.arange(len(a_idx))
    table = idx[A.table[a_idx[:, None], a_idx[None, :]], C.table[c_idx[:, None], c_idx[None, :]]]
    P = Group(table, name or f"{A.name}x_{f.cod.name}{C.name}")
    return P, Hom(P, A, a_idx), Hom(P, C, c_idx)


def direct_product(G: Group, H: Group, name=None) -> tuple[Group, Hom, Hom]:
    """``G x H`` as the pullback over the trivial group."""
    one = trivial_group()
    P, p1, p2 = pullback(Hom(G, one, np.zeros(G.order)), Hom(H, one, np.zeros(H.order)),
                         name=name or f"{G.name}x{H.name}")
    return P, p1, p2


@lru_cache(maxsize=1024)
def abelianization(G: Group) -> tuple[Group, Hom]:
    """``G/[G,G]`` with the unit; cached per group object."""
    return quotient(G, commutator_subgroup(G), name=f"{G.name}^ab")


def induced_on_quotients(f: Hom, eta_dom: Hom, eta_cod: Hom) -> Hom:
    """The map ``Q -> Q'`` with ``ind . eta_dom = eta_cod . f`` (checked)."""
    Q, Q2 = eta_dom.cod, eta_cod.cod
    reps = np.full(Q.order, -1, dtype=np.int64)
    reps[eta_dom.map[::-1]] = np.arange(f.dom.order)[::-1]
    ind = eta_cod.map[f.map[reps]]
    if not np.array_equal(ind[eta_dom.map], eta_cod.map[f.map]):
        raise NotAHom("map does not descend to the quotients")
    return Hom(Q, Q2, ind)


# -- hom search -------------------------------------------------------------


def _image_candidates(A: Group, B: Group, gens, constraint, target, injective):
    ords_a = A.element_orders
    ords_b = B.element_orders
    cands = []
    for g in gens:
        oa = int(ords_a[g])
        if injective:
            ok = ords_b == oa
        else:
            ok = (oa % ords_b) == 0
        if constraint is not None:
            ok = ok & (constraint.map == target.map[g])
        cands.append(np.nonzero(ok)[0])
    return cands


def _search(A, B, *, constraint=None, target=None, injective=False, budget=DEFAULT_HOM_BUDGET,
            limit=None, gens=None):
    gens = list(gens) if gens is not None else list(A.generators)
    if not gens:
        gens = [0]
    if constraint is not None:
        if constraint.dom is not B or target is None or target.dom is not A or target.cod is not constraint.cod:
            raise CodMismatch("constraint must be c: B -> C with target t: A -> C")
    cands = _image_candidates(A, B, gens, constraint, target, injective)
    ta, tb = A.table, B.table
    found = []
    nodes = 0
    imgs: list = []

    def rec(i):
        nonlocal nodes
        if limit is not None and len(found) >= limit:
            return
        if i == len(gens):
            phi = kernels.extend_hom(ta, tb, gens, imgs)
            if phi is None or (phi < 0).any():
                return
            if injective and len(np.unique(phi)) != A.order:
                return
            if constraint is not None and not np.array_equal(constraint.map[phi], target.map):
                return
            found.append(phi)
            return
        for c in cands[i]:
            nodes += 1
            if nodes > budget:
                raise SearchBudgetExceeded(f"hom search exceeded {budget} nodes")
            imgs.append(int(c))
            # partial check on the subgroup generated so far
            if i + 1 == len(gens) or kernels.extend_hom(ta, tb, gens[: i + 1], imgs) is not None:
                rec(i + 1)
            imgs.pop()
            if limit is not None and len(found) >= limit:
                return

    rec(0)
    return [Hom(A, B, phi) for phi in found], nodes


def enumerate_homs(A: Group, B: Group, constraint: Hom | None = None, target: Hom | None = None,
                   *, budget=DEFAULT_HOM_BUDGET, limit=None, surjective=False) -> list:
    """All homs ``h: A -> B``, optionally with ``constraint . h == target``.

    Generator images are tried in index order and every partial assignment is
    propagated over the subgroup it generates, which prunes inconsistent
    branches early. Raises :class:`SearchBudgetExceeded` past ``budget``
    candidate nodes.
    """
    homs, _ = _search(A, B, constraint=constraint, target=target, budget=budget, limit=limit)
    if surjective:
        homs = [h for h in homs if h.is_surjective]
    return homs


def liftings(source: Extension | Hom, through: Extension | Hom, *, budget=DEFAULT_HOM_BUDGET,
             limit=None) -> list:
    """Homs ``h: dom(source) -> dom(through)`` with ``through . h == source``."""
    s = source.hom if isinstance(source, Extension) else source
    t = through.hom if isinstance(through, Extension) else through
    if s.cod is not t.cod:
        raise CodMismatch("lifting needs a common codomain")
    return enumerate_homs(s.dom, t.dom, constraint=t, target=s, budget=budget, limit=limit)


# -- invariants and isomorphism ----------------------------------------------


def _factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariants_from_prime_powers(powers: dict) -> AbelianInvariants:
    """Combine ``{p: [e1, e2, ...]}`` elementary divisors into invariant factors."""
    width = max((len(v) for v in powers.values()), default=0)
    factors = [1] * width
    for p, exps in powers.items():
        exps = sorted(exps, reverse=True)
        for i, e in enumerate(exps):
            factors[width - 1 - i] *= p**e
    return AbelianInvariants(tuple(f for f in factors if f > 1))


def abelian_invariants(G: Group) -> AbelianInvariants:
    """Invariant factors of an abelian group from its element-order census.

    For each prime ``p`` the number of elements killed by ``p^k`` is
    ``p^(sum_i min(k, e_i))``; differencing these counts recovers the
    exponents ``e_i`` of the ``p``-primary part.
    """
    if not G.is_abelian:
        raise NotAbelian(f"{G} is not abelian")
    orders = G.element_orders
    powers = {}
    for p, top in _factorize(G.order).items():
        logs = [0]
        for k in range(1, top + 1):
            count = int(np.count_nonzero((p**k) % orders == 0))
            logs.append(round(math.log(count, p)))
        # at_least[k] = number of cyclic factors of order >= p^k
        at_least = [logs[k] - logs[k - 1] for k in range(1, top + 1)] + [0]
        exps = []
        for k in range(1, top + 1):
            exps += [k] * (at_least[k - 1] - at_least[k])
        powers[p] = exps
    return invariants_from_prime_powers(powers)


def order_profile(G: Group) -> tuple:
    return tuple(sorted(Counter(G.element_orders.tolist()).items()))


def is_isomorphic(G: Group, H: Group, *, max_order=DEFAULT_MAX_ORDER,
                  budget=DEFAULT_HOM_BUDGET) -> tuple[bool, Hom | None]:
    """Decide ``G ~ H``; the witness is an isomorphism ``G -> H`` when found."""
    if G.order > max_order or H.order > max_order:
        raise OrderBound(f"isomorphism search is bounded by order {max_order}")
    if G.order != H.order or G.is_abelian != H.is_abelian:
        return False, None
    if order_profile(G) != order_profile(H):
        return False, None
    if G.is_abelian and abelian_invariants(G) != abelian_invariants(H):
        return False, None
    homs, _ = _search(G, H, injective=True, budget=budget, limit=1)
    if homs:
        return True, homs[0]
    return False, None
