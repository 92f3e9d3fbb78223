"""Coverings of finite graphs.

Graphs are built from darts (half-edges) with a fixed-point-free reversal,
so loops and multiple edges need no special casing. A covering is a graph map
that is a bijection on every vertex star. The reflector here is ``pi_0``;
the Galois group of a regular covering comes out of the connected components
of its kernel-pair graph.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
import json

import numpy as np

from .errors import (
    NotAGroupoidAfterReflection,
    NotConnected,
    NotEtale,
    NotNormalCover,
    SchemaError,
    SearchBudgetExceeded,
)
from .fingrp import Group, group_from_table
from .groupoid import Carrier, aut_at_zero, mk_internal_groupoid

DEFAULT_MAX_WORD_LEN = 8


@dataclass(frozen=True, eq=False)
class Graph:
    """``n`` vertices; dart ``k`` starts at ``source[k]`` and ``reverse[k]`` is its opposite."""

    n: int
    source: np.ndarray
    reverse: np.ndarray
    basepoint: int = 0
    name: str = ""
    labels: tuple | None = None

    def __post_init__(self):
        src = np.asarray(self.source, dtype=np.int64).copy()
        rev = np.asarray(self.reverse, dtype=np.int64).copy()
        src.setflags(write=False)
        rev.setflags(write=False)
        object.__setattr__(self, "source", src)
        object.__setattr__(self, "reverse", rev)
        k = len(src)
        if rev.shape != (k,):
            raise SchemaError("source and reverse must have the same length")
        if k and (src.min() < 0 or src.max() >= self.n):
            raise SchemaError("dart source out of range")
        if k and (rev.min() < 0 or rev.max() >= k):
            raise SchemaError("reverse out of range")
        if not np.array_equal(rev[rev], np.arange(k)) or (rev == np.arange(k)).any():
            raise SchemaError("reverse must be a fixed-point-free involution")
        if not 0 <= self.basepoint < self.n:
            raise SchemaError("basepoint out of range")

    @property
    def darts(self) -> int:
        return len(self.source)

    @property
    def edges(self) -> int:
        return self.darts // 2

    @property
    def target(self) -> np.ndarray:
        return self.source[self.reverse]

    def star(self, v) -> np.ndarray:
        return np.nonzero(self.source == v)[0]

    def to_json(self) -> dict:
        out = {"name": self.name, "vertices": self.n, "basepoint": self.basepoint,
               "darts": [{"id": i, "reverse": int(self.reverse[i]), "source": int(self.source[i])}
                         for i in range(self.darts)]}
        if self.labels:
            for d, lab in zip(out["darts"], self.labels):
                d["label"] = lab
        return out


def graph_from_json(spec) -> Graph:
    try:
        darts = sorted(spec["darts"], key=lambda d: d["id"])
        if [d["id"] for d in darts] != list(range(len(darts))):
            raise SchemaError("dart ids must be 0..k-1")
        labels = tuple(d.get("label", "") for d in darts)
        return Graph(int(spec["vertices"]), [d["source"] for d in darts],
                     [d["reverse"] for d in darts], int(spec.get("basepoint", 0)),
                     spec.get("name", ""), labels if any(labels) else None)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"bad graph spec: {exc}") from exc


def graph_from_edges(n, edges, basepoint=0, name="", labels=None) -> Graph:
    """Edge ``k = (u, v)`` becomes darts ``2k: u -> v`` and ``2k+1: v -> u``."""
    src, rev = [], []
    for k, (u, v) in enumerate(edges):
        src += [u, v]
        rev += [2 * k + 1, 2 * k]
    labs = None
    if labels:
        labs = tuple(x for lab in labels for x in (lab, lab.upper() if lab.islower() else lab.lower()))
    return Graph(n, src, rev, basepoint, name, labs)


# -- components and pi_1 --------------------------------------------------------------


@dataclass(frozen=True)
class Components:
    """``label[v]`` is the index of the component of ``v``; ``reps`` are minimal vertices."""

    label: np.ndarray
    reps: tuple
    base: int

    @property
    def count(self) -> int:
        return len(self.reps)


def pi0(G: Graph) -> Components:
    parent = list(range(G.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tgt = G.target
    for d in range(G.darts):
        a, b = find(int(G.source[d])), find(int(tgt[d]))
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = np.array([find(v) for v in range(G.n)], dtype=np.int64)
    reps = tuple(sorted(set(roots.tolist())))
    index = {r: i for i, r in enumerate(reps)}
    label = np.array([index[r] for r in roots.tolist()], dtype=np.int64)
    return Components(label, reps, int(label[G.basepoint]) if G.n else 0)


@dataclass(frozen=True)
class Pi1:
    rank: int
    tree: tuple  # darts of the spanning tree (both orientations)
    generators: tuple  # one dart per non-tree edge
    parent_dart: tuple  # dart used to reach each vertex from the basepoint (-1 at the root)

    def letter_dart(self, letter) -> int:
        return self.generators[abs(letter) - 1]


def graph_pi1(G: Graph) -> Pi1:
    """Breadth-first spanning tree from the basepoint, darts taken in index order."""
    parent = [-1] * G.n
    seen = [False] * G.n
    seen[G.basepoint] = True
    queue = [G.basepoint]
    tgt = G.target
    tree = set()
    stars = [[] for _ in range(G.n)]
    for d in range(G.darts):
        stars[int(G.source[d])].append(d)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for d in stars[v]:
            w = int(tgt[d])
            if not seen[w]:
                seen[w] = True
                parent[w] = d
                tree.add(d)
                tree.add(int(G.reverse[d]))
                queue.append(w)
    if not all(seen):
        raise NotConnected(f"graph {G.name} is not connected")
    gens = tuple(d for d in range(G.darts) if d not in tree and d < G.reverse[d])
    rank = G.edges - G.n + 1
    assert rank == len(gens)
    return Pi1(rank, tuple(sorted(tree)), gens, tuple(parent))


def reduce_word(word) -> tuple:
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _tree_path(G: Graph, P: Pi1, v) -> list:
    """Darts from the basepoint to ``v`` along the tree."""
    path = []
    while v != G.basepoint:
        d = P.parent_dart[v]
        path.append(d)
        v = int(G.source[d])
    return path[::-1]


def letter_path(G: Graph, P: Pi1, letter) -> list:
    """Closed dart path at the basepoint representing one letter."""
    g = P.letter_dart(letter)
    if letter < 0:
        g = int(G.reverse[g])
    to = _tree_path(G, P, int(G.source[g]))
    back = [int(G.reverse[d]) for d in reversed(_tree_path(G, P, int(G.target[g])))]
    return to + [g] + back


def word_of_path(G: Graph, P: Pi1, path) -> tuple:
    """Reduced word of a closed dart path at the basepoint."""
    letter = {}
    for i, g in enumerate(P.generators):
        letter[g] = i + 1
        letter[int(G.reverse[g])] = -(i + 1)
    return reduce_word([letter[d] for d in path if d in letter])


def word_paths(G: Graph, P: Pi1, word) -> list:
    out = []
    for x in word:
        out += letter_path(G, P, x)
    return out


# -- covers --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GraphCover:
    total: Graph
    base: Graph
    vmap: np.ndarray
    dmap: np.ndarray
    name: str = ""
    # lift[v, base dart] = the dart at total vertex v over that base dart
    lift: np.ndarray = field(default=None, repr=False)

    @property
    def fiber(self) -> np.ndarray:
        return np.nonzero(self.vmap == self.base.basepoint)[0]

    @property
    def sheets(self) -> int:
        return len(self.fiber)

    def lift_dart(self, v, d) -> int:
        return int(self.lift[v, d])


def mk_cover(total: Graph, base: Graph, vmap, dmap, name="") -> GraphCover:
    """Validate a graph map and its star bijections; raises :class:`NotEtale`."""
    vmap = np.asarray(vmap, dtype=np.int64).copy()
    dmap = np.asarray(dmap, dtype=np.int64).copy()
    if vmap.shape != (total.n,) or dmap.shape != (total.darts,):
        raise SchemaError("map lengths do not match the total graph")
    if total.n and (vmap.min() < 0 or vmap.max() >= base.n):
        raise SchemaError("vertex map out of range")
    if total.darts and (dmap.min() < 0 or dmap.max() >= base.darts):
        raise SchemaError("dart map out of range")
    if not np.array_equal(vmap[total.source], base.source[dmap]):
        raise SchemaError("dart map does not respect sources")
    if not np.array_equal(dmap[total.reverse], base.reverse[dmap]):
        raise SchemaError("dart map does not respect reversal")
    if vmap[total.basepoint] != base.basepoint:
        raise SchemaError("basepoints do not match")
    lift = np.full((total.n, base.darts), -1, dtype=np.int64)
    for v in range(total.n):
        star = total.star(v)
        images = dmap[star]
        wanted = base.star(int(vmap[v]))
        if len(images) != len(wanted) or set(images.tolist()) != set(wanted.tolist()):
            raise NotEtale(v, images.tolist())
        lift[v, images] = star
    vmap.setflags(write=False)
    dmap.setflags(write=False)
    lift.setflags(write=False)
    return GraphCover(total, base, vmap, dmap, name, lift)


def identity_cover(G: Graph) -> GraphCover:
    return mk_cover(G, G, np.arange(G.n), np.arange(G.darts), name=f"id_{G.name}")


def cover_from_permutations(base: Graph, perms, name="") -> GraphCover:
    """The covering with monodromy ``perms`` (one per generator of ``pi_1(base)``).

    Sheet ``i`` over vertex ``v`` is total vertex ``v*n + i``; generator
    darts move sheet ``i`` to ``perm[i]``, tree darts keep the sheet.
    """
    P = graph_pi1(base)
    perms = [list(p) for p in perms]
    if len(perms) != P.rank:
        raise SchemaError(f"need {P.rank} permutations, got {len(perms)}")
    n = len(perms[0]) if perms else 1
    sigma = {}
    for g, p in zip(P.generators, perms):
        if sorted(p) != list(range(n)):
            raise SchemaError(f"{p} is not a permutation")
        inv = [0] * n
        for i, j in enumerate(p):
            inv[j] = i
        sigma[g] = p
        sigma[int(base.reverse[g])] = inv
    ident = list(range(n))
    src, rev, dmap = [], [], []
    for d in range(base.darts):
        s = sigma.get(d, ident)
        r = int(base.reverse[d])
        for i in range(n):
            src.append(int(base.source[d]) * n + i)
            rev.append(r * n + s[i])
            dmap.append(d)
    vmap = [v for v in range(base.n) for _ in range(n)]
    total = Graph(base.n * n, src, rev, base.basepoint * n, f"{name or 'cover'}_total")
    return mk_cover(total, base, vmap, dmap, name=name)


def lift_path(c: GraphCover, word, start) -> int:
    """Endpoint of the unique lift of ``word`` (a pi_1(base) word) starting at ``start``."""
    if c.vmap[start] != c.base.basepoint:
        raise ValueError("start must lie over the base basepoint")
    P = _pi1_cached(c.base)
    v = int(start)
    tgt = c.total.target
    for x in word:
        for d in letter_path(c.base, P, x):
            v = int(tgt[c.lift[v, d]])
    return v


_PI1_CACHE: dict = {}


def _pi1_cached(G: Graph) -> Pi1:
    key = id(G)
    hit = _PI1_CACHE.get(key)
    if hit is None or hit[0] is not G:
        hit = (G, graph_pi1(G))
        _PI1_CACHE[key] = hit
    return hit[1]


def delta_connecting(c: GraphCover, word) -> int:
    """``delta(w)``: where the lift of ``w`` from the total basepoint ends."""
    return lift_path(c, word, c.total.basepoint)


def monodromy(c: GraphCover) -> dict:
    """Per generator letter, the permutation of fiber positions it induces."""
    P = _pi1_cached(c.base)
    fib = c.fiber
    pos = {int(v): i for i, v in enumerate(fib)}
    out = {}
    for k in range(P.rank):
        out[k + 1] = [pos[lift_path(c, (k + 1,), int(v))] for v in fib]
    return out


def _propagate(c1: GraphCover, c2: GraphCover, v1, v2, phi):
    """Extend ``v1 -> v2`` over the component of ``v1`` along stars; False on conflict."""
    t1, t2 = c1.total.target, c2.total.target
    phi[v1] = v2
    stack = [v1]
    while stack:
        v = stack.pop()
        w = phi[v]
        for d in c1.total.star(v):
            e = c2.lift[w, c1.dmap[d]]
            a, b = int(t1[d]), int(t2[e])
            if phi[a] < 0:
                phi[a] = b
                stack.append(a)
            elif phi[a] != b:
                return False
    return True


def isomorphic_over_base(c1: GraphCover, c2: GraphCover) -> bool:
    """Brute-force search for a graph isomorphism commuting with the projections."""
    if c1.base is not c2.base or c1.total.n != c2.total.n or c1.total.darts != c2.total.darts:
        return False
    comps = pi0(c1.total)
    phi = np.full(c1.total.n, -1, dtype=np.int64)

    def rec(k):
        if k == comps.count:
            return len(set(phi.tolist())) == c1.total.n
        root = comps.reps[k]
        for cand in np.nonzero(c2.vmap == c1.vmap[root])[0]:
            if cand in set(phi[phi >= 0].tolist()):
                continue
            saved = phi.copy()
            if _propagate(c1, c2, root, int(cand), phi) and rec(k + 1):
                return True
            phi[:] = saved
        return False

    return rec(0)


def reconstruct(c: GraphCover) -> GraphCover:
    """The covering rebuilt from the monodromy action alone."""
    mono = monodromy(c)
    return cover_from_permutations(c.base, [mono[k] for k in sorted(mono)], name=f"rebuilt_{c.name}")


@dataclass(frozen=True)
class DeckResult:
    group: Group
    vertex_perms: tuple
    is_regular: bool


def deck_group(c: GraphCover, *, budget=10**6) -> DeckResult:
    """All automorphisms of ``c`` over its base, found by star propagation.

    An automorphism of a connected covering is fixed by the image of the
    total basepoint, so every fiber vertex is tried once.
    """
    if pi0(c.total).count != 1:
        raise NotConnected("deck group needs a connected total graph")
    x = c.total.basepoint
    perms = []
    for y in c.fiber:
        if len(perms) > budget:
            raise SearchBudgetExceeded("deck search budget exhausted")
        phi = np.full(c.total.n, -1, dtype=np.int64)
        if _propagate(c, c, x, int(y), phi) and len(set(phi.tolist())) == c.total.n:
            perms.append(tuple(phi.tolist()))
    ident = tuple(range(c.total.n))
    perms.sort(key=lambda p: (p != ident, p))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(q[v] for v in p)] for q in perms] for p in perms]
    G = group_from_table(table, f"Deck({c.name})", max_order=max(len(perms), 1))
    return DeckResult(G, tuple(perms), len(perms) == c.sheets)


def restrict_to_base_component(c: GraphCover) -> GraphCover:
    """The covering restricted to the component of the total basepoint."""
    comps = pi0(c.total)
    keep = np.nonzero(comps.label == comps.base)[0]
    vpos = np.full(c.total.n, -1, dtype=np.int64)
    vpos[keep] = np.arange(len(keep))
    darts = np.nonzero(np.isin(c.total.source, keep))[0]
    dpos = np.full(c.total.darts, -1, dtype=np.int64)
    dpos[darts] = np.arange(len(darts))
    sub = Graph(len(keep), vpos[c.total.source[darts]], dpos[c.total.reverse[darts]],
                int(vpos[c.total.basepoint]), f"{c.total.name}_x")
    return mk_cover(sub, c.base, c.vmap[keep], c.dmap[darts], name=f"{c.name}_x")


# -- kernel pair groupoid and pi_0 reflection --------------------------------------------


@dataclass(frozen=True, eq=False)
class GraphGroupoid:
    """Kernel pair of a covering as graphs, with vertex-level structure maps."""

    cover: GraphCover
    objects: Graph
    arrows: Graph
    triples: Graph
    d: np.ndarray
    c: np.ndarray
    e: np.ndarray
    s: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    m: np.ndarray


def _fiber_product(c: GraphCover, k: int):
    """``E x_B ... x_B E`` (k factors): vertices and darts as k-tuples."""
    E, B = c.total, c.base
    verts = [t for t in _tuples_over(c.vmap, B.n, k)]
    vidx = {t: i for i, t in enumerate(verts)}
    darts = [t for t in _tuples_over(c.dmap, B.darts, k)]
    didx = {t: i for i, t in enumerate(darts)}
    src = [vidx[tuple(int(E.source[x]) for x in t)] for t in darts]
    rev = [didx[tuple(int(E.reverse[x]) for x in t)] for t in darts]
    base = vidx[(E.basepoint,) * k]
    return Graph(len(verts), src, rev, base, f"E^{k}_B"), verts, vidx


def _tuples_over(proj, size, k):
    fibres = [[] for _ in range(size)]
    for x, b in enumerate(proj.tolist()):
        fibres[b].append(x)
    out = []
    for b in range(size):
        stack = [()]
        for _ in range(k):
            stack = [t + (x,) for t in stack for x in fibres[b]]
        out += stack
    return sorted(out)


def kernel_pair_graph_groupoid(c: GraphCover) -> GraphGroupoid:
    R1, pairs, pidx = _fiber_product(c, 2)
    C, triples, _ = _fiber_product(c, 3)
    n = c.total.n
    d = np.array([p[0] for p in pairs])
    cc = np.array([p[1] for p in pairs])
    e = np.array([pidx[(v, v)] for v in range(n)])
    s = np.array([pidx[(b, a)] for a, b in pairs])
    p1 = np.array([pidx[(u, v)] for u, v, _ in triples])
    p2 = np.array([pidx[(v, w)] for _, v, w in triples])
    m = np.array([pidx[(u, w)] for u, _, w in triples])
    return GraphGroupoid(c, c.total, R1, C, d, cc, e, s, p1, p2, m)


def reflect_groupoid(R: GraphGroupoid):
    """``pi_0`` applied to the kernel-pair graphs, as a groupoid of pointed sets."""
    k0, k1, kc = pi0(R.objects), pi0(R.arrows), pi0(R.triples)

    def induced(f, src: Components, dst: Components, name):
        out = np.full(src.count, -1, dtype=np.int64)
        lab = dst.label[f]
        for v, comp in enumerate(src.label.tolist()):
            if out[comp] < 0:
                out[comp] = lab[v]
            elif out[comp] != lab[v]:
                raise NotAGroupoidAfterReflection(f"{name} does not descend to components")
        return out

    d = induced(R.d, k1, k0, "d")
    c = induced(R.c, k1, k0, "c")
    e = induced(R.e, k0, k1, "e")
    s = induced(R.s, k1, k1, "s")
    q1 = induced(R.p1, kc, k1, "p1")
    q2 = induced(R.p2, kc, k1, "p2")
    m = induced(R.m, kc, k1, "m")
    a_idx, b_idx = np.nonzero(c[:, None] == d[None, :])
    lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(a_idx, b_idx))}
    cmp = [lookup.get((int(x), int(y)), -1) for x, y in zip(q1, q2)]
    if -1 in cmp or len(set(cmp)) != len(lookup) or len(cmp) != len(lookup):
        raise NotAGroupoidAfterReflection(
            f"pi_0 does not preserve composable pairs ({kc.count} components vs {len(lookup)} pairs)"
        )
    comp_m = np.empty(len(lookup), dtype=np.int64)
    comp_m[cmp] = m
    obj = Carrier.pointed(k0.count, k0.base)
    arr = Carrier.pointed(k1.count, k1.base)
    return mk_internal_groupoid(obj, arr, d, c, e, comp_m, s, name=f"pi0(Eq({R.cover.name}))",
                                origin=R)


@dataclass(frozen=True)
class GraphGaloisResult:
    group: Group
    fiber_points: tuple
    deck_order: int

    @property
    def order(self) -> int:
        return self.group.order


def graph_galois_group(c: GraphCover) -> GraphGaloisResult:
    """Aut at the basepoint component of ``pi_0(Eq(c))``.

    The covering is first checked for normality on the component of the total
    basepoint; the result is compared with the fiber points in that component
    and with the deck group there.
    """
    sub = restrict_to_base_component(c)
    deck = deck_group(sub)
    if not deck.is_regular:
        raise NotNormalCover(f"{c.name} is not regular on the basepoint component")
    G = aut_at_zero(reflect_groupoid(kernel_pair_graph_groupoid(c)))
    comps = pi0(c.total)
    pts = tuple(int(v) for v in c.fiber if comps.label[v] == comps.base)
    if not (G.order == len(pts) == deck.group.order):
        raise NotNormalCover(
            f"Galois group {G.order}, fiber points {len(pts)}, deck group {deck.group.order} disagree"
        )
    return GraphGaloisResult(G, pts, deck.group.order)


# -- exact sequence -------------------------------------------------------------------------


@dataclass
class PositionResult:
    name: str
    ok: bool
    exact: bool
    detail: str = ""
    witness: object = None

    def to_json(self):
        return {"position": self.name, "ok": self.ok,
                "scope": "exact" if self.exact else "verified up to L",
                "detail": self.detail, "witness": self.witness}


@dataclass
class ExactSequenceReport:
    cover: str
    max_word_len: int
    positions: list
    rank_base: int
    rank_total: int | None
    sheets: int

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.positions)

    def to_json(self):
        return {"cover": self.cover, "L": self.max_word_len, "ok": self.ok,
                "rank_base": self.rank_base, "rank_total": self.rank_total,
                "sheets": self.sheets, "positions": [p.to_json() for p in self.positions]}


class _Folded:
    """Stallings graph of a subgroup of a free group, for membership tests."""

    def __init__(self, words):
        self.out = [dict()]
        for w in words:
            self._add_petal(w)
        self._fold()

    def _new(self):
        self.out.append(dict())
        return len(self.out) - 1

    def _edge(self, u, x, v):
        self.out[u].setdefault(x, set()).add(v)
        self.out[v].setdefault(-x, set()).add(u)

    def _add_petal(self, w):
        if not w:
            return
        v = 0
        for x in w[:-1]:
            u = self._new()
            self._edge(v, x, u)
            v = u
        self._edge(v, w[-1], 0)

    def _fold(self):
        alias = list(range(len(self.out)))

        def find(x):
            while alias[x] != x:
                alias[x] = alias[alias[x]]
                x = alias[x]
            return x

        changed = True
        while changed:
            changed = False
            for u in range(len(self.out)):
                if find(u) != u:
                    continue
                for x, targets in list(self.out[u].items()):
                    ts = {find(t) for t in targets}
                    if len(ts) > 1:
                        keep, *rest = sorted(ts)
                        for r in rest:
                            alias[r] = keep
                            for y, tt in self.out[r].items():
                                for t in tt:
                                    self.out[keep].setdefault(y, set()).add(t)
                            self.out[r] = {}
                        changed = True
                    self.out[u][x] = {find(t) for t in self.out[u][x]}
        for u in range(len(self.out)):
            for x in self.out[u]:
                self.out[u][x] = {find(t) for t in self.out[u][x]}
        self.find = find

    def accepts(self, word) -> bool:
        v = 0
        for x in word:
            nxt = self.out[v].get(x)
            if not nxt:
                return False
            (v,) = nxt
        return v == 0


def _reduced_words(rank, max_len):
    """Reduced words over ``+-1..+-rank`` of length up to ``max_len``, depth first."""
    letters = [x for k in range(1, rank + 1) for x in (k, -k)]
    stack = [()]
    while stack:
        w = stack.pop()
        yield w
        if len(w) < max_len:
            for x in reversed(letters):
                if not w or w[-1] != -x:
                    stack.append(w + (x,))


def exact_sequence_check(c: GraphCover, max_word_len=DEFAULT_MAX_WORD_LEN) -> ExactSequenceReport:
    """Check ``0 -> pi1(E) -> pi1(B) -> pi0(F) -> pi0(E) -> 0`` at every position.

    Positions involving ``pi_1`` are checked on all reduced words up to
    ``max_word_len``; the others are exact finite computations.
    """
    L = int(max_word_len)
    B, E = c.base, c.total
    PB = _pi1_cached(B)
    comps = pi0(E)
    sub = restrict_to_base_component(c)
    PE = graph_pi1(sub.total)
    fiber = [int(v) for v in c.fiber]
    x = E.basepoint
    positions = []

    # images of pi1(E_x) generators as reduced words of pi1(B)
    gen_images = []
    for k in range(PE.rank):
        path = letter_path(sub.total, PE, k + 1)
        gen_images.append(word_of_path(B, PB, [int(sub.dmap[d]) for d in path]))

    # (a) injectivity of pi1(E) -> pi1(B) on reduced words up to L
    witness = _injectivity_witness(gen_images, PE.rank, L)
    positions.append(PositionResult(
        "pi1(E) -> pi1(B) injective", witness is None, False,
        f"reduced words of length <= {L}", witness))

    # orbit of the basepoint under the monodromy (exact) and delta on words up to L
    mono = monodromy(c)
    pos = {v: i for i, v in enumerate(fiber)}
    orbit = {pos[x]}
    frontier = [pos[x]]
    while frontier:
        nxt = []
        for i in frontier:
            for perm in mono.values():
                for j in (perm[i], perm.index(i)):
                    if j not in orbit:
                        orbit.add(j)
                        nxt.append(j)
        frontier = nxt
    orbit_vertices = {fiber[i] for i in orbit}
    in_component = {v for v in fiber if comps.label[v] == comps.base}
    delta_image, delta_trivial = _delta_on_words(c, PB, L)

    # (b) image of delta equals the fiber points in the basepoint component
    ok_b = delta_image == in_component and orbit_vertices == in_component
    positions.append(PositionResult(
        "im(delta) = F ∩ E_x", ok_b, True,
        f"{len(in_component)} fiber points in the basepoint component",
        None if ok_b else sorted(delta_image ^ in_component)))

    # (c) exactness at pi0(F): preimage of [x] under pi0(F) -> pi0(E) is im(delta)
    pre = {v for v in fiber if comps.label[v] == comps.label[x]}
    ok_c = pre == orbit_vertices
    positions.append(PositionResult(
        "ker(pi0(F) -> pi0(E)) = im(delta)", ok_c, True, "",
        None if ok_c else sorted(pre ^ orbit_vertices)))

    # (d) pi0(F) -> pi0(E) surjective
    hit = {int(comps.label[v]) for v in fiber}
    missing = sorted(set(range(comps.count)) - hit)
    positions.append(PositionResult(
        "pi0(F) -> pi0(E) surjective", not missing, True,
        f"{comps.count} components", missing[0] if missing else None))

    # (e) exactness at pi1(B): delta(w) = x iff w in p_* pi1(E), via folding
    folded = _Folded(gen_images)
    bad = None
    for w, trivial in delta_trivial:
        if trivial != folded.accepts(w):
            bad = list(w)
            break
    positions.append(PositionResult(
        "ker(delta) = p_* pi1(E)", bad is None, False,
        f"reduced words of length <= {L}", bad))

    return ExactSequenceReport(c.name, L, positions, PB.rank, PE.rank, c.sheets)


def _injectivity_witness(images, rank, L):
    """First nontrivial reduced word (length <= L) whose image reduces to nothing."""
    letters = [x for k in range(1, rank + 1) for x in (k, -k)]
    img = {}
    for k in range(1, rank + 1):
        img[k] = list(images[k - 1])
        img[-k] = [-y for y in reversed(images[k - 1])]
    word = []
    stack_out = []  # the reduced image
    undo = []

    def push(x):
        popped = []
        pushed = 0
        for y in img[x]:
            if stack_out and stack_out[-1] == -y and pushed == 0:
                popped.append(stack_out.pop())
            elif pushed and stack_out[-1] == -y:
                stack_out.pop()
                pushed -= 1
            else:
                stack_out.append(y)
                pushed += 1
        undo.append((popped, pushed))

    def pop():
        popped, pushed = undo.pop()
        for _ in range(pushed):
            stack_out.pop()
        stack_out.extend(reversed(popped))

    def rec(depth):
        for x in letters:
            if word and word[-1] == -x:
                continue
            word.append(x)
            push(x)
            if not stack_out:
                return list(word)
            if depth + 1 < L:
                found = rec(depth + 1)
                if found:
                    return found
            pop()
            word.pop()
        return None

    return rec(0) if L > 0 and rank > 0 else None


def _delta_on_words(c: GraphCover, P: Pi1, L):
    """Image of delta over reduced words up to ``L`` and, per word, whether it is trivial."""
    x = c.total.basepoint
    tgt = c.total.target
    paths = {}
    for k in range(1, P.rank + 1):
        paths[k] = letter_path(c.base, P, k)
        paths[-k] = letter_path(c.base, P, -k)
    image = set()
    results = []
    stack = [((), x)]
    letters = [y for k in range(1, P.rank + 1) for y in (k, -k)]
    while stack:
        w, v = stack.pop()
        image.add(v)
        results.append((w, v == x))
        if len(w) < L:
            for y in reversed(letters):
                if w and w[-1] == -y:
                    continue
                u = v
                for d in paths[y]:
                    u = int(tgt[c.lift[u, d]])
                stack.append((w + (y,), u))
    return image, results


# -- fixtures and JSON ---------------------------------------------------------------------


def cycle_graph(n, name=None) -> Graph:
    return graph_from_edges(n, [(i, (i + 1) % n) for i in range(n)], 0, name or f"c{n}")


def bouquet(k, name=None) -> Graph:
    labels = [chr(ord("a") + i) for i in range(k)]
    return graph_from_edges(1, [(0, 0)] * k, 0, name or f"bouquet{k}", labels)


def graph_specs() -> dict:
    c3, c6 = cycle_graph(3), cycle_graph(6)
    fig8 = bouquet(2, "figure_eight")
    two_c3 = graph_from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)], 0, "c3_c3")
    dbl = double_cover_of_figure_eight()
    irr = cover_from_permutations(fig8, [[1, 0, 2], [0, 2, 1]], name="irregular3")
    out = {g.name: g.to_json() for g in (c3, c6, fig8, two_c3, dbl.total)}
    tri = irr.total
    out["irregular3_total"] = Graph(tri.n, tri.source, tri.reverse, tri.basepoint,
                                    "irregular3_total").to_json()
    return out


def double_cover_of_figure_eight() -> GraphCover:
    """Two vertices; the ``a`` darts cross between sheets, the ``b`` darts loop."""
    fig8 = bouquet(2, "figure_eight")
    # darts: 0: a 0->1, 1: A 1->0, 2: a 1->0, 3: A 0->1, 4,5: b/B at 0, 6,7: b/B at 1
    total = Graph(2, [0, 1, 1, 0, 0, 0, 1, 1], [1, 0, 3, 2, 5, 4, 7, 6], 0,
                  "figure_eight_double")
    return mk_cover(total, fig8, [0, 0], [0, 1, 0, 1, 2, 3, 2, 3], name="figure_eight_double")


def cover_specs() -> dict:
    fig8 = bouquet(2, "figure_eight")
    irr = cover_from_permutations(fig8, [[1, 0, 2], [0, 2, 1]], name="irregular3")
    return {
        "c6_to_c3": {"name": "c6_to_c3", "total": "c6", "base": "c3",
                     "vmap": [i % 3 for i in range(6)],
                     "dmap": [2 * ((k // 2) % 3) + (k % 2) for k in range(12)]},
        "figure_eight_double": {"name": "figure_eight_double", "total": "figure_eight_double",
                                "base": "figure_eight", "vmap": [0, 0],
                                "dmap": [0, 1, 0, 1, 2, 3, 2, 3]},
        "irregular3": {"name": "irregular3", "total": "irregular3_total", "base": "figure_eight",
                       "vmap": irr.vmap.tolist(), "dmap": irr.dmap.tolist()},
        "c3_c3_to_c3": {"name": "c3_c3_to_c3", "total": "c3_c3", "base": "c3",
                        "vmap": [i % 3 for i in range(6)],
                        "dmap": [2 * ((k // 2) % 3) + (k % 2) for k in range(12)]},
        "id_figure_eight": {"name": "id_figure_eight", "total": "figure_eight",
                            "base": "figure_eight", "vmap": [0], "dmap": [0, 1, 2, 3]},
        "id_c3": {"name": "id_c3", "total": "c3", "base": "c3", "vmap": [0, 1, 2],
                  "dmap": list(range(6))},
    }


class GraphRegistry:
    """Loads graph and cover fixtures, sharing one object per graph name."""

    def __init__(self, root=None):
        from .corpus import DATA

        self.root = Path(root) if root else DATA
        self.graphs: dict = {}

    def _path(self, ref, kind):
        p = Path(ref)
        if p.suffix == ".json":
            return p if p.exists() else self.root / kind / p.name
        return self.root / kind / f"{ref}.json"

    def graph(self, ref) -> Graph:
        key = Path(ref).stem
        if key not in self.graphs:
            with open(self._path(ref, "graphs"), encoding="utf-8") as fh:
                self.graphs[key] = graph_from_json(json.load(fh))
        return self.graphs[key]

    def cover(self, ref) -> GraphCover:
        path = self._path(ref, "covers")
        with open(path, encoding="utf-8") as fh:
            spec = json.load(fh)
        return self.cover_from_json(spec, path.parent)

    def cover_from_json(self, spec, where=None) -> GraphCover:
        try:
            total = self._graph_ref(spec["total"], where)
            base = self._graph_ref(spec["base"], where)
            return mk_cover(total, base, spec["vmap"], spec["dmap"], name=spec.get("name", ""))
        except KeyError as exc:
            raise SchemaError(f"cover spec is missing {exc}") from exc

    def _graph_ref(self, ref, where):
        if isinstance(ref, dict):
            return graph_from_json(ref)
        if where is not None:
            cand = Path(where).parent / "graphs" / Path(ref).name
            if Path(ref).suffix != ".json":
                cand = cand.with_suffix(".json")
            if cand.exists():
                return self.graph(str(cand))
        return self.graph(ref)
