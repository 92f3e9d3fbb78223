"""Integral homology in degrees 1 and 2 from the normalized bar complex.

Dense mode builds the boundary matrices exactly and reduces them to Smith
normal form over arbitrary-precision integers. Sparse mode (for groups up to
order 60 by default) never materialises the third boundary: chains are first
rewritten onto the basis ``[x|s]`` with ``s`` a generator, and only the
local invariant factors at primes dividing ``|G|`` plus the rational rank are
computed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import kernels
from .errors import OrderBound
from .fingrp import AbelianInvariants, Group, _factorize, invariants_from_prime_powers

DENSE_D3_BOUND = 16
SPARSE_BOUND = 60
H1_BOUND = 256
# prime modulus for the rational rank in sparse mode
RANK_PRIME = 2**31 - 1


@dataclass
class IntMatrix:
    """Sparse integer matrix; ``entries[(i, j)]`` holds nonzero Python ints."""

    rows: int
    cols: int
    entries: dict = field(default_factory=dict)

    def add(self, i, j, v):
        if v:
            w = self.entries.get((i, j), 0) + v
            if w:
                self.entries[(i, j)] = w
            else:
                self.entries.pop((i, j), None)

    def to_dense(self) -> list:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    @classmethod
    def from_dense(cls, rows) -> "IntMatrix":
        rows = [list(r) for r in rows]
        m = cls(len(rows), len(rows[0]) if rows else 0)
        for i, r in enumerate(rows):
            for j, v in enumerate(r):
                if v:
                    m.entries[(i, j)] = int(v)
        return m

    def matmul(self, other: "IntMatrix") -> "IntMatrix":
        by_row = {}
        for (k, j), v in other.entries.items():
            by_row.setdefault(k, []).append((j, v))
        out = IntMatrix(self.rows, other.cols)
        for (i, k), v in self.entries.items():
            for j, w in by_row.get(k, ()):
                out.add(i, j, v * w)
        return out


@dataclass(frozen=True)
class SNFResult:
    diag: tuple
    rank: int


@dataclass(frozen=True)
class HomologyReport:
    H1: AbelianInvariants
    H2: AbelianInvariants | None
    dims: dict
    mode: str


# -- bar complex -----------------------------------------------------------------


def _basis(n, k):
    """Index of the tuple ``(g1..gk)`` of non-identity elements, lexicographic."""
    return lambda *gs: sum((g - 1) * (n - 1) ** (k - 1 - i) for i, g in enumerate(gs))


def bar_boundaries(G: Group, *, max_order=DENSE_D3_BOUND, with_d3=True):
    """``d2: C2 -> C1`` and ``d3: C3 -> C2`` of the normalized bar complex."""
    n = G.order
    if with_d3 and n > max_order:
        raise OrderBound(f"dense d3 is limited to order {max_order}")
    t = G.table
    m = n - 1
    i1, i2 = _basis(n, 1), _basis(n, 2)
    d2 = IntMatrix(m, m * m)
    for g1 in range(1, n):
        for g2 in range(1, n):
            col = i2(g1, g2)
            g12 = int(t[g1, g2])
            d2.add(i1(g2), col, 1)
            if g12:
                d2.add(i1(g12), col, -1)
            d2.add(i1(g1), col, 1)
    if not with_d3:
        return d2, None
    i3 = _basis(n, 3)
    d3 = IntMatrix(m * m, m ** 3)
    for g1, g2, g3 in product(range(1, n), repeat=3):
        col = i3(g1, g2, g3)
        g12, g23 = int(t[g1, g2]), int(t[g2, g3])
        d3.add(i2(g2, g3), col, 1)
        if g12:
            d3.add(i2(g12, g3), col, -1)
        if g23:
            d3.add(i2(g1, g23), col, 1)
        d3.add(i2(g1, g2), col, -1)
    return d2, d3


# -- Smith normal form -------------------------------------------------------------


def _pick_pivot(rows, cols):
    best = None
    for i, row in rows.items():
        ri = len(row)
        for j, v in row.items():
            key = (abs(v), (ri - 1) * (len(cols[j]) - 1), i, j)
            if best is None or key < best:
                best = key
                if key[0] == 1 and key[1] == 0:
                    return i, j
    return best[2], best[3]


def _row_axpy(rows, cols, dst, src, q):
    """``row[dst] -= q * row[src]``."""
    rd = rows[dst]
    for j, v in rows[src].items():
        w = rd.get(j, 0) - q * v
        if w:
            if j not in rd:
                cols[j].add(dst)
            rd[j] = w
        elif j in rd:
            del rd[j]
            cols[j].discard(dst)


def _col_axpy(rows, cols, dst, src, q):
    """``col[dst] -= q * col[src]``."""
    for i in list(cols[src]):
        row = rows[i]
        w = row.get(dst, 0) - q * row[src]
        if w:
            if dst not in row:
                cols[dst].add(i)
            row[dst] = w
        elif dst in row:
            del row[dst]
            cols[dst].discard(i)


def smith_normal_form(M: IntMatrix) -> SNFResult:
    """Invariant factors of ``M`` by exact sparse elimination.

    Pivots have minimal magnitude, ties broken by the Markowitz count. Each
    pivot's row and column are cleared with Euclidean steps, giving a
    diagonal form whose entries are then normalised into a divisor chain.
    """
    rows = {}
    cols = {}
    for (i, j), v in M.entries.items():
        if v:
            rows.setdefault(i, {})[j] = int(v)
            cols.setdefault(j, set()).add(i)
    diag = []
    while rows:
        i, j = _pick_pivot(rows, cols)
        while True:
            p = rows[i][j]
            moved = False
            for r in list(cols[j]):
                if r == i:
                    continue
                q = rows[r][j] // p
                _row_axpy(rows, cols, r, i, q)
                if j in rows[r]:
                    i, moved = r, True  # smaller remainder becomes the pivot
                    break
            if moved:
                continue
            p = rows[i][j]
            for c in list(rows[i]):
                if c == j:
                    continue
                q = rows[i][c] // p
                _col_axpy(rows, cols, c, j, q)
                if c in rows[i]:
                    j, moved = c, True
                    break
            if not moved:
                break
        diag.append(abs(rows[i][j]))
        for c in rows[i]:
            cols[c].discard(i)
        del rows[i]
        cols.pop(j, None)
        for r in [r for r, row in rows.items() if not row]:
            del rows[r]
    return _normalise(diag)


def _normalise(diag) -> SNFResult:
    powers = {}
    for d in diag:
        if d > 1:
            for p, e in _factorize(d).items():
                powers.setdefault(p, []).append(e)
    chain = invariants_from_prime_powers(powers).factors
    return SNFResult((1,) * (len(diag) - len(chain)) + tuple(chain), len(diag))


# -- homology -------------------------------------------------------------------------


def _torsion(snf: SNFResult) -> AbelianInvariants:
    return AbelianInvariants(tuple(d for d in snf.diag if d > 1))


def homology(G: Group, n: int, *, sparse=None, max_order=DENSE_D3_BOUND,
             sparse_bound=SPARSE_BOUND) -> AbelianInvariants:
    """``H_n(G; Z)`` for ``n`` in {1, 2} as invariant factors."""
    if n == 1:
        return homology_report(G, degrees=(1,)).H1
    if n != 2:
        raise ValueError("only H1 and H2 are computed")
    return homology_report(G, degrees=(2,), sparse=sparse, max_order=max_order,
                           sparse_bound=sparse_bound).H2


def homology_report(G: Group, degrees=(1, 2), *, sparse=None, max_order=DENSE_D3_BOUND,
                    sparse_bound=SPARSE_BOUND) -> HomologyReport:
    order = G.order
    m = order - 1
    dims = {"C1": m, "C2": m * m, "C3": m ** 3}
    if sparse is None:
        sparse = order > max_order
    H1 = H2 = None
    if 1 in degrees:
        if order > H1_BOUND:
            raise OrderBound(f"H1 is limited to order {H1_BOUND}")
        d2, _ = bar_boundaries(G, with_d3=False)
        snf2 = smith_normal_form(d2)
        if snf2.rank != m:
            raise ArithmeticError("H1 of a finite group must be finite")
        H1 = _torsion(snf2)
    if 2 in degrees:
        if sparse:
            if order > sparse_bound:
                raise OrderBound(f"sparse H2 is limited to order {sparse_bound}")
            H2 = h2_sparse(G)
        else:
            d2, d3 = bar_boundaries(G, max_order=max_order)
            snf3 = smith_normal_form(d3)
            rank2 = smith_normal_form(d2).rank
            if m * m - rank2 - snf3.rank != 0:
                raise ArithmeticError("H2 of a finite group must be finite")
            H2 = _torsion(snf3)
    return HomologyReport(H1, H2, dims, "sparse" if sparse else "dense")


# -- sparse mode ------------------------------------------------------------------------


def _rewrite_table(G: Group, gens):
    """``T[a, b]``: the class of ``[a|b]`` modulo boundaries, on the basis ``[x|s]``.

    Uses ``[a|bs] = [a|b] + [ab|s] - [b|s]`` along a breadth-first tree of
    right multiplications by ``gens``. Row/column 0 (identity) stay zero.
    """
    n = G.order
    k = len(gens)
    width = n * k  # coordinate (x, i) at x*k + i; x = 0 is never used
    t = G.table
    T = np.zeros((n, n, width), dtype=np.int64)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    a = np.arange(n)
    frontier = [0]
    while frontier:
        nxt = []
        for b in frontier:
            for i, s in enumerate(gens):
                c = int(t[b, s])
                if seen[c]:
                    continue
                seen[c] = True
                nxt.append(c)
                row = T[:, b, :].copy()
                ab = t[a, b]
                row[a, ab * k + i] += 1
                if b:
                    row[:, b * k + i] -= 1
                T[:, c, :] = row
        frontier = nxt
    # basis vectors with x = 0 or a = 0 vanish in the normalized complex
    T[0] = 0
    T[:, :, 0:k] = 0
    return T


def relation_rows(G: Group, gens=None) -> np.ndarray:
    """Images of all third boundaries under the rewrite, deduplicated."""
    gens = list(gens if gens is not None else G.generators)
    n = G.order
    t = G.table
    T = _rewrite_table(G, gens)
    b, c = np.meshgrid(np.arange(1, n), np.arange(1, n), indexing="ij")
    b, c = b.ravel(), c.ravel()
    bc = t[b, c]
    chunks = []
    for a in range(1, n):
        ab = t[a, b]
        rows = T[b, c] - T[ab, c] + T[a, bc] - T[a, b]
        chunks.append(np.unique(rows, axis=0))
    rows = np.unique(np.concatenate(chunks), axis=0)
    return rows[np.any(rows != 0, axis=1)]


def h2_sparse(G: Group, gens=None) -> AbelianInvariants:
    """Torsion of ``H2`` from local eliminations at each prime dividing ``|G|``.

    ``C2 / im d3`` is ``H2`` plus a free part of rank ``rank d2 = |G| - 1``;
    the rational rank check below confirms that nothing else is free, and
    since ``|G|`` kills ``H2`` a modulus of ``p^(v_p(|G|)+1)`` sees every
    local factor.
    """
    if G.order == 1:
        return AbelianInvariants(())
    gens = list(gens if gens is not None else G.generators)
    R = relation_rows(G, gens)
    width = R.shape[1]
    k = len(gens)
    live = [x * k + i for x in range(1, G.order) for i in range(k)]
    R = np.ascontiguousarray(R[:, live])
    width = len(live)
    rank_q = len(kernels.local_elimination(R, RANK_PRIME, 1))
    free = width - rank_q
    if free != G.order - 1:
        raise ArithmeticError(f"free rank {free} differs from rank d2 = {G.order - 1}")
    powers = {}
    for p, v in _factorize(G.order).items():
        vals = kernels.local_elimination(R, p, v + 1)
        if width - len(vals) != free:
            raise ArithmeticError(f"unexpected p^{v + 1}-divisible factors at p = {p}")
        exps = [e for e in vals if e > 0]
        if exps:
            powers[p] = exps
    return invariants_from_prime_powers(powers)


def h2_report(G: Group, *, sparse=None, max_order=DENSE_D3_BOUND) -> dict:
    rep = homology_report(G, sparse=sparse, max_order=max_order)
    return {"H1": rep.H1.as_list(), "H2": rep.H2.as_list(), "dims": rep.dims, "mode": rep.mode}


def order_of(inv: AbelianInvariants) -> int:
    return math.prod(inv.factors)
