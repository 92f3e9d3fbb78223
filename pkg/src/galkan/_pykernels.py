"""Pure-Python/numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable. Every function
here has a twin with the same signature in ``_ckernels.pyx``.
"""
from __future__ import annotations

from collections import deque

import numpy as np


def associativity_witness(table):
    """Return the first triple ``(a, b, c)`` with ``(ab)c != a(bc)``, else None."""
    t = np.asarray(table, dtype=np.int64)
    n = t.shape[0]
    for a in range(n):
        # left[b, c] = (ab)c, right[b, c] = a(bc)
        left = t[t[a]]
        right = t[a][t]
        bad = np.argwhere(left != right)
        if len(bad):
            b, c = bad[0]
            return (a, int(b), int(c))
    return None


def closure_mask(table, seeds, gens):
    """Mask of all ``x * w`` with ``x`` in seeds and ``w`` a positive word in gens."""
    t = np.asarray(table)
    mask = np.zeros(t.shape[0], dtype=np.uint8)
    queue = deque()
    for s in seeds:
        if not mask[s]:
            mask[s] = 1
            queue.append(int(s))
    gens = [int(g) for g in gens]
    while queue:
        x = queue.popleft()
        row = t[x]
        for g in gens:
            y = int(row[g])
            if not mask[y]:
                mask[y] = 1
                queue.append(y)
    return mask


def extend_hom(table_a, table_b, gens, imgs):
    """Extend ``gens[i] -> imgs[i]`` multiplicatively from the identity.

    Returns an int64 array with -1 outside the subgroup generated by gens, or
    None when two products disagree (the assignment is not a hom there).
    """
    ta = np.asarray(table_a)
    tb = np.asarray(table_b)
    phi = np.full(ta.shape[0], -1, dtype=np.int64)
    phi[0] = 0
    order = [0]
    k = len(gens)
    head = 0
    while head < len(order):
        x = order[head]
        head += 1
        px = phi[x]
        for i in range(k):
            y = ta[x, gens[i]]
            img = tb[px, imgs[i]]
            if phi[y] < 0:
                phi[y] = img
                order.append(int(y))
            elif phi[y] != img:
                return None
    return phi


def _inv_mod(a, m):
    return pow(int(a), -1, int(m))


def local_elimination(matrix, p, exponent):
    """Pivot valuations of an integer matrix over ``Z/p^exponent``.

    Gaussian elimination with minimal-valuation pivots. The returned list holds
    one valuation per pivot; its length is the number of local invariant
    factors that do not vanish modulo ``p**exponent``.
    """
    mod = int(p) ** int(exponent)
    if mod >= 2**31:
        raise OverflowError("modulus must stay below 2**31")
    m = np.array(matrix, dtype=np.int64) % mod
    vals = []
    rows, cols = m.shape
    r = 0
    while r < rows and r < cols:
        sub = m[r:, r:]
        nz = np.argwhere(sub != 0)
        if not len(nz):
            break
        best = None
        for v in range(exponent):
            divisor = int(p) ** (v + 1)
            hits = np.argwhere((sub % divisor != 0) & (sub != 0))
            if len(hits):
                best = (v, hits[0])
                break
        v, (i, j) = best
        i += r
        j += r
        if i != r:
            m[[r, i]] = m[[i, r]]
        if j != r:
            m[:, [r, j]] = m[:, [j, r]]
        piv = int(m[r, r])
        scale = int(p) ** v
        inv = _inv_mod(piv // scale, mod)
        col = m[r + 1:, r]
        nzr = np.nonzero(col)[0]
        if len(nzr):
            factors = ((col[nzr] // scale) % mod * inv) % mod
            block = m[r + 1 + nzr, r:]
            m[r + 1 + nzr, r:] = (block - (factors[:, None] * m[r, r:][None, :]) % mod) % mod
        vals.append(v)
        r += 1
    return vals
