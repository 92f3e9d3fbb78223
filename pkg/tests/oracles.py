"""Independent reference computations used only by the tests.

Nothing here calls into the package beyond reading a group's table.
"""
from __future__ import annotations

import itertools

import numpy as np


def count_homs_brute(A, B) -> int:
    """Filter all ``|B|^|A|`` maps; only sensible for tiny groups."""
    ta, tb = np.asarray(A.table), np.asarray(B.table)
    n, m = ta.shape[0], tb.shape[0]
    count = 0
    for images in itertools.product(range(m), repeat=n - 1):
        f = np.array((0,) + images)
        if np.array_equal(f[ta], tb[f[:, None], f[None, :]]):
            count += 1
    return count


def _valuation(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while x % p == 0 and v < cap:
        x //= p
        v += 1
    return v


def pivot_valuations(rows, p: int, exponent: int) -> list:
    """Local Smith form over Z/p^exponent by minimal-valuation pivoting."""
    mod = p ** exponent
    M = np.array(rows, dtype=object) % mod
    n_rows, n_cols = M.shape
    vals = []
    live_rows = list(range(n_rows))
    live_cols = list(range(n_cols))
    while live_rows and live_cols:
        best = None
        for i in live_rows:
            for j in live_cols:
                x = int(M[i, j])
                if x:
                    v = _valuation(x, p, exponent)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        unit = int(M[i, j]) // p ** v
        inv = pow(unit, -1, mod)
        for r in live_rows:
            if r == i or not M[r, j]:
                continue
            factor = (int(M[r, j]) // p ** v) * inv % mod
            M[r, :] = (M[r, :] - factor * M[i, :]) % mod
        live_rows.remove(i)
        live_cols.remove(j)
        vals.append(v)
    return vals


def cocycle_system(G):
    """Rows of the 2-cocycle condition for unnormalised cochains ``f: G x G -> Z``.

    ``f(h, k) - f(gh, k) + f(g, hk) - f(g, h) = 0`` for all triples.
    """
    t = np.asarray(G.table)
    n = t.shape[0]
    rows = []
    for g in range(n):
        for h in range(n):
            for k in range(n):
                row = [0] * (n * n)
                row[h * n + k] += 1
                row[t[g, h] * n + k] -= 1
                row[g * n + t[h, k]] += 1
                row[g * n + h] -= 1
                if any(row):
                    rows.append(row)
    return rows


def _factorize(n):
    out, d = {}, 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def h2_by_cocycles(G) -> list:
    """Invariant factors of H_2(G; Z) from counts of 2-cocycles.

    ``|Z^2(G; Z/m)| = |Hom(H_2 G, Z/m)| * m^|G|`` for trivial coefficients,
    so the counts for ``m = p, p^2, ...`` reveal the p-part of H_2.
    """
    n = G.order
    if n == 1:
        return []
    rows = cocycle_system(G)
    variables = n * n
    powers = {}
    for p, v in _factorize(n).items():
        top = v + 1
        vals = pivot_valuations(rows, p, top)
        logs = [0]
        for j in range(1, top + 1):
            image = sum(j - min(x, j) for x in vals)
            z2 = j * variables - image  # log_p |Z^2(G; Z/p^j)|
            logs.append(z2 - j * n)  # log_p |Hom(H_2, Z/p^j)|
        # number of cyclic p-factors of order >= p^j
        at_least = [logs[j] - logs[j - 1] for j in range(1, top + 1)]
        exps = []
        for j in range(1, top + 1):
            nxt = at_least[j] if j < top else 0
            exps += [j] * (at_least[j - 1] - nxt)
        powers[p] = exps
    # combine prime powers into invariant factors
    factors = []
    while any(powers.values()):
        d = 1
        for p, exps in powers.items():
            if exps:
                d *= p ** max(exps)
                exps.remove(max(exps))
        factors.append(d)
    return sorted(factors)
