# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels; see ``_pykernels`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()


def associativity_witness(table):
    cdef const int32_t[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t a, b, c
    cdef int32_t ab
    for a in range(n):
        for b in range(n):
            ab = t[a, b]
            for c in range(n):
                if t[ab, c] != t[a, t[b, c]]:
                    return (a, b, c)
    return None


def closure_mask(table, seeds, gens):
    cdef const int32_t[:, ::1] t = np.ascontiguousarray(table, dtype=np.int32)
    cdef Py_ssize_t n = t.shape[0]
    cdef const int64_t[::1] g = np.ascontiguousarray(list(gens), dtype=np.int64)
    cdef Py_ssize_t k = g.shape[0]
    out = np.zeros(n, dtype=np.uint8)
    cdef uint8_t[::1] mask = out
    cdef int64_t[::1] queue = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 0, i
    cdef int64_t x, y
    for s in seeds:
        x = s
        if not mask[x]:
            mask[x] = 1
            queue[tail] = x
            tail += 1
    while head < tail:
        x = queue[head]
        head += 1
        for i in range(k):
            y = t[x, g[i]]
            if not mask[y]:
                mask[y] = 1
                queue[tail] = y
                tail += 1
    return out


def extend_hom(table_a, table_b, gens, imgs):
    cdef const int32_t[:, ::1] ta = np.ascontiguousarray(table_a, dtype=np.int32)
    cdef const int32_t[:, ::1] tb = np.ascontiguousarray(table_b, dtype=np.int32)
    cdef const int64_t[::1] g = np.ascontiguousarray(list(gens), dtype=np.int64)
    cdef const int64_t[::1] im = np.ascontiguousarray(list(imgs), dtype=np.int64)
    cdef Py_ssize_t n = ta.shape[0]
    cdef Py_ssize_t k = g.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] phi = out
    cdef int64_t[::1] order = np.empty(n, dtype=np.int64)
    cdef Py_ssize_t head = 0, tail = 1, i
    cdef int64_t x, y, px, img
    phi[0] = 0
    order[0] = 0
    while head < tail:
        x = order[head]
        head += 1
        px = phi[x]
        for i in range(k):
            y = ta[x, g[i]]
            img = tb[px, im[i]]
            if phi[y] < 0:
                phi[y] = img
                order[tail] = y
                tail += 1
            elif phi[y] != img:
                return None
    return out


cdef int64_t _valuation(int64_t a, int64_t p, int exponent):
    cdef int v = 0
    while v < exponent and a % p == 0:
        a //= p
        v += 1
    return v


cdef int64_t _inv_mod(int64_t a, int64_t m):
    cdef int64_t t = 0, newt = 1, r = m, newr = a % m, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += m
    return t


def local_elimination(matrix, p, exponent):
    cdef int64_t pp = p
    cdef int e = exponent
    cdef int64_t mod = 1
    cdef int _i
    for _i in range(e):
        mod *= pp
    if mod >= (<int64_t>1) << 31:
        raise OverflowError("modulus must stay below 2**31")
    arr = np.ascontiguousarray(np.asarray(matrix, dtype=np.int64) % mod)
    cdef int64_t[:, ::1] m = arr
    cdef Py_ssize_t rows = m.shape[0], cols = m.shape[1]
    cdef Py_ssize_t r = 0, i, j, bi, bj, live
    cdef int64_t piv, scale, inv, f, tmp, a
    cdef int bv, v
    # rows known to be zero are swapped past `live`
    live = rows
    vals = []
    while r < live and r < cols:
        bv = e
        bi = -1
        bj = -1
        i = r
        while i < live:
            tmp = 0
            for j in range(r, cols):
                a = m[i, j]
                if a != 0:
                    tmp = 1
                    v = _valuation(a, pp, e)
                    if v < bv:
                        bv = v
                        bi = i
                        bj = j
                        if v == 0:
                            break
            if tmp == 0:
                live -= 1
                if i != live:
                    for j in range(cols):
                        a = m[i, j]
                        m[i, j] = m[live, j]
                        m[live, j] = a
                continue
            if bv == 0:
                break
            i += 1
        if bi < 0:
            break
        if bi != r:
            for j in range(cols):
                a = m[r, j]
                m[r, j] = m[bi, j]
                m[bi, j] = a
        if bj != r:
            for i in range(live):
                a = m[i, r]
                m[i, r] = m[i, bj]
                m[i, bj] = a
        scale = 1
        for _i in range(bv):
            scale *= pp
        piv = m[r, r]
        inv = _inv_mod(piv // scale, mod)
        for i in range(r + 1, live):
            a = m[i, r]
            if a != 0:
                f = ((a // scale) % mod) * inv % mod
                for j in range(r, cols):
                    if m[r, j] != 0:
                        m[i, j] = (m[i, j] - f * m[r, j] % mod) % mod
                        if m[i, j] < 0:
                            m[i, j] += mod
        vals.append(bv)
        r += 1
    return vals
