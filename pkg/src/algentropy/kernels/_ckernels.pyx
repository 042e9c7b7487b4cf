# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled row kernels; same contract as ``_pykernels``.

Rows hold reduced residues, so cyclic coordinates add with one conditional
subtraction instead of a division.
"""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

cdef enum:
    KIND_CYC = 0
    KIND_TAB = 1
    KIND_SEMI = 2
    MAX_K = 512


cdef struct Prog:
    Py_ssize_t nb
    const int64_t* kind
    const int64_t* start
    const int64_t* width
    const int64_t* p0
    const int64_t* p1
    const int64_t* p2
    const int64_t* mods
    const int64_t* tables
    const int64_t* mats


cdef inline void _mul_one(const int64_t* x, const int64_t* y, int64_t* z, Prog* P, int64_t* scratch) noexcept nogil:
    cdef Py_ssize_t b, i, j, c, k
    cdef int64_t acc, x1, m, s, mo, base, n
    for b in range(P.nb):
        c = P.start[b]
        if P.kind[b] == KIND_CYC:
            n = P.p0[b]
            s = x[c] + y[c]
            z[c] = s - n if s >= n else s
        elif P.kind[b] == KIND_TAB:
            z[c] = P.tables[P.p0[b] + x[c] * P.p1[b] + y[c]]
        else:
            k = P.width[b]
            mo = P.p0[b]
            m = P.p2[b]
            x1 = x[c + k]
            base = P.p1[b] + x1 * k * k
            for i in range(k):
                acc = x[c + i]
                for j in range(k):
                    acc = acc + P.mats[base + i * k + j] * y[c + j]
                scratch[i] = acc % P.mods[mo + i]
            for i in range(k):
                z[c + i] = scratch[i]
            s = x1 + y[c + k]
            z[c + k] = s - m if s >= m else s


cdef Prog _prog(prog, list keep) except *:
    cdef Prog P
    cdef const int64_t[::1] v
    arrays = [np.ascontiguousarray(a, dtype=np.int64) for a in
              (prog.kind, prog.start, prog.width, prog.p0, prog.p1, prog.p2, prog.mods, prog.tables, prog.mats)]
    keep.extend(arrays)
    if max(list(prog.width) + [0]) > MAX_K:
        raise ValueError("semidirect block too wide for the compiled kernel")
    P.nb = arrays[0].shape[0]
    v = arrays[0]; P.kind = &v[0] if v.shape[0] else NULL
    v = arrays[1]; P.start = &v[0] if v.shape[0] else NULL
    v = arrays[2]; P.width = &v[0] if v.shape[0] else NULL
    v = arrays[3]; P.p0 = &v[0] if v.shape[0] else NULL
    v = arrays[4]; P.p1 = &v[0] if v.shape[0] else NULL
    v = arrays[5]; P.p2 = &v[0] if v.shape[0] else NULL
    v = arrays[6]; P.mods = &v[0]
    v = arrays[7]; P.tables = &v[0]
    v = arrays[8]; P.mats = &v[0]
    return P


def mul_rows(cnp.ndarray[int64_t, ndim=2, mode="c"] X, cnp.ndarray[int64_t, ndim=2, mode="c"] Y, prog):
    cdef Py_ssize_t n = X.shape[0], d = prog.ncols, r
    cdef bint bcast = Y.shape[0] == 1 and n != 1
    cdef cnp.ndarray[int64_t, ndim=2, mode="c"] Z = np.empty((n, d), dtype=np.int64)
    cdef list keep = []
    cdef Prog P = _prog(prog, keep)
    cdef int64_t scratch[MAX_K]
    cdef const int64_t* xp = <const int64_t*> X.data
    cdef const int64_t* yp = <const int64_t*> Y.data
    cdef int64_t* zp = <int64_t*> Z.data
    if n == 0 or d == 0:
        return Z
    with nogil:
        for r in range(n):
            _mul_one(xp + r * d, yp if bcast else yp + r * d, zp + r * d, &P, scratch)
    return Z


def product_keys(cnp.ndarray[int64_t, ndim=2, mode="c"] X, cnp.ndarray[int64_t, ndim=2, mode="c"] Y,
                 prog, cnp.ndarray[int64_t, ndim=1, mode="c"] places):
    cdef Py_ssize_t n = X.shape[0], m = Y.shape[0], d = prog.ncols, r, j, c
    cdef cnp.ndarray[int64_t, ndim=1, mode="c"] out = np.empty(n * m, dtype=np.int64)
    cdef cnp.ndarray[int64_t, ndim=1, mode="c"] zrow = np.empty(max(d, 1), dtype=np.int64)
    cdef list keep = []
    cdef Prog P = _prog(prog, keep)
    cdef const int64_t* xp = <const int64_t*> X.data
    cdef const int64_t* yp = <const int64_t*> Y.data
    cdef int64_t* zp = <int64_t*> zrow.data
    cdef const int64_t* pl = <const int64_t*> places.data
    cdef int64_t* op = <int64_t*> out.data
    cdef int64_t key
    cdef int64_t scratch[MAX_K]
    if d == 0:
        out[:] = 0
        return out
    with nogil:
        for j in range(m):
            for r in range(n):
                _mul_one(xp + r * d, yp + j * d, zp, &P, scratch)
                key = 0
                for c in range(d):
                    key = key + zp[c] * pl[c]
                op[j * n + r] = key
    return out
