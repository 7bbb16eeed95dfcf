# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdlib cimport free, malloc

cnp.import_array()


def classical_batch(cnp.int64_t[:, ::1] ops, cnp.int64_t[:, ::1] ctrl,
                    cnp.int64_t[:, ::1] states, long radix):
    cdef Py_ssize_t nb = states.shape[0], ng = ops.shape[0]
    cdef Py_ssize_t b, g, c
    cdef long op, t0, t1, p0, p1, cs, cn, lv, tmp
    cdef bint hit
    with nogil:
        for b in range(nb):
            for g in range(ng):
                cs = ops[g, 5]
                cn = ops[g, 6]
                hit = True
                for c in range(cs, cs + cn):
                    if states[b, ctrl[c, 0]] != ctrl[c, 1]:
                        hit = False
                        break
                if not hit:
                    continue
                op = ops[g, 0]
                t0 = ops[g, 1]
                if op == 2:
                    t1 = ops[g, 2]
                    tmp = states[b, t0]
                    states[b, t0] = states[b, t1]
                    states[b, t1] = tmp
                elif op == 0:
                    p0 = ops[g, 3]
                    p1 = ops[g, 4]
                    lv = states[b, t0]
                    if lv == p0:
                        states[b, t0] = p1
                    elif lv == p1:
                        states[b, t0] = p0
                else:
                    states[b, t0] = (states[b, t0] + ops[g, 3]) % radix
    return np.asarray(states)


cdef void _apply_diagonals(cnp.complex128_t[::1] psi, long width, long d,
                           double[:, ::1] scales) noexcept nogil:
    # psi viewed as (d^half, d^(width-half)); scale = left[i] * right[j]
    cdef long half = width // 2
    cdef Py_ssize_t nl = 1, nr = 1, i, j, q, k, blk
    cdef double s
    for q in range(half):
        nl *= d
    for q in range(half, width):
        nr *= d
    cdef double *left = <double *> malloc(nl * sizeof(double))
    cdef double *right = <double *> malloc(nr * sizeof(double))
    _kron(left, scales, 0, half, d)
    _kron(right, scales, half, width, d)
    for i in range(nl):
        s = left[i]
        for j in range(nr):
            psi[i * nr + j] = psi[i * nr + j] * (s * right[j])
    free(left)
    free(right)


cdef void _kron(double *out, double[:, ::1] scales, long lo, long hi, long d) noexcept nogil:
    cdef Py_ssize_t size = 1, q, i, lvl
    out[0] = 1.0
    for q in range(lo, hi):
        # expand in place from the back so earlier entries are still intact
        for i in range(size - 1, -1, -1):
            for lvl in range(d - 1, -1, -1):
                out[i * d + lvl] = out[i] * scales[q, lvl]
        size *= d


def damp_idle(cnp.complex128_t[::1] psi, long width, long radix,
              double[::1] lam, double[::1] uniforms):
    cdef Py_ssize_t q, pre, post, o, i, lvl, base, src, n = psi.shape[0]
    cdef long d = radix, chosen, j
    cdef double pops[16]
    cdef double keep[16]
    cdef double total, acc, u, norm, re, im, lam_max = 0.0
    cdef bint dirty = False
    out = np.zeros(width, dtype=np.int64)
    cdef cnp.int64_t[::1] res = out
    pending_arr = np.ones((width, radix), dtype=np.float64)
    cdef double[:, ::1] pending = pending_arr
    if d > 16:
        raise ValueError("radix above 16 not supported by the compiled kernel")
    for lvl in range(d):
        keep[lvl] = sqrt(1.0 - lam[lvl])
        if lam[lvl] > lam_max:
            lam_max = lam[lvl]
    with nogil:
        pre = 1
        post = n // d
        for q in range(width):
            u = uniforms[q]
            if u >= lam_max:
                for lvl in range(d):
                    pending[q, lvl] = keep[lvl]
                dirty = True
                pre *= d
                post //= d
                continue
            if dirty:
                _apply_diagonals(psi, width, d, pending)
                pending[:, :] = 1.0
                dirty = False
            for lvl in range(d):
                pops[lvl] = 0.0
            for o in range(pre):
                for lvl in range(d):
                    base = (o * d + lvl) * post
                    acc = 0.0
                    for i in range(post):
                        re = psi[base + i].real
                        im = psi[base + i].imag
                        acc += re * re + im * im
                    pops[lvl] += acc
            total = 0.0
            for lvl in range(d):
                total += pops[lvl]
            acc = 0.0
            chosen = 0
            for j in range(1, d):
                acc += lam[j] * pops[j]
                if u * total < acc:
                    chosen = j
                    break
            res[q] = chosen
            if chosen:
                norm = 1.0 / sqrt(pops[chosen])
                for o in range(pre):
                    base = o * d * post
                    src = base + chosen * post
                    for i in range(post):
                        psi[base + i] = psi[src + i] * norm
                    for i in range(base + post, base + d * post):
                        psi[i] = 0
            else:
                norm = 0.0
                for lvl in range(d):
                    norm += pops[lvl] * keep[lvl] * keep[lvl]
                norm = sqrt(norm / total)
                for lvl in range(d):
                    pending[q, lvl] = keep[lvl] / norm
                dirty = True
            pre *= d
            post //= d
        if dirty:
            _apply_diagonals(psi, width, d, pending)
        acc = 0.0
        for i in range(n):
            re = psi[i].real
            im = psi[i].imag
            acc += re * re + im * im
        norm = 1.0 / sqrt(acc)
        for i in range(n):
            psi[i] = psi[i] * norm
    return out
