# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled float Bellman sweep; see ``_pykernels.py`` for the reference version."""

from libc.stdlib cimport malloc, free

cdef double TOL = 1e-12


cdef double _value(double* z, int m, int n, double* t, int* basis) nogil:
    cdef int i, j, enter, leave, w = n + m + 1
    cdef double lo = -1e300, hi = 1e300, x, shift, best, a, r, p, f, zmin = 1e300
    for i in range(m):
        x = 1e300
        for j in range(n):
            if z[i * n + j] < x:
                x = z[i * n + j]
        if x > lo:
            lo = x
        if x < zmin:
            zmin = x
    for j in range(n):
        x = -1e300
        for i in range(m):
            if z[i * n + j] > x:
                x = z[i * n + j]
        if x < hi:
            hi = x
    if hi - lo <= TOL:
        return lo
    shift = 1.0 - zmin
    # tableau rows 0..m-1, objective row m
    for i in range((m + 1) * w):
        t[i] = 0.0
    for i in range(m):
        for j in range(n):
            t[i * w + j] = z[i * n + j] + shift
        t[i * w + n + i] = 1.0
        t[i * w + w - 1] = 1.0
        basis[i] = n + i
    for j in range(n):
        t[m * w + j] = -1.0
    while True:
        enter = -1
        for j in range(w - 1):
            if t[m * w + j] < -TOL:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best = 0.0
        for i in range(m):
            a = t[i * w + enter]
            if a > TOL:
                r = t[i * w + w - 1] / a
                if leave < 0 or r < best - TOL or (r <= best + TOL and basis[i] < basis[leave]):
                    best = r
                    leave = i
        if leave < 0:
            break
        p = t[leave * w + enter]
        for j in range(w):
            t[leave * w + j] /= p
        for i in range(m + 1):
            if i != leave:
                f = t[i * w + enter]
                if f != 0.0:
                    for j in range(w):
                        t[i * w + j] -= f * t[leave * w + j]
        basis[leave] = enter
    return 1.0 / t[m * w + w - 1] - shift


def matrix_game_value(z, int m, int n):
    cdef double* buf = <double*> malloc(sizeof(double) * (m * n + (m + 1) * (n + m + 1)))
    cdef int* basis = <int*> malloc(sizeof(int) * m)
    cdef int k
    try:
        for k in range(m * n):
            buf[k] = z[k]
        return _value(buf, m, n, buf + m * n, basis)
    finally:
        free(buf)
        free(basis)


def bellman_sweep(const int[::1] nr, const int[::1] nc, const int[::1] pair_ptr,
                  const int[::1] entry_ptr, const int[::1] targets,
                  const double[::1] probs, const unsigned char[::1] fixed,
                  const double[::1] values, double[::1] out):
    cdef int s, k, e, p, m, n, mmax = 1, nmax = 1
    cdef int ns = nr.shape[0]
    cdef double acc
    for s in range(ns):
        if nr[s] > mmax:
            mmax = nr[s]
        if nc[s] > nmax:
            nmax = nc[s]
    cdef double* z = <double*> malloc(sizeof(double) * (mmax * nmax + (mmax + 1) * (nmax + mmax + 1)))
    cdef int* basis = <int*> malloc(sizeof(int) * mmax)
    try:
        with nogil:
            for s in range(ns):
                if fixed[s]:
                    out[s] = values[s]
                    continue
                m = nr[s]
                n = nc[s]
                for k in range(m * n):
                    p = pair_ptr[s] + k
                    acc = 0.0
                    for e in range(entry_ptr[p], entry_ptr[p + 1]):
                        acc = acc + probs[e] * values[targets[e]]
                    z[k] = acc
                out[s] = _value(z, m, n, z + m * n, basis)
    finally:
        free(z)
        free(basis)
