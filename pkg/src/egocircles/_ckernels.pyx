# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in _pykernels.py (same signatures)."""
import numpy as np
from libc.math cimport exp, log1p, fabs

cdef double SIM_CAP = 1e6
cdef double EPS = 1e-6


cdef inline double _softplus(double x) nogil:
    if x > 0:
        return x + log1p(exp(-x))
    return log1p(exp(x))


def pair_betas(const double[:, :] sims, const unsigned char[:, :] membership,
               const double[:] taus):
    cdef Py_ssize_t n = sims.shape[0], k = taus.shape[0]
    b1_arr = np.zeros((n, n))
    b2_arr = np.zeros((n, n))
    cdef double[:, :] b1 = b1_arr
    cdef double[:, :] b2 = b2_arr
    cdef Py_ssize_t i, j, c
    cdef double lam = 0.0, t, s1, s2
    for c in range(k):
        if c == 0 or taus[c] > lam:
            lam = taus[c]
    with nogil:
        for i in range(n):
            for j in range(n):
                s1 = 0.0
                s2 = 0.0
                for c in range(k):
                    t = 1.0 / (sims[i, j] - taus[c] + lam)
                    if membership[c, i] and membership[c, j]:
                        s1 = s1 + t
                    else:
                        s2 = s2 + t
                b1[i, j] = s1
                b2[i, j] = s2
    return b1_arr, b2_arr


def log_likelihood(const double[:, :] sims, const unsigned char[:, :] adj,
                   const unsigned char[:, :] membership, const double[:] taus):
    cdef Py_ssize_t n = sims.shape[0], k = taus.shape[0]
    cdef Py_ssize_t i, j, c
    cdef double lam = 0.0, t, s1, s2, phi, edge_sum = 0.0, sp_sum = 0.0
    for c in range(k):
        if c == 0 or taus[c] > lam:
            lam = taus[c]
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                s1 = 0.0
                s2 = 0.0
                for c in range(k):
                    t = 1.0 / (sims[i, j] - taus[c] + lam)
                    if membership[c, i] and membership[c, j]:
                        s1 = s1 + t
                    else:
                        s2 = s2 + t
                phi = s1 * s1 - s2 * s2
                if adj[i, j]:
                    edge_sum = edge_sum + phi
                sp_sum = sp_sum + _softplus(phi)
    return edge_sum - sp_sum


def circle_thresholds(const double[:, :] dist, const unsigned char[:, :] membership):
    cdef Py_ssize_t k = membership.shape[0], n = membership.shape[1]
    out_arr = np.empty(k)
    cdef double[:] out = out_arr
    idx_arr = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[:] idx = idx_arr
    cdef Py_ssize_t c, a, b, s
    cdef double total, sim, best
    with nogil:
        for c in range(k):
            s = 0
            for a in range(n):
                if membership[c, a]:
                    idx[s] = a
                    s = s + 1
            if s <= 1:
                out[c] = SIM_CAP
                continue
            best = SIM_CAP
            for a in range(s):
                total = 0.0
                for b in range(s):
                    total = total + dist[idx[a], idx[b]]
                total = total / (s - 1)
                if total < EPS:
                    total = EPS
                sim = 1.0 / total
                if sim > SIM_CAP:
                    sim = SIM_CAP
                if sim < best:
                    best = sim
            out[c] = best
    return out_arr
