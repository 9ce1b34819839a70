# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Semantics match ``_kernels_py`` exactly."""

import numpy as np
cimport numpy as cnp

cnp.import_array()


def pure_payoffs(own_prices, rival_prices, double r_own, double r_rival,
                 double u, double c, double k, double n, double tol):
    cdef const double[:] own = np.ascontiguousarray(own_prices, dtype=np.float64)
    cdef const double[:] rival = np.ascontiguousarray(rival_prices, dtype=np.float64)
    cdef Py_ssize_t ni = own.shape[0], nj = rival.shape[0], i, j
    out = np.empty((ni, nj), dtype=np.float64)
    cdef double[:, :] res = out
    cdef double uninformed = k * n / (2.0 * u)
    cdef double gap, units
    for i in range(ni):
        for j in range(nj):
            gap = (r_own * u - own[i]) - (r_rival * u - rival[j])
            if gap > tol:
                units = n - uninformed
            elif gap < -tol:
                units = uninformed
            else:
                units = 0.5 * n
            res[i, j] = (own[i] - c) * units
    return out


def allocate_sales(prices, reputations, double u, Py_ssize_t n_uninformed,
                   draws, double tol):
    cdef const double[:, :] p = np.ascontiguousarray(prices, dtype=np.float64)
    cdef const double[:] rep = np.ascontiguousarray(reputations, dtype=np.float64)
    cdef const double[:, :] d = np.ascontiguousarray(draws, dtype=np.float64)
    cdef Py_ssize_t rounds = p.shape[0], sellers = p.shape[1], buyers = d.shape[1]
    cdef Py_ssize_t t, s, b, pick, m, slot, seen
    uninf_arr = np.zeros((rounds, sellers), dtype=np.int64)
    inf_arr = np.zeros((rounds, sellers), dtype=np.int64)
    cdef cnp.int64_t[:, :] uninf = uninf_arr
    cdef cnp.int64_t[:, :] inf = inf_arr
    cdef double util[16]
    cdef int tied[16]
    cdef double best
    if sellers > 16:
        raise ValueError("at most 16 sellers supported")
    for t in range(rounds):
        best = -1e308
        for s in range(sellers):
            util[s] = rep[s] * u - p[t, s]
            if util[s] > best:
                best = util[s]
        m = 0
        for s in range(sellers):
            tied[s] = (util[s] >= best - tol) and (best >= 0.0)
            m += tied[s]
        for b in range(buyers):
            if b < n_uninformed:
                pick = <Py_ssize_t>(d[t, b] * sellers)
                if pick > sellers - 1:
                    pick = sellers - 1
                if util[pick] >= 0.0:
                    uninf[t, pick] += 1
            elif m > 0:
                slot = <Py_ssize_t>(d[t, b] * m)
                if slot > m - 1:
                    slot = m - 1
                seen = 0
                for s in range(sellers):
                    if tied[s]:
                        if seen == slot:
                            inf[t, s] += 1
                            break
                        seen += 1
    return uninf_arr, inf_arr
