# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Karp kernels; see ``_pykernels`` for the contract."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def karp_fill(Py_ssize_t n, Py_ssize_t source, indptr, pred, weight):
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const cnp.int64_t[::1] pr = np.ascontiguousarray(pred, dtype=np.int64)
    cdef const double[::1] w = np.ascontiguousarray(weight, dtype=np.float64)
    F_arr = np.zeros((n + 1, n), dtype=np.float64)
    B_arr = np.full((n + 1, n), -1, dtype=np.int32)
    R_arr = np.zeros((n + 1, n), dtype=np.uint8)
    cdef double[:, ::1] F = F_arr
    cdef cnp.int32_t[:, ::1] B = B_arr
    cdef cnp.uint8_t[:, ::1] R = R_arr
    cdef Py_ssize_t k, j, e, i, arg
    cdef double best, cand
    R[0, source] = 1
    with nogil:
        for k in range(1, n + 1):
            for j in range(n):
                arg = -1
                best = 0.0
                for e in range(ip[j], ip[j + 1]):
                    i = pr[e]
                    if R[k - 1, i]:
                        cand = F[k - 1, i] + w[e]
                        if arg < 0 or cand < best:
                            best = cand
                            arg = i
                if arg >= 0:
                    F[k, j] = best
                    R[k, j] = 1
                    B[k, j] = <cnp.int32_t>arg
    return F_arr, B_arr, R_arr.view(bool)


def karp_min_mean(F_in, R_in, scan_in, double tol):
    cdef const double[:, ::1] F = np.ascontiguousarray(F_in, dtype=np.float64)
    cdef const cnp.int64_t[::1] scan = np.ascontiguousarray(scan_in, dtype=np.int64)
    cdef const cnp.uint8_t[:, ::1] R = np.ascontiguousarray(R_in, dtype=np.uint8)
    cdef Py_ssize_t n = F.shape[1]
    cdef Py_ssize_t s, v, k, k_top
    cdef Py_ssize_t v_star = -1, k_star = -1
    cdef double best_mu = 0.0, top, ratio
    with nogil:
        for s in range(scan.shape[0]):
            v = scan[s]
            if not R[n, v]:
                continue
            top = 0.0
            k_top = -1
            for k in range(n):
                if R[k, v]:
                    ratio = (F[n, v] - F[k, v]) / <double>(n - k)
                    if k_top < 0 or ratio > top + tol:
                        top = ratio
                        k_top = k
            if k_top < 0:
                continue
            if v_star < 0 or top < best_mu - tol:
                best_mu = top
                v_star = v
                k_star = k_top
    return best_mu, v_star, k_star
