# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel core: tight loops for the two hot pair scans."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def infconv_bruteforce(double[:, ::1] u, double[:, ::1] wx, double[:, ::1] wt):
    """Same contract as the reference kernel: full scan, lex (j, n) ties."""
    cdef Py_ssize_t nx = u.shape[0]
    cdef Py_ssize_t nt = u.shape[1]
    vals_arr = np.empty((nx, nt), dtype=np.float64)
    argj_arr = np.empty((nx, nt), dtype=np.int64)
    argn_arr = np.empty((nx, nt), dtype=np.int64)
    cdef double[:, ::1] vals = vals_arr
    cdef long long[:, ::1] arg_j = argj_arr
    cdef long long[:, ::1] arg_n = argn_arr
    cdef Py_ssize_t i, m, j, n, bj, bn
    cdef double best, cand, wxi

    for i in range(nx):
        for m in range(nt):
            best = u[0, 0] + wx[i, 0] + wt[m, 0]
            bj = 0
            bn = 0
            for j in range(nx):
                wxi = wx[i, j]
                for n in range(nt):
                    cand = u[j, n] + wxi + wt[m, n]
                    if cand < best:
                        best = cand
                        bj = j
                        bn = n
            vals[i, m] = best
            arg_j[i, m] = bj
            arg_n[i, m] = bn
    return vals_arr, argj_arr, argn_arr


def psi_pair_scan(double[:, ::1] u, double[:, ::1] lphi,
                  double[::1] pen_x, double[::1] pen_y, double[::1] pen_t):
    """Same contract as the reference kernel: full scan, lex (m, i, j) ties."""
    cdef Py_ssize_t nx = u.shape[0]
    cdef Py_ssize_t nt = u.shape[1]
    cdef Py_ssize_t i, j, m, bi = 0, bj = 0, bm = 0
    cdef double best = -1e300
    cdef double v

    # grouping matches the numpy reference bit-for-bit:
    # (u_i - u_j) - ((lphi_ij + pen_x_i) + pen_y_j) - pen_t_m
    for m in range(nt):
        for i in range(nx):
            for j in range(nx):
                v = (u[i, m] - u[j, m]) - ((lphi[i, j] + pen_x[i]) + pen_y[j]) - pen_t[m]
                if v > best:
                    best = v
                    bi = i
                    bj = j
                    bm = m
    return best, bi, bj, bm
