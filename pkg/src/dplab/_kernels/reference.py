"""Numpy fallback implementations of the kernel core.

Same contracts as the compiled module: exact minima/maxima over all grid
pairs with ties broken by the first index in (space, time) scan order for
the inf-convolution and (time, x, y) order for the doubling scan.
"""

import numpy as np


def infconv_bruteforce(u, wx, wt):
    """Brute-force inf-convolution over every grid point.

    vals[i, m] = min over (j, n) of u[j, n] + wx[i, j] + wt[m, n], together
    with the minimizing indices.  wx/wt entries may be +inf (radius cutoff).
    """
    u = np.ascontiguousarray(u, dtype=float)
    wx = np.ascontiguousarray(wx, dtype=float)
    wt = np.ascontiguousarray(wt, dtype=float)
    nx, nt = u.shape
    vals = np.empty((nx, nt))
    arg_j = np.empty((nx, nt), dtype=np.int64)
    arg_n = np.empty((nx, nt), dtype=np.int64)
    wt_T = wt.T  # (n, m)
    for i in range(nx):
        cand = u[:, :, None] + wx[i, :, None, None] + wt_T[None, :, :]  # (j, n, m)
        flat = cand.reshape(nx * nt, nt)
        best = np.argmin(flat, axis=0)  # first occurrence == lex (j, n)
        vals[i] = flat[best, np.arange(nt)]
        arg_j[i] = best // nt
        arg_n[i] = best % nt
    return vals, arg_j, arg_n


def psi_pair_scan(u, lphi, pen_x, pen_y, pen_t):
    """Exhaustive max of u[i,m] - u[j,m] - lphi[i,j] - pen_x[i] - pen_y[j] - pen_t[m].

    Returns (max_value, i, j, m); ties resolved by the first triple in
    (m, i, j) scan order.
    """
    u = np.asarray(u, dtype=float)
    lphi = np.asarray(lphi, dtype=float)
    nx, nt = u.shape
    best = -np.inf
    best_idx = (0, 0, 0)
    base = lphi + pen_x[:, None] + pen_y[None, :]
    for m in range(nt):
        col = u[:, m]
        P = col[:, None] - col[None, :] - base - pen_t[m]
        k = int(np.argmax(P))
        v = P.flat[k]
        if v > best:
            best = float(v)
            best_idx = (k // nx, k % nx, m)
    return best, best_idx[0], best_idx[1], best_idx[2]
