# Compiled twin of py_kernels.py. Keep the two implementations in lockstep;
# the parity test compares them on random inputs.

import numpy as np

from libc.math cimport log2

NAME = "compiled"


def chain_info(const double[::1] pu, const double[:, ::1] pvu, const double[:, ::1] pxv,
               const double[:, ::1] w1, const double[:, ::1] w2):
    """Four mutual-information terms (bits) of a two-layer input law.

    Same contract as py_kernels.chain_info: returns (iu1, iu2, iv1, iv2)
    for I(U;Yi) and I(V;Yi|U) against the effective second-layer channel.
    """
    cdef Py_ssize_t nu = pu.shape[0]
    cdef Py_ssize_t nv = pvu.shape[1]
    cdef Py_ssize_t nx = pxv.shape[1]
    cdef Py_ssize_t ny_max = max(w1.shape[1], w2.shape[1])

    scratch_wv = np.empty((nv, ny_max), dtype=np.float64)
    scratch_puy = np.empty((nu, ny_max), dtype=np.float64)
    scratch_py = np.empty(ny_max, dtype=np.float64)
    cdef double[:, ::1] wv = scratch_wv
    cdef double[:, ::1] puy = scratch_puy
    cdef double[::1] py = scratch_py

    cdef double results[4]
    cdef const double[:, ::1] w
    cdef Py_ssize_t node, ny, u, v, x, y
    cdef double acc, p, q, iu, iv

    for node in range(2):
        w = w1 if node == 0 else w2
        ny = w.shape[1]

        for v in range(nv):
            for y in range(ny):
                acc = 0.0
                for x in range(nx):
                    acc += pxv[v, x] * w[x, y]
                wv[v, y] = acc

        for u in range(nu):
            for y in range(ny):
                acc = 0.0
                for v in range(nv):
                    acc += pu[u] * pvu[u, v] * wv[v, y]
                puy[u, y] = acc
        for y in range(ny):
            acc = 0.0
            for u in range(nu):
                acc += puy[u, y]
            py[y] = acc

        iu = 0.0
        for u in range(nu):
            if pu[u] <= 0.0:
                continue
            for y in range(ny):
                p = puy[u, y]
                if p > 0.0:
                    iu += p * log2(p / (pu[u] * py[y]))

        iv = 0.0
        for u in range(nu):
            if pu[u] <= 0.0:
                continue
            for v in range(nv):
                p = pu[u] * pvu[u, v]
                if p <= 0.0:
                    continue
                for y in range(ny):
                    q = wv[v, y]
                    if q > 0.0:
                        iv += p * q * log2(q * pu[u] / puy[u, y])

        results[2 * node] = iu
        results[2 * node + 1] = iv

    return results[0], results[2], results[1], results[3]
