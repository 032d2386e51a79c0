# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled sequential sweeps. Chains are 2-D (n, k) C-contiguous blocks."""
from libc.stdint cimport int64_t

ctypedef fused num:
    int64_t
    double


def fill_forward(num[:, ::1] r, num[:, ::1] x, const int64_t[::1] pair_tri,
                 const int64_t[::1] pair_edge, const int64_t[::1] pair_sign,
                 const int64_t[:, ::1] tri_edges, const int64_t[:, ::1] tri_signs):
    cdef Py_ssize_t m = pair_tri.shape[0], k = r.shape[1]
    cdef Py_ssize_t i, j, c, t, e
    cdef int64_t s
    cdef num v
    with nogil:
        for i in range(m):
            t = pair_tri[i]
            e = pair_edge[i]
            s = pair_sign[i]
            for c in range(k):
                v = r[e, c] * <num>s
                x[t, c] = v
                for j in range(3):
                    r[tri_edges[t, j], c] -= v * <num>tri_signs[t, j]


def fill_adjoint(num[:, ::1] xbar, num[:, ::1] rbar, const int64_t[::1] pair_tri,
                 const int64_t[::1] pair_edge, const int64_t[::1] pair_sign,
                 const int64_t[:, ::1] tri_edges, const int64_t[:, ::1] tri_signs):
    cdef Py_ssize_t m = pair_tri.shape[0], k = xbar.shape[1]
    cdef Py_ssize_t i, j, c, t, e
    cdef int64_t s
    cdef num v
    with nogil:
        for i in range(m - 1, -1, -1):
            t = pair_tri[i]
            e = pair_edge[i]
            s = pair_sign[i]
            for c in range(k):
                v = xbar[t, c]
                for j in range(3):
                    v -= <num>tri_signs[t, j] * rbar[tri_edges[t, j], c]
                rbar[e, c] += <num>s * v


def squeeze_forward(num[:, ::1] x, const int64_t[::1] sig, const int64_t[::1] tet,
                    const int64_t[::1] sig_sign, const int64_t[:, ::1] tet_faces,
                    const int64_t[:, ::1] tet_signs):
    cdef Py_ssize_t m = sig.shape[0], k = x.shape[1]
    cdef Py_ssize_t i, j, c, t, f
    cdef num v
    with nogil:
        for i in range(m):
            t = tet[i]
            f = sig[i]
            for c in range(k):
                v = x[f, c] * <num>sig_sign[i]
                if v != 0:
                    for j in range(4):
                        x[tet_faces[t, j], c] -= v * <num>tet_signs[t, j]


def squeeze_adjoint(num[:, ::1] z, const int64_t[::1] sig, const int64_t[::1] tet,
                    const int64_t[::1] sig_sign, const int64_t[:, ::1] tet_faces,
                    const int64_t[:, ::1] tet_signs):
    cdef Py_ssize_t m = sig.shape[0], k = z.shape[1]
    cdef Py_ssize_t i, j, c, t, f
    cdef num v
    with nogil:
        for i in range(m - 1, -1, -1):
            t = tet[i]
            f = sig[i]
            for c in range(k):
                v = 0
                for j in range(4):
                    v += <num>tet_signs[t, j] * z[tet_faces[t, j], c]
                z[f, c] -= <num>sig_sign[i] * v


def tree_forward(num[:, ::1] acc, num[:, ::1] y, const int64_t[::1] order,
                 const int64_t[::1] parent, const int64_t[::1] pedge,
                 const int64_t[::1] sc, const int64_t[::1] sp):
    cdef Py_ssize_t m = order.shape[0], k = acc.shape[1]
    cdef Py_ssize_t i, c, v, p, e
    cdef num w
    with nogil:
        for i in range(m - 1, -1, -1):
            v = order[i]
            p = parent[v]
            e = pedge[v]
            for c in range(k):
                w = <num>sc[v] * acc[v, c]
                y[e, c] = w
                acc[p, c] -= <num>sp[v] * w


def tree_adjoint(const num[:, ::1] y, num[:, ::1] abar, const int64_t[::1] order,
                 const int64_t[::1] parent, const int64_t[::1] pedge,
                 const int64_t[::1] sc, const int64_t[::1] sp):
    cdef Py_ssize_t m = order.shape[0], k = abar.shape[1]
    cdef Py_ssize_t i, c, v, p, e
    cdef num w
    with nogil:
        for i in range(m):
            v = order[i]
            p = parent[v]
            e = pedge[v]
            for c in range(k):
                w = y[e, c] - <num>sp[v] * abar[p, c]
                abar[v, c] += <num>sc[v] * w
