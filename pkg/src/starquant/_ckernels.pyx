# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled structure-constant kernels.

Same contracts as ``_pykernels``; the Jacobian and two-term operator are
assembled by direct scatter of their O(n^5) nonzeros instead of dense outer
products.
"""
import numpy as np

ctypedef double complex complex_t

ctypedef fused scalar:
    double
    complex_t


def _prep(x):
    x = np.ascontiguousarray(x)
    if np.iscomplexobj(x):
        return x.astype(np.complex128, copy=False)
    return x.astype(np.float64, copy=False)


def associator(p, q):
    p = _prep(p)
    q = _prep(q)
    if p.dtype != q.dtype:
        p = p.astype(np.complex128)
        q = q.astype(np.complex128)
    out = np.zeros((p.shape[0],) * 4, dtype=p.dtype)
    if out.dtype == np.complex128:
        _associator[complex_t](p, q, out)
    else:
        _associator[double](p, q, out)
    return out


cdef void _associator(const scalar[:, :, ::1] p, const scalar[:, :, ::1] q, scalar[:, :, :, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = p.shape[0]
    cdef Py_ssize_t a, b, c, d, e
    cdef scalar pabc, qcbd
    for a in range(n):
        for b in range(n):
            for c in range(n):
                pabc = p[a, b, c]
                if pabc != 0:
                    for d in range(n):
                        for e in range(n):
                            out[a, b, d, e] += pabc * q[c, d, e]
    for c in range(n):
        for b in range(n):
            for d in range(n):
                qcbd = q[c, b, d]
                if qcbd != 0:
                    for a in range(n):
                        for e in range(n):
                            out[a, b, d, e] -= qcbd * p[a, c, e]


def associator_jacobian(x):
    x = _prep(x)
    n = x.shape[0]
    out = np.zeros((n**4, n**3), dtype=x.dtype)
    if out.dtype == np.complex128:
        _jacobian[complex_t](x, out)
    else:
        _jacobian[double](x, out)
    return out


cdef void _jacobian(const scalar[:, :, ::1] x, scalar[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n2 = n * n, n3 = n * n * n
    cdef Py_ssize_t a, b, d, e, k, row
    for a in range(n):
        for b in range(n):
            for d in range(n):
                for e in range(n):
                    row = a * n3 + b * n2 + d * n + e
                    for k in range(n):
                        # d/dx[a,b,k] of x[a,b,c] x[c,d,e]
                        out[row, a * n2 + b * n + k] += x[k, d, e]
                        # d/dx[k,d,e] of x[a,b,c] x[c,d,e]
                        out[row, k * n2 + d * n + e] += x[a, b, k]
                        # d/dx[k,b,d] of -x[c,b,d] x[a,c,e]
                        out[row, k * n2 + b * n + d] -= x[a, k, e]
                        # d/dx[a,k,e] of -x[c,b,d] x[a,c,e]
                        out[row, a * n2 + k * n + e] -= x[k, b, d]


def two_term_operator(x):
    x = _prep(x)
    n = x.shape[0]
    out = np.zeros((n**3, n**4), dtype=x.dtype)
    if out.dtype == np.complex128:
        _two_term[complex_t](x, out)
    else:
        _two_term[double](x, out)
    return out


cdef void _two_term(const scalar[:, :, ::1] x, scalar[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t n2 = n * n, n3 = n * n * n
    cdef Py_ssize_t i, j, k, a, b, row
    for i in range(n):
        for j in range(n):
            for k in range(n):
                row = i * n2 + j * n + k
                for a in range(n):
                    for b in range(n):
                        # x[a,b,i] lam[a,b,j,k]
                        out[row, a * n3 + b * n2 + j * n + k] += x[a, b, i]
                        # -x[j,a,b] lam[i,a,b,k]
                        out[row, i * n3 + a * n2 + b * n + k] -= x[j, a, b]
