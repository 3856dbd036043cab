"""Pure-numpy structure-constant kernels (fallback when the extension is absent).

Index convention throughout: ``x[a, b, c]`` is the component along basis
element ``a`` of ``e_b * e_c``.
"""
import numpy as np


def associator(p, q):
    """``A[a,b,d,e] = sum_c p[a,b,c] q[c,d,e] - q[c,b,d] p[a,c,e]``."""
    p = np.asarray(p)
    q = np.asarray(q)
    return np.einsum("abc,cde->abde", p, q) - np.einsum("cbd,ace->abde", q, p)


def associator_jacobian(x):
    """Derivative of ``associator(x, x)``; rows (a,b,d,e), columns (i,j,k)."""
    x = np.asarray(x)
    n = x.shape[0]
    eye = np.eye(n, dtype=x.dtype)
    jac = (
        np.einsum("ai,bj,kde->abdeijk", eye, eye, x)
        + np.einsum("abi,dj,ek->abdeijk", x, eye, eye)
        - np.einsum("bj,dk,aie->abdeijk", eye, eye, x)
        - np.einsum("ai,ek,jbd->abdeijk", eye, eye, x)
    )
    return jac.reshape(n**4, n**3)


def two_term_operator(x):
    """``(M lam)[i,j,k] = x[a,b,i] lam[a,b,j,k] - x[j,b,d] lam[i,b,d,k]`` as an n^3 x n^4 matrix."""
    x = np.asarray(x)
    n = x.shape[0]
    eye = np.eye(n, dtype=x.dtype)
    op = np.einsum("abi,jd,ke->ijkabde", x, eye, eye) - np.einsum(
        "jbd,ai,ke->ijkabde", x, eye, eye
    )
    return op.reshape(n**3, n**4)
