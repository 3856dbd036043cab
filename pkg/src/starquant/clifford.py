"""Clifford algebras generated from ``e_i e_j + e_j e_i = 2 h delta_ij``.

Blades are encoded as bitmasks over the generators and ordered graded
lexicographically, so ``Cliff(2)`` has basis ``1, e1, e2, e12``.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .algebra import AlgebraSpec, ProductCurve, curve_eval
from .errors import CapacityError

MAX_GENERATORS = 8


def blade_basis(n: int) -> list:
    """Bitmasks of all blades of ``n`` generators, graded lexicographic order."""
    out = []
    for grade in range(n + 1):
        for combo in combinations(range(n), grade):
            out.append(sum(1 << i for i in combo))
    return out


def blade_name(mask: int) -> str:
    if mask == 0:
        return "1"
    return "e" + "".join(str(i + 1) for i in range(mask.bit_length()) if mask >> i & 1)


def _grade(mask: int) -> int:
    return bin(mask).count("1")


def reorder_sign(a: int, b: int) -> int:
    """Sign from moving the generators of blade ``b`` past those of ``a`` into sorted order."""
    swaps = 0
    a >>= 1
    while a:
        swaps += _grade(a & b)
        a >>= 1
    return -1 if swaps & 1 else 1


def blade_product(a: int, b: int) -> tuple:
    """``e_A e_B = sign * h**power * e_(A xor B)`` as ``(mask, sign, power)``."""
    return a ^ b, reorder_sign(a, b), _grade(a & b)


def clifford_curve(n: int) -> ProductCurve:
    """Structure constants of ``Cliff(n)`` as a polynomial in ``h``."""
    if not 1 <= n <= MAX_GENERATORS:
        raise CapacityError(f"generator count must be in 1..{MAX_GENERATORS}, got {n}")
    basis = blade_basis(n)
    index = {m: i for i, m in enumerate(basis)}
    dim = len(basis)
    coeffs = np.zeros((n + 1, dim, dim, dim), dtype=np.int8)
    for b, mb in enumerate(basis):
        for c, mc in enumerate(basis):
            mask, sign, power = blade_product(mb, mc)
            coeffs[power, index[mask], b, c] = sign
    return ProductCurve(tuple(coeffs))


def reversal_signs(n: int) -> np.ndarray:
    return np.array([(-1) ** (g * (g - 1) // 2) for g in map(_grade, blade_basis(n))], float)


def clifford_algebra(n: int) -> tuple:
    """``(AlgebraSpec, ProductCurve)`` for ``Cliff(n)``.

    The commutative product is the exterior product (the curve at ``h = 0``),
    the involution is blade reversal, and the stored bracket is the curve's
    tangent at ``h = 0``, which is the fermionic initial direction.
    """
    curve = clifford_curve(n)
    basis = blade_basis(n)
    dim = len(basis)
    alg = AlgebraSpec(
        dim=dim,
        field="real",
        bullet=curve_eval(curve, 0.0),
        unit=np.eye(dim)[0],
        involution=np.diag(reversal_signs(n)),
        poisson=curve_eval(curve, 0.0, 1),
        grading="fermionic",
        parity=tuple(_grade(m) % 2 for m in basis),
        basis_names=tuple(blade_name(m) for m in basis),
    )
    return alg, curve


def generator_rotation(n: int, i: int, j: int, angle: float = np.pi / 2) -> np.ndarray:
    """Matrix on ``Cliff(n)`` induced by rotating generators ``e_i, e_j`` by ``angle``.

    The map is extended multiplicatively to blades, so it preserves the
    Clifford relations and is orthogonal on blade coordinates.
    """
    R = np.eye(n)
    c, s = np.cos(angle), np.sin(angle)
    R[i, i], R[j, i], R[i, j], R[j, j] = c, s, -s, c
    basis = blade_basis(n)
    index = {m: k for k, m in enumerate(basis)}
    dim = len(basis)
    M = np.zeros((dim, dim))
    for col, mask in enumerate(basis):
        # image of e_A is the wedge of images of its generators
        image = {0: 1.0}
        for g in range(n):
            if not mask >> g & 1:
                continue
            nxt = {}
            for blade, coef in image.items():
                for t in range(n):
                    if R[t, g] == 0.0 or blade >> t & 1:
                        continue
                    out, sign, _ = blade_product(blade, 1 << t)
                    nxt[out] = nxt.get(out, 0.0) + coef * sign * R[t, g]
            image = nxt
        for blade, coef in image.items():
            M[index[blade], col] += coef
    M[np.abs(M) < 1e-15] = 0.0
    return M
