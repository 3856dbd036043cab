"""The manifold of star products as the zero set of quadratic constraints.

Points live in real product-coordinate space: ``x = p.ravel()`` for a real
algebra, ``x = [Re p.ravel(), Im p.ravel()]`` for a complex one.  Every block
is at most quadratic, so its second derivative along ``v`` is a constant
``D2f[v, v]`` and ``J(x) a + D2f[v, v] = 0`` for any curve of the zero set.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .algebra import AlgebraSpec
from .errors import ConfigurationError, DimensionError
from .linalg import realify, realify_linear


def product_to_coords(p) -> np.ndarray:
    p = np.asarray(p)
    if np.iscomplexobj(p):
        return realify(p)
    return np.asarray(p, dtype=np.float64).reshape(-1)


def coords_to_product(x, n: int, is_complex: bool = False) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    size = n**3
    if x.shape != ((2 * size,) if is_complex else (size,)):
        raise DimensionError(f"expected {2 * size if is_complex else size} coordinates, got {x.shape}")
    if is_complex:
        return (x[:size] + 1j * x[size:]).reshape(n, n, n)
    return x.reshape(n, n, n)


class AssociatorBlock:
    """``A(x, x)`` over all basis triples: ``n^4`` quadratic equations (doubled if complex)."""

    kind = "associator"

    def __init__(self, n: int, is_complex: bool = False):
        self.n = n
        self.is_complex = is_complex
        self.size = n**4 * (2 if is_complex else 1)
        self.ambient_dim = n**3 * (2 if is_complex else 1)

    def _p(self, x):
        return coords_to_product(x, self.n, self.is_complex)

    def residual(self, x):
        p = self._p(x)
        return product_to_coords(kernels.associator(p, p))

    def jacobian(self, x):
        jc = kernels.associator_jacobian(self._p(x))
        return realify_linear(jc) if self.is_complex else jc

    def second_derivative(self, v):
        q = self._p(v)
        return 2.0 * product_to_coords(kernels.associator(q, q))


class LinearBlock:
    """Affine equations ``L x - t = 0``."""

    def __init__(self, kind: str, matrix, offset):
        self.kind = kind
        self.matrix = np.asarray(matrix, dtype=np.float64)
        self.offset = np.asarray(offset, dtype=np.float64).reshape(-1)
        self.size, self.ambient_dim = self.matrix.shape
        if self.offset.shape != (self.size,):
            raise DimensionError("offset length must match the number of rows")

    def residual(self, x):
        return self.matrix @ x - self.offset

    def jacobian(self, x):
        return self.matrix

    def second_derivative(self, v):
        return np.zeros(self.size)


class QuadraticBlock:
    """Rows ``x.Q_r.x + l_r.x + c_r = 0`` with symmetric ``Q_r``."""

    kind = "quadratic"

    def __init__(self, quadratic, linear=None, constant=None):
        Q = np.asarray(quadratic, dtype=np.float64)
        if Q.ndim == 2:
            Q = Q[None]
        m, N, N2 = Q.shape
        if N != N2:
            raise DimensionError("quadratic forms must be square")
        self.quadratic = 0.5 * (Q + np.transpose(Q, (0, 2, 1)))
        self.linear = np.zeros((m, N)) if linear is None else np.asarray(linear, float).reshape(m, N)
        self.constant = np.zeros(m) if constant is None else np.asarray(constant, float).reshape(m)
        self.size, self.ambient_dim = m, N

    def residual(self, x):
        return np.einsum("i,rij,j->r", x, self.quadratic, x) + self.linear @ x + self.constant

    def jacobian(self, x):
        return 2.0 * self.quadratic @ x + self.linear

    def second_derivative(self, v):
        return 2.0 * np.einsum("i,rij,j->r", v, self.quadratic, v)


@dataclass(frozen=True)
class QuadraticConstraintSystem:
    ambient_dim: int
    blocks: tuple = ()
    n: Optional[int] = None
    is_complex: bool = False

    def __post_init__(self):
        for b in self.blocks:
            if b.ambient_dim != self.ambient_dim:
                raise DimensionError(
                    f"{b.kind} block expects {b.ambient_dim} coordinates, system has {self.ambient_dim}"
                )
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def size(self) -> int:
        return sum(b.size for b in self.blocks)

    def block(self, kind: str):
        for b in self.blocks:
            if b.kind == kind:
                return b
        raise ConfigurationError(f"system has no {kind} block")

    def _check(self, x):
        x = np.asarray(x, dtype=np.float64).reshape(-1)
        if x.size != self.ambient_dim:
            raise DimensionError(f"expected {self.ambient_dim} coordinates, got {x.size}")
        return x

    def residual(self, x) -> np.ndarray:
        x = self._check(x)
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([b.residual(x) for b in self.blocks])

    def jacobian(self, x) -> np.ndarray:
        x = self._check(x)
        if not self.blocks:
            return np.zeros((0, self.ambient_dim))
        return np.vstack([b.jacobian(x) for b in self.blocks])

    def second_derivative(self, v) -> np.ndarray:
        v = self._check(v)
        if not self.blocks:
            return np.zeros(0)
        return np.concatenate([b.second_derivative(v) for b in self.blocks])


def _unit_block(alg: AlgebraSpec) -> LinearBlock:
    n = alg.dim
    eye = np.eye(n)
    # rows (side, a, b); columns (a', c, b') of x[a', c, b']
    left = np.einsum("c,aA,bB->abAcB", alg.unit, eye, eye).reshape(n * n, n**3)
    right = np.einsum("c,aA,bB->abABc", alg.unit, eye, eye).reshape(n * n, n**3)
    A = np.vstack([left, right])
    target = np.concatenate([eye.reshape(-1), eye.reshape(-1)])
    if alg.field == "complex":
        return LinearBlock("unit", realify_linear(A), realify(target.astype(complex)))
    return LinearBlock("unit", A.real, target)


def _involution_block(alg: AlgebraSpec) -> LinearBlock:
    n = alg.dim
    S = alg.involution
    star_of_product = np.kron(S, np.eye(n * n))  # S applied to the output index
    swapped = np.kron(np.eye(n), np.einsum("pc,qb->bcpq", S, S).reshape(n * n, n * n))
    if alg.field == "complex":
        if alg.conjugate:
            L = realify_linear(-swapped, star_of_product)
        else:
            L = realify_linear(star_of_product - swapped)
        return LinearBlock("involution", L, np.zeros(L.shape[0]))
    return LinearBlock("involution", (star_of_product - swapped).real, np.zeros(n**3))


def build_constraint_system(
    alg: AlgebraSpec, associativity: bool = True, unit: bool = False, involution: bool = False
) -> QuadraticConstraintSystem:
    """Constraint blocks defining star products of ``alg``; at least one flag must be set."""
    if not (associativity or unit or involution):
        raise ConfigurationError("select at least one constraint block")
    is_complex = alg.field == "complex"
    blocks = []
    if associativity:
        blocks.append(AssociatorBlock(alg.dim, is_complex))
    if unit:
        blocks.append(_unit_block(alg))
    if involution:
        blocks.append(_involution_block(alg))
    N = alg.dim**3 * (2 if is_complex else 1)
    return QuadraticConstraintSystem(N, tuple(blocks), n=alg.dim, is_complex=is_complex)


def parse_constraint_flags(text: str) -> dict:
    """``"assoc,unit"`` -> keyword flags for :func:`build_constraint_system`."""
    names = {"assoc": "associativity", "associativity": "associativity",
             "unit": "unit", "involution": "involution", "inv": "involution"}
    flags = {"associativity": False, "unit": False, "involution": False}
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok not in names:
            raise ConfigurationError(f"unknown constraint block {tok!r}")
        flags[names[tok]] = True
    return flags


def sphere_system(dim: int = 3, radius: float = 1.0) -> QuadraticConstraintSystem:
    return QuadraticConstraintSystem(dim, (QuadraticBlock(np.eye(dim), None, [-radius**2]),))


def empty_system(dim: int) -> QuadraticConstraintSystem:
    return QuadraticConstraintSystem(dim, ())
