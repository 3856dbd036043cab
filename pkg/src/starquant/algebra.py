"""Finite-dimensional Poisson *-algebras stored as structure constants.

A bilinear product is an ``(n, n, n)`` array ``p`` with ``p[a, b, c]`` the
component along basis element ``a`` of ``e_b * e_c``.  Elements are plain
coordinate vectors of length ``n``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .errors import DimensionError, InvertibilityError

FIELDS = ("real", "complex")
GRADINGS = ("bosonic", "fermionic")
_WITNESS_RTOL = 1e-9


def _as_product(p, n=None) -> np.ndarray:
    p = np.asarray(p)
    if p.ndim != 3 or len(set(p.shape)) != 1:
        raise DimensionError(f"product tensor must be cubic, got shape {p.shape}")
    if n is not None and p.shape[0] != n:
        raise DimensionError(f"product tensor has dim {p.shape[0]}, expected {n}")
    if not np.all(np.isfinite(p)):
        raise DimensionError("product tensor has non-finite entries")
    return p


@dataclass(frozen=True)
class AlgebraSpec:
    """Commutative product, unit, involution and bracket of an algebra.

    ``involution`` is the matrix ``S`` of ``f* = S f`` (or ``S conj(f)`` when
    ``conjugate`` is set).  ``parity`` holds the Z/2 degree of each basis
    element; it is all zeros for bosonic algebras, where commutativity is the
    plain symmetry ``bullet[a, b, c] == bullet[a, c, b]``.  For fermionic
    algebras ``poisson`` holds the initial tangent of the deformation directly.
    """

    dim: int
    field: str
    bullet: np.ndarray
    unit: np.ndarray
    involution: np.ndarray
    poisson: np.ndarray
    conjugate: bool = False
    grading: str = "bosonic"
    parity: tuple = ()
    basis_names: tuple = ()

    def __post_init__(self):
        n = int(self.dim)
        if n < 1:
            raise DimensionError("dimension must be positive")
        if self.field not in FIELDS:
            raise ValueError(f"field must be one of {FIELDS}, got {self.field!r}")
        if self.grading not in GRADINGS:
            raise ValueError(f"grading must be one of {GRADINGS}, got {self.grading!r}")
        dtype = np.complex128 if self.field == "complex" else np.float64
        bullet = _as_product(self.bullet, n).astype(dtype)
        poisson = _as_product(self.poisson, n).astype(dtype)
        unit = np.asarray(self.unit, dtype=dtype).reshape(-1)
        inv = np.asarray(self.involution, dtype=dtype)
        if unit.shape != (n,):
            raise DimensionError(f"unit must have length {n}")
        if inv.shape != (n, n):
            raise DimensionError(f"involution must be {n}x{n}")
        parity = tuple(int(v) for v in self.parity) if self.parity else (0,) * n
        if len(parity) != n:
            raise DimensionError(f"parity must have length {n}")
        names = tuple(self.basis_names) if self.basis_names else tuple(f"b{i}" for i in range(n))
        if len(names) != n:
            raise DimensionError(f"basis_names must have length {n}")
        for arr in (bullet, poisson, unit, inv):
            arr.flags.writeable = False
        object.__setattr__(self, "dim", n)
        object.__setattr__(self, "bullet", bullet)
        object.__setattr__(self, "poisson", poisson)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "involution", inv)
        object.__setattr__(self, "conjugate", bool(self.conjugate))
        object.__setattr__(self, "parity", parity)
        object.__setattr__(self, "basis_names", names)

    @property
    def dtype(self):
        return np.complex128 if self.field == "complex" else np.float64

    def star(self, f) -> np.ndarray:
        f = np.asarray(f)
        if self.conjugate:
            f = np.conj(f)
        return self.involution @ f

    def validate(self, tol: float = 1e-12) -> "AxiomReport":
        """Star axioms and commutativity of ``bullet``, ``|1| = 1``, and (bosonic) Poisson axioms."""
        report = check_star_axioms(self, self.bullet, tol)
        checks = dict(report.checks)
        checks.update(check_commutativity(self, tol).checks)
        checks["unit_norm"] = AxiomCheck(abs(float(np.linalg.norm(self.unit)) - 1.0))
        if self.grading == "bosonic":
            checks.update(check_poisson_axioms(self, "bosonic", tol).checks)
        return AxiomReport(checks, tol)


@dataclass(frozen=True)
class ProductCurve:
    """Polynomial family of products ``s(h) = sum_m h**m * coeffs[m]``."""

    coeffs: tuple

    def __post_init__(self):
        if not self.coeffs:
            raise DimensionError("a curve needs at least one coefficient")
        cs = []
        for c in self.coeffs:
            c = np.array(c)
            _as_product(c, np.shape(self.coeffs[0])[0])
            c.flags.writeable = False
            cs.append(c)
        object.__setattr__(self, "coeffs", tuple(cs))

    @property
    def dim(self) -> int:
        return self.coeffs[0].shape[0]

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, h: float, order: int = 0) -> np.ndarray:
        return curve_eval(self, h, order)


def curve_eval(curve: ProductCurve, h: float, order: int = 0) -> np.ndarray:
    """The curve, or its first or second derivative in ``h``, evaluated exactly."""
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    dtype = np.result_type(*[c.dtype for c in curve.coeffs], np.float64)
    out = np.zeros(curve.coeffs[0].shape, dtype=dtype)
    for m, c in enumerate(curve.coeffs):
        if m < order:
            continue
        factor = 1.0
        for r in range(order):
            factor *= m - r
        out += factor * h ** (m - order) * c
    return out


@dataclass(frozen=True)
class AutomorphismMap:
    """Linear (or, with ``conjugate``, antilinear) map ``f -> M f`` / ``M conj(f)``."""

    matrix: np.ndarray
    conjugate: bool = False

    def __post_init__(self):
        m = np.array(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"automorphism matrix must be square, got {m.shape}")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __call__(self, f) -> np.ndarray:
        f = np.asarray(f)
        return self.matrix @ (np.conj(f) if self.conjugate else f)

    def inverse_matrix(self) -> np.ndarray:
        cond = np.linalg.cond(self.matrix)
        if not np.isfinite(cond) or cond > 1e12:
            raise InvertibilityError(f"map is singular (condition number {cond:.3g})")
        return np.linalg.inv(self.matrix)

    def compose(self, other: "AutomorphismMap") -> "AutomorphismMap":
        """``self`` after ``other``."""
        inner = np.conj(other.matrix) if self.conjugate else other.matrix
        return AutomorphismMap(self.matrix @ inner, self.conjugate != other.conjugate)


@dataclass(frozen=True)
class AxiomCheck:
    residual: float
    witness: tuple = ()
    witnesses: tuple = ()


@dataclass(frozen=True)
class AxiomReport:
    checks: dict
    tol: float

    @property
    def passed(self) -> bool:
        return all(c.residual < self.tol for c in self.checks.values())

    def failures(self) -> dict:
        return {k: c for k, c in self.checks.items() if c.residual >= self.tol}

    def __getitem__(self, name) -> AxiomCheck:
        return self.checks[name]


def _worst(residuals: np.ndarray) -> AxiomCheck:
    """Max over a residual array indexed by basis tuples, with all tied maximisers."""
    residuals = np.asarray(residuals, dtype=np.float64)
    if residuals.size == 0:
        return AxiomCheck(0.0)
    worst = float(residuals.max())
    if worst <= 0.0:
        return AxiomCheck(0.0)
    witness = tuple(int(i) for i in np.unravel_index(int(residuals.argmax()), residuals.shape))
    ties = np.argwhere(residuals >= worst * (1 - _WITNESS_RTOL))
    return AxiomCheck(worst, witness, tuple(tuple(int(i) for i in t) for t in ties))


def multiply(p, f, g) -> np.ndarray:
    """``(f * g)[a] = sum_{b,c} p[a,b,c] f[b] g[c]``."""
    p = np.asarray(p)
    f = np.asarray(f)
    g = np.asarray(g)
    n = p.shape[0]
    if p.shape != (n, n, n) or f.shape != (n,) or g.shape != (n,):
        raise DimensionError(f"shapes {p.shape}, {f.shape}, {g.shape} do not agree")
    return np.einsum("abc,b,c->a", p, f, g)


def associator_form(p, q) -> np.ndarray:
    """Rank-4 tensor ``sum_c p[a,b,c] q[c,d,e] - q[c,b,d] p[a,c,e]``.

    ``associator_form(p, p)[:, b, d, e]`` is ``e_b(e_d e_e) - (e_b e_d) e_e``.
    """
    p = _as_product(p)
    q = _as_product(q, p.shape[0])
    return kernels.associator(p, q)


def check_star_axioms(alg: AlgebraSpec, p, tol: float = 1e-12) -> AxiomReport:
    """Involution, two-sided unit and associativity residuals of ``p`` over basis tuples.

    Witnesses are basis indices: ``(b,)`` for unit checks, ``(b, c)`` for the
    involution, ``(b, d, e)`` for associativity.
    """
    p = _as_product(p, alg.dim)
    S = alg.involution
    conj_p = np.conj(p) if alg.conjugate else p
    lhs = np.einsum("ax,xbc->abc", S, conj_p)
    rhs = np.einsum("apq,pc,qb->abc", p, S, S)
    involution = np.linalg.norm(lhs - rhs, axis=0)
    eye = np.eye(alg.dim)
    left = np.linalg.norm(np.einsum("c,acb->ab", alg.unit, p) - eye, axis=0)
    right = np.linalg.norm(np.einsum("c,abc->ab", alg.unit, p) - eye, axis=0)
    assoc = np.abs(associator_form(p, p)).max(axis=0)
    return AxiomReport(
        {
            "involution": _worst(involution),
            "left_unit": _worst(left),
            "right_unit": _worst(right),
            "associativity": _worst(assoc),
        },
        tol,
    )


def check_commutativity(alg: AlgebraSpec, tol: float = 1e-12) -> AxiomReport:
    """Graded symmetry ``bullet[a,b,c] == (-1)**(|b||c|) bullet[a,c,b]``."""
    par = np.asarray(alg.parity)
    sign = np.where(np.outer(par, par) % 2 == 1, -1.0, 1.0)
    diff = alg.bullet - sign[None, :, :] * np.transpose(alg.bullet, (0, 2, 1))
    return AxiomReport({"commutativity": _worst(np.abs(diff).max(axis=0))}, tol)


def check_poisson_axioms(alg: AlgebraSpec, mode: str = "bosonic", tol: float = 1e-12) -> AxiomReport:
    """Antisymmetry, Jacobi and Leibniz residuals of the bracket over basis triples."""
    if mode != "bosonic":
        raise ValueError("only the bosonic Poisson axioms are defined")
    P, m = alg.poisson, alg.bullet
    antisym = np.linalg.norm(P + np.transpose(P, (0, 2, 1)), axis=0)
    nested = np.einsum("afk,kgh->afgh", P, P)  # f p (g p h)
    jacobi = nested + np.transpose(nested, (0, 3, 1, 2)) + np.transpose(nested, (0, 2, 3, 1))
    leibniz = (
        np.einsum("afk,kgh->afgh", P, m)
        - np.einsum("akh,kfg->afgh", m, P)
        - np.einsum("agk,kfh->afgh", m, P)
    )
    return AxiomReport(
        {
            "antisymmetry": _worst(antisym),
            "jacobi": _worst(np.linalg.norm(jacobi, axis=0)),
            "leibniz": _worst(np.linalg.norm(leibniz, axis=0)),
        },
        tol,
    )


def product_norm_estimate(p, samples: int = 1000, seed: int = 0) -> tuple:
    """Bracket the operator norm ``sup |f*g| / (|f||g|)`` of a product.

    The lower bound is the best ratio over ``samples`` random unit pairs; the
    upper bound is the spectral norm of the ``n x n^2`` flattening.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    p = _as_product(p)
    n = p.shape[0]
    upper = float(np.linalg.norm(p.reshape(n, n * n), 2))
    rng = np.random.default_rng(seed)
    shape = (samples, n)
    if np.iscomplexobj(p):
        f = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    else:
        f = rng.standard_normal(shape)
        g = rng.standard_normal(shape)
    f /= np.linalg.norm(f, axis=1, keepdims=True)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    values = np.linalg.norm(np.einsum("abc,sb,sc->sa", p, f, g), axis=1)
    lower = min(float(values.max()), upper)
    return lower, upper


def pushforward_product(U: AutomorphismMap, p) -> np.ndarray:
    """Coordinates of ``(f, g) -> U(p(U^-1 f, U^-1 g))``."""
    p = _as_product(p, U.dim)
    M = U.matrix
    Minv = U.inverse_matrix()
    src = np.conj(p) if U.conjugate else p
    return np.einsum("ia,abc,bj,ck->ijk", M, src, Minv, Minv)


def check_automorphism(U: AutomorphismMap, alg: AlgebraSpec, tol: float = 1e-12) -> AxiomReport:
    """Residuals of the four structure-preservation conditions over basis pairs."""
    if U.dim != alg.dim:
        raise DimensionError(f"map has dim {U.dim}, algebra has dim {alg.dim}")
    U.inverse_matrix()
    M = U.matrix

    def preserved(prod):
        images = np.einsum("abc,bj,ck->ajk", prod, M, M)  # U(e_j) * U(e_k)
        mapped = np.einsum("ia,ajk->ijk", M, np.conj(prod) if U.conjugate else prod)
        return np.linalg.norm(images - mapped, axis=0)

    unit = float(np.linalg.norm(U(alg.unit) - alg.unit))
    S = alg.involution
    u_of_star = M @ (np.conj(S) if U.conjugate else S)
    star_of_u = S @ (np.conj(M) if alg.conjugate else M)
    involution = np.linalg.norm(u_of_star - star_of_u, axis=0)
    return AxiomReport(
        {
            "product": _worst(preserved(alg.bullet)),
            "unit": AxiomCheck(unit),
            "involution": _worst(involution),
            "poisson": _worst(preserved(alg.poisson)),
        },
        tol,
    )


def scalar_algebra() -> AlgebraSpec:
    """The one-dimensional real algebra with ordinary multiplication."""
    return AlgebraSpec(
        dim=1,
        field="real",
        bullet=np.ones((1, 1, 1)),
        unit=np.ones(1),
        involution=np.eye(1),
        poisson=np.zeros((1, 1, 1)),
        basis_names=("1",),
    )


def truncated_polynomial_algebra(
    variables: int = 1, bracket: Optional[float] = None, field: str = "real"
) -> AlgebraSpec:
    """Square-zero polynomial algebra ``k[x_1..x_v] / (x_i^2)`` with the monomial basis.

    With ``variables=2`` and ``bracket=c`` the Poisson bracket is ``{x, y} = c xy``,
    extended as a biderivation; ``bracket=None`` gives the zero bracket.  The
    involution is complex conjugation of coordinates.
    """
    if variables not in (1, 2):
        raise ValueError("only 1 or 2 variables are supported")
    if bracket is not None and variables != 2:
        raise ValueError("a nonzero bracket needs two variables")
    monomials = [m for k in range(variables + 1) for m in _bitmasks_of_weight(variables, k)]
    index = {m: i for i, m in enumerate(monomials)}
    n = len(monomials)
    bullet = np.zeros((n, n, n))
    for b, mb in enumerate(monomials):
        for c, mc in enumerate(monomials):
            if mb & mc == 0:
                bullet[index[mb | mc], b, c] = 1.0
    poisson = np.zeros((n, n, n))
    if bracket:
        x, y, xy = index[1], index[2], index[3]
        poisson[xy, x, y] = bracket
        poisson[xy, y, x] = -bracket
    names = ["1", "x", "y", "xy"][:n] if variables == 2 else ["1", "x"]
    return AlgebraSpec(
        dim=n,
        field=field,
        bullet=bullet,
        unit=np.eye(n)[0],
        involution=np.eye(n),
        poisson=poisson,
        conjugate=field == "complex",
        basis_names=tuple(names),
    )


def _bitmasks_of_weight(bits: int, weight: int) -> list:
    return [m for m in range(1 << bits) if bin(m).count("1") == weight]
