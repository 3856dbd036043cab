"""Dense multi-index arrays and rank-revealing least squares.

Everything here is a pure function of its inputs.  Complex data is realified
(real and imaginary parts stored side by side) so that the least-squares and
inner-product code paths only ever see real matrices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AxisError, DimensionError, NumericError

DEFAULT_RANK_TOL = 1e-10
EPS_FLOOR = 1e-300


@dataclass(frozen=True)
class DenseTensor:
    """Immutable row-major multi-index array of doubles.

    ``data`` is one-dimensional; when ``is_complex`` is set the last extent of
    the logical shape is stored as interleaved (re, im) pairs, i.e. the data
    holds ``2 * prod(shape)`` doubles.
    """

    shape: tuple
    data: np.ndarray = field(repr=False)
    is_complex: bool = False

    def __post_init__(self):
        shape = tuple(int(s) for s in self.shape)
        if any(s <= 0 for s in shape):
            raise DimensionError(f"extents must be positive, got {shape}")
        data = np.ascontiguousarray(self.data, dtype=np.float64).reshape(-1)
        expected = int(np.prod(shape, dtype=np.int64)) * (2 if self.is_complex else 1)
        if data.size != expected:
            raise DimensionError(
                f"data length {data.size} does not match shape {shape}"
                + (" (complex)" if self.is_complex else "")
            )
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_array(cls, array) -> "DenseTensor":
        array = np.asarray(array)
        if np.iscomplexobj(array):
            pairs = np.stack([array.real, array.imag], axis=-1)
            return cls(array.shape, pairs.reshape(-1), is_complex=True)
        return cls(array.shape, np.asarray(array, dtype=np.float64).reshape(-1))

    @property
    def ndim(self) -> int:
        return len(self.shape)

    @property
    def array(self) -> np.ndarray:
        """Read-only ndarray view with the logical shape."""
        if self.is_complex:
            pairs = self.data.reshape(self.shape + (2,))
            out = pairs[..., 0] + 1j * pairs[..., 1]
            out.flags.writeable = False
            return out
        return self.data.reshape(self.shape)

    def __array__(self, dtype=None, copy=None):
        out = self.array
        return out if dtype is None else out.astype(dtype)


def as_array(value) -> np.ndarray:
    if isinstance(value, DenseTensor):
        return value.array
    return np.asarray(value)


def contract(A, B, pairs: Sequence[tuple]) -> DenseTensor:
    """Sum over paired axes; free axes of ``A`` come first, then those of ``B``."""
    a, b = as_array(A), as_array(B)
    axes_a, axes_b = [], []
    for ia, ib in pairs:
        if not (0 <= ia < a.ndim) or not (0 <= ib < b.ndim):
            raise AxisError(f"axis pair ({ia}, {ib}) out of range for ranks {a.ndim}, {b.ndim}")
        if a.shape[ia] != b.shape[ib]:
            raise DimensionError(
                f"extent mismatch: axis {ia} of A has {a.shape[ia]}, "
                f"axis {ib} of B has {b.shape[ib]}"
            )
        axes_a.append(ia)
        axes_b.append(ib)
    if len(set(axes_a)) != len(axes_a) or len(set(axes_b)) != len(axes_b):
        raise AxisError("an axis may be paired at most once")
    out = np.tensordot(a, b, axes=(axes_a, axes_b))
    return DenseTensor.from_array(np.asarray(out))


def _check_split(ndim, row_axes, col_axes):
    axes = list(row_axes) + list(col_axes)
    if sorted(axes) != list(range(ndim)):
        raise AxisError(
            f"row axes {tuple(row_axes)} and column axes {tuple(col_axes)} "
            f"must partition the {ndim} axes exactly once"
        )


def flatten(A, row_axes: Sequence[int], col_axes: Sequence[int]) -> DenseTensor:
    """Matrix whose rows/columns run lexicographically over the given axes."""
    a = as_array(A)
    _check_split(a.ndim, row_axes, col_axes)
    rows = int(np.prod([a.shape[i] for i in row_axes], dtype=np.int64))
    cols = int(np.prod([a.shape[i] for i in col_axes], dtype=np.int64))
    m = np.transpose(a, list(row_axes) + list(col_axes)).reshape(rows, cols)
    return DenseTensor.from_array(m)


def unflatten(M, shape: Sequence[int], row_axes: Sequence[int], col_axes: Sequence[int]) -> DenseTensor:
    """Inverse of :func:`flatten` for a tensor of the given original ``shape``."""
    m = as_array(M)
    shape = tuple(shape)
    _check_split(len(shape), row_axes, col_axes)
    order = list(row_axes) + list(col_axes)
    permuted = m.reshape([shape[i] for i in order])
    return DenseTensor.from_array(np.transpose(permuted, np.argsort(order)))


@dataclass(frozen=True)
class LinearSystemReport:
    solution: np.ndarray
    residual_norm: float
    relative_residual: float
    numerical_rank: int
    rank_tolerance: float

    def consistent(self, tol: float) -> bool:
        return self.relative_residual < tol


@dataclass(frozen=True)
class TruncatedSVD:
    """Thin SVD keeping only singular values above ``rank_tol * s_max``."""

    u: np.ndarray
    s: np.ndarray
    vt: np.ndarray
    rank_tolerance: float
    shape: tuple

    @property
    def rank(self) -> int:
        return self.s.size

    def solve(self, b) -> np.ndarray:
        """Minimum-norm least-squares solution of ``M x = b``."""
        return self.vt.T @ ((self.u.T @ b) / self.s)

    def solve_transpose(self, b) -> np.ndarray:
        """Minimum-norm least-squares solution of ``M^T y = b``."""
        return self.u @ ((self.vt @ b) / self.s)

    def row_projector_apply(self, v) -> np.ndarray:
        """Orthogonal projection of ``v`` onto the row space of ``M``."""
        return self.vt.T @ (self.vt @ v)

    def truncate(self, cutoff: float) -> "TruncatedSVD":
        """Drop singular values at or below the absolute ``cutoff``."""
        keep = self.s > cutoff
        return TruncatedSVD(self.u[:, keep], self.s[keep], self.vt[keep], self.rank_tolerance, self.shape)


def truncated_svd(M, rank_tol: float = DEFAULT_RANK_TOL, rank: Optional[int] = None) -> TruncatedSVD:
    """Thin SVD truncated at ``rank_tol`` relative, or to exactly ``rank`` values when given."""
    m = np.asarray(as_array(M), dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got shape {m.shape}")
    if rank_tol <= 0:
        raise NumericError("rank tolerance must be positive")
    if m.size == 0:
        r, c = m.shape
        return TruncatedSVD(np.zeros((r, 0)), np.zeros(0), np.zeros((0, c)), rank_tol, m.shape)
    if not np.all(np.isfinite(m)):
        raise NumericError("matrix has non-finite entries")
    u, s, vt = np.linalg.svd(m, full_matrices=False)
    keep = s > rank_tol * s[0] if s.size and s[0] > 0 else np.zeros(s.shape, bool)
    if rank is not None:
        keep = np.arange(s.size) < min(rank, s.size)
    return TruncatedSVD(u[:, keep], s[keep], vt[keep], rank_tol, m.shape)


def least_squares_solve(M, b, rank_tol: float = DEFAULT_RANK_TOL) -> LinearSystemReport:
    """Minimum-norm least-squares solve via a truncated SVD.

    Singular values below ``rank_tol`` times the largest are treated as zero.

    Raises
    ------
    DimensionError
        Empty matrix or mismatched right-hand side.
    NumericError
        Non-finite entries or a non-positive tolerance.
    """
    m = np.asarray(as_array(M), dtype=np.float64)
    rhs = np.asarray(as_array(b), dtype=np.float64).reshape(-1)
    if m.ndim != 2 or m.size == 0:
        raise DimensionError(f"expected a non-empty matrix, got shape {m.shape}")
    if m.shape[0] != rhs.size:
        raise DimensionError(f"matrix has {m.shape[0]} rows but rhs has {rhs.size} entries")
    if not np.all(np.isfinite(rhs)):
        raise NumericError("right-hand side has non-finite entries")
    svd = truncated_svd(m, rank_tol)
    x = svd.solve(rhs)
    residual = float(np.linalg.norm(m @ x - rhs))
    return LinearSystemReport(
        solution=x,
        residual_norm=residual,
        relative_residual=residual / max(float(np.linalg.norm(rhs)), EPS_FLOOR),
        numerical_rank=svd.rank,
        rank_tolerance=rank_tol,
    )


def realify_linear(A, B=None) -> np.ndarray:
    """Real matrix of the map ``z -> A z + B conj(z)`` on stacked (re, im) coordinates."""
    A = np.asarray(A)
    B = np.zeros_like(A) if B is None else np.asarray(B)
    ar, ai, br, bi = A.real, A.imag, B.real, B.imag
    return np.block([[ar + br, bi - ai], [ai + bi, ar - br]])


def realify(z) -> np.ndarray:
    z = np.asarray(z).reshape(-1)
    return np.concatenate([z.real, z.imag])


def complexify(x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    half = x.size // 2
    return x[:half] + 1j * x[half:]
