"""Geodesics of the constraint manifold under the flat ambient metric.

A curve ``x(h)`` of the zero set is a geodesic exactly when its acceleration
is normal to the set, ``x'' = J(x)^T lam`` for some multiplier ``lam``.  The
multiplier is always the minimum-norm solution, since the associativity
equations are highly redundant.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .algebra import AlgebraSpec, ProductCurve, curve_eval
from .constraints import (
    AssociatorBlock,
    QuadraticConstraintSystem,
    build_constraint_system,
    product_to_coords,
)
from .errors import ConfigurationError, ConvergenceError, DimensionError, NumericError
from .linalg import DEFAULT_RANK_TOL, EPS_FLOOR, least_squares_solve, realify_linear, truncated_svd

log = logging.getLogger(__name__)

OPERATOR_KINDS = ("paper-two-term", "full-jacobian", "mathematica")
_ALIASES = {"paper": "paper-two-term", "full": "full-jacobian", "two-term": "paper-two-term"}


def operator_kind(name: str) -> str:
    kind = _ALIASES.get(name, name)
    if kind not in OPERATOR_KINDS:
        raise ConfigurationError(f"unknown multiplier operator {name!r}; choose from {OPERATOR_KINDS}")
    return kind


def multiplier_operator(kind: str, x, system: Optional[QuadraticConstraintSystem] = None) -> np.ndarray:
    """Matrix sending associator multipliers to product-coordinate space.

    ``x`` is a product tensor.  ``paper-two-term`` keeps the terms
    ``x[a,b,i] lam[a,b,j,k] - x[j,b,d] lam[i,b,d,k]``; ``full-jacobian`` is
    the transpose of the associator-block Jacobian; ``mathematica`` rebuilds
    the listing's TensorProduct/Transpose/Flatten construction verbatim.
    With ``system`` given, its associator block must exist.
    """
    kind = operator_kind(kind)
    if system is not None:
        block = system.block("associator")
        p = np.asarray(x)
        if p.ndim == 1:
            from .constraints import coords_to_product

            p = coords_to_product(p, block.n, block.is_complex)
    else:
        p = np.asarray(x)
        if p.ndim != 3:
            raise DimensionError("pass a product tensor, or coordinates together with a system")
        block = AssociatorBlock(p.shape[0], np.iscomplexobj(p))
    if kind == "full-jacobian":
        return block.jacobian(product_to_coords(p)).T
    if kind == "mathematica":
        if block.is_complex:
            raise ConfigurationError("the mathematica operator is defined for real products only")
        from .transcribed import mathematica_operator

        return mathematica_operator(p)
    two = kernels.two_term_operator(p)
    return realify_linear(two.T).T if block.is_complex else two


@dataclass(frozen=True)
class MultiplierReport:
    lambda_: np.ndarray = field(repr=False)
    relative_residual: float
    residual_norm: float
    rank: int
    operator_kind: str
    tolerance: float

    @property
    def consistent(self) -> bool:
        return self.relative_residual < self.tolerance

    @property
    def multiplier_norm(self) -> float:
        return float(np.linalg.norm(self.lambda_))


def verify_geodesic_point(
    x,
    xdd,
    kind: str = "paper-two-term",
    rank_tol: float = DEFAULT_RANK_TOL,
    tol: float = 1e-10,
    system: Optional[QuadraticConstraintSystem] = None,
) -> MultiplierReport:
    """Least-squares test of ``xdd = M(x) lam``.

    With a product tensor ``x`` the operator is chosen by ``kind``.  With
    ``system`` and coordinate vectors, the operator is the transpose of the
    full system Jacobian; an empty system has the zero operator.
    """
    if system is not None and np.ndim(x) == 1:
        kind = "full-jacobian"
        M = system.jacobian(x).T
        b = np.asarray(xdd, dtype=np.float64).reshape(-1)
    else:
        kind = operator_kind(kind)
        M = multiplier_operator(kind, x, system)
        b = product_to_coords(xdd)
    if M.shape[0] != b.size:
        raise DimensionError(f"operator has {M.shape[0]} rows, acceleration has {b.size} entries")
    if M.size == 0:
        res = float(np.linalg.norm(b))
        return MultiplierReport(np.zeros(M.shape[1]), res / max(res, EPS_FLOOR) if res else 0.0,
                                res, 0, kind, tol)
    rep = least_squares_solve(M, b, rank_tol)
    return MultiplierReport(rep.solution, rep.relative_residual, rep.residual_norm,
                            rep.numerical_rank, kind, tol)


def _accel_from_svd(svd, second):
    if svd.rank == 0:
        return np.zeros(svd.shape[1]), np.zeros(svd.shape[0])
    coeff = (svd.u.T @ second) / svd.s
    a = -(svd.vt.T @ coeff)
    lam = -(svd.u @ (coeff / svd.s))
    return a, lam


def geodesic_acceleration(
    system: QuadraticConstraintSystem, x, v, rank_tol: float = DEFAULT_RANK_TOL
) -> tuple:
    """Normal acceleration keeping ``(x, v)`` on the zero set.

    Returns ``(a, lam)`` with ``lam`` the minimum-norm solution of
    ``J J^T lam = -D2f[v, v]`` and ``a = J^T lam``.
    """
    svd = truncated_svd(system.jacobian(x), rank_tol)
    return _accel_from_svd(svd, system.second_derivative(v))


def _project(system, x, tol, max_iter, rank_tol):
    x = np.array(x, dtype=np.float64)
    for it in range(max_iter + 1):
        r = system.residual(x)
        norm = float(np.linalg.norm(r))
        if not np.isfinite(norm):
            raise ConvergenceError("projection diverged", norm, it)
        if norm < tol:
            return x, it
        if it == max_iter:
            break
        svd = truncated_svd(system.jacobian(x), rank_tol)
        if svd.rank:
            # Off the zero set, redundant constraints gain singular values of
            # order |r|; a sqrt(|r|) cutoff drops them and keeps the true ones.
            svd = svd.truncate(min(0.5 * svd.s[0], np.sqrt(norm)))
        x = x - svd.solve(r)
    raise ConvergenceError(
        f"projection did not reach {tol:.1e} in {max_iter} iterations (residual {norm:.3e})",
        norm,
        max_iter,
    )


def project_to_manifold(
    system: QuadraticConstraintSystem,
    x,
    tol: float = 1e-12,
    max_iter: int = 50,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> np.ndarray:
    """Gauss-Newton steps ``x <- x - J^+ r(x)`` until ``|r| < tol``.

    Raises
    ------
    ConvergenceError
        If ``max_iter`` steps do not reach the tolerance.
    """
    if tol <= 0:
        raise ConfigurationError("projection tolerance must be positive")
    return _project(system, x, tol, max_iter, rank_tol)[0]


def project_tangent(
    system: QuadraticConstraintSystem, x, v, rank_tol: float = DEFAULT_RANK_TOL
) -> np.ndarray:
    """Remove the component of ``v`` in the row space of ``J(x)``."""
    v = np.asarray(v, dtype=np.float64)
    svd = truncated_svd(system.jacobian(x), rank_tol)
    return v - svd.row_projector_apply(v)


@dataclass(frozen=True)
class GeodesicState:
    x: np.ndarray
    v: np.ndarray
    h: float = 0.0


def quantum_product_initial_data(
    alg: AlgebraSpec,
    factor: complex = 0.5j,
    curve: Optional[ProductCurve] = None,
    system: Optional[QuadraticConstraintSystem] = None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> GeodesicState:
    """Start at the commutative product with tangent ``factor * bracket``.

    Fermionic algebras skip the bracket: the tangent is the curve's first
    derivative at zero when a curve is given, else the stored tangent.  The
    result is tangent-projected against ``system`` (associativity by default).
    """
    if system is None:
        system = build_constraint_system(alg)
    x = product_to_coords(alg.bullet)
    if alg.grading == "fermionic":
        tangent = curve_eval(curve, 0.0, 1) if curve is not None else alg.poisson
    else:
        factor = complex(factor)
        if alg.field == "real" and factor.imag != 0:
            raise ConfigurationError("a complex tangent factor needs a complex algebra")
        tangent = (factor if alg.field == "complex" else factor.real) * alg.poisson
    v = product_to_coords(np.asarray(tangent, dtype=alg.dtype))
    if np.any(v):
        v = project_tangent(system, x, v, rank_tol)
    return GeodesicState(x, v, 0.0)


@dataclass(frozen=True)
class IntegratorConfig:
    step_size: float = 1e-3
    h_max: float = 1.0
    projection_tol: float = 1e-12
    max_projection_iters: int = 50
    rank_tol: float = DEFAULT_RANK_TOL
    project_every: int = 1
    tangent_factor: complex = 0.5j
    record_every: int = 1

    def __post_init__(self):
        if not (self.step_size > 0 and np.isfinite(self.step_size)):
            raise ConfigurationError(f"step size must be positive, got {self.step_size}")
        if not (self.h_max >= 0 and np.isfinite(self.h_max)):
            raise ConfigurationError(f"h_max must be non-negative, got {self.h_max}")
        for name in ("projection_tol", "rank_tol"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("max_projection_iters", "project_every", "record_every"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be at least 1")


@dataclass(frozen=True)
class TrajectorySample:
    h: float
    x: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)
    constraint_drift: float
    multiplier_norm: float


@dataclass
class TrajectoryRecord:
    samples: list = field(default_factory=list)
    status: str = "running"
    steps: int = 0

    @property
    def final(self) -> TrajectorySample:
        return self.samples[-1]

    def h_values(self) -> np.ndarray:
        return np.array([s.h for s in self.samples])

    def max_drift(self) -> float:
        return max((s.constraint_drift for s in self.samples), default=0.0)

    def speed_variation(self) -> float:
        """Largest relative deviation of ``|v|`` from its initial value."""
        speeds = np.array([np.linalg.norm(s.v) for s in self.samples])
        if speeds.size == 0 or speeds[0] == 0:
            return 0.0
        return float(np.max(np.abs(speeds - speeds[0])) / speeds[0])


class _SVDCache:
    """One-entry cache of the truncated SVD of ``J(x)`` for the last ``x`` seen."""

    def __init__(self, system, rank_tol):
        self.system = system
        self.rank_tol = rank_tol
        self._key = None
        self._svd = None

    def __call__(self, x, rank=None):
        key = (x.tobytes(), rank)
        if key != self._key:
            self._svd = truncated_svd(self.system.jacobian(x), self.rank_tol, rank)
            self._key = key
        return self._svd


def integrate_geodesic(
    system: QuadraticConstraintSystem, state0: GeodesicState, cfg: IntegratorConfig
) -> TrajectoryRecord:
    """Classical RK4 on ``x' = v, v' = normal acceleration`` with projection.

    Every ``project_every`` steps the position is Gauss-Newton projected back
    to the zero set and the velocity onto its tangent space.

    Raises
    ------
    ConvergenceError
        If a projection fails; the partial record is attached as ``.record``.
    NumericError
        If the state becomes non-finite.
    """
    x = np.array(state0.x, dtype=np.float64)
    v = np.array(state0.v, dtype=np.float64)
    if x.size != system.ambient_dim or v.size != system.ambient_dim:
        raise DimensionError("state does not match the system's ambient dimension")
    record = TrajectoryRecord()
    h = float(state0.h)
    h_end = h + cfg.h_max
    svd_of = _SVDCache(system, cfg.rank_tol)

    def drift(y):
        return float(np.linalg.norm(system.residual(y)))

    if not np.any(v):
        n_steps = int(np.ceil(cfg.h_max / cfg.step_size - 1e-9))
        d = drift(x)
        hs = [h + min(k * cfg.step_size, cfg.h_max) for k in range(n_steps + 1)]
        record.samples = [TrajectorySample(t, x.copy(), v.copy(), d, 0.0) for t in hs]
        record.steps = n_steps
        record.status = "completed"
        return record

    # Stage points sit O(dt^2) off the zero set, where redundant constraints
    # acquire spurious O(dt^2) singular values; hold the rank of the base point.
    def accel(y, w, rank=None):
        return _accel_from_svd(svd_of(y, rank), system.second_derivative(w))

    try:
        x, _ = _project(system, x, cfg.projection_tol, cfg.max_projection_iters, cfg.rank_tol)
        v = v - svd_of(x).row_projector_apply(v)
        rank = svd_of(x).rank
        a, lam = accel(x, v)
        record.samples.append(TrajectorySample(h, x.copy(), v.copy(), drift(x), float(np.linalg.norm(lam))))
        step = 0
        while h < h_end - 1e-12 * max(1.0, abs(h_end)):
            dt = min(cfg.step_size, h_end - h)
            k1x, k1v = v, a
            k2x = v + 0.5 * dt * k1v
            k2v = accel(x + 0.5 * dt * k1x, k2x, rank)[0]
            k3x = v + 0.5 * dt * k2v
            k3v = accel(x + 0.5 * dt * k2x, k3x, rank)[0]
            k4x = v + dt * k3v
            k4v = accel(x + dt * k3x, k4x, rank)[0]
            x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
            v = v + dt / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v)
            step += 1
            h = h + dt
            if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
                record.status = "step-failed"
                raise NumericError(f"non-finite state at h={h:.6g}")
            if step % cfg.project_every == 0:
                x, _ = _project(system, x, cfg.projection_tol, cfg.max_projection_iters, cfg.rank_tol)
                v = v - svd_of(x).row_projector_apply(v)
                rank = svd_of(x).rank
            a, lam = accel(x, v, rank)
            if step % cfg.record_every == 0 or h >= h_end - 1e-12 * max(1.0, abs(h_end)):
                record.samples.append(
                    TrajectorySample(h, x.copy(), v.copy(), drift(x), float(np.linalg.norm(lam)))
                )
        record.steps = step
    except ConvergenceError as exc:
        record.status = "projection-failed"
        exc.record = record
        raise
    record.status = "completed"
    log.debug("integrated %d steps, max drift %.3e", record.steps, record.max_drift())
    return record
