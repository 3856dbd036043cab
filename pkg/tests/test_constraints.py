import numpy as np
import pytest

from starquant.algebra import curve_eval, truncated_polynomial_algebra
from starquant.clifford import clifford_algebra
from starquant.constraints import (
    QuadraticBlock,
    QuadraticConstraintSystem,
    build_constraint_system,
    coords_to_product,
    empty_system,
    parse_constraint_flags,
    product_to_coords,
    sphere_system,
)
from starquant.errors import ConfigurationError, DimensionError


def fd_jacobian(system, x, eps=1e-6):
    cols = []
    for k in range(x.size):
        d = np.zeros_like(x)
        d[k] = eps
        cols.append((system.residual(x + d) - system.residual(x - d)) / (2 * eps))
    return np.array(cols).T


def rel_err(A, B):
    return np.linalg.norm(A - B) / max(np.linalg.norm(B), 1e-300)


def test_unit_block_vanishes_at_bullet():
    alg, _ = clifford_algebra(2)
    sys_ = build_constraint_system(alg, associativity=False, unit=True)
    assert not np.any(sys_.residual(product_to_coords(alg.bullet)))


def test_associator_vanishes_at_clifford():
    alg, curve = clifford_algebra(2)
    sys_ = build_constraint_system(alg)
    assert np.abs(sys_.residual(product_to_coords(curve_eval(curve, 1.0)))).max() < 1e-12


@pytest.mark.parametrize("h", [0.0, 0.5, 2.0])
def test_all_blocks_vanish_along_clifford_curve(h):
    alg, curve = clifford_algebra(3)
    sys_ = build_constraint_system(alg, True, True, True)
    assert np.abs(sys_.residual(product_to_coords(curve_eval(curve, h)))).max() < 1e-12


def test_sphere_residuals():
    s = sphere_system(3)
    assert s.residual(np.array([1.0, 0, 0]))[0] == 0.0
    assert s.residual(np.array([2.0, 0, 0]))[0] == 3.0


def test_sphere_jacobian_is_twice_x(rng):
    x = rng.standard_normal(3)
    np.testing.assert_allclose(sphere_system(3).jacobian(x), [2 * x])


def test_linear_blocks_are_linear_in_perturbation(rng):
    alg, _ = clifford_algebra(2)
    sys_ = build_constraint_system(alg, associativity=False, unit=True, involution=True)
    x0 = product_to_coords(alg.bullet)
    d = np.zeros_like(x0)
    d[17] = 1.0
    r1, r2 = sys_.residual(x0 + 1e-3 * d), sys_.residual(x0 + 2e-3 * d)
    np.testing.assert_allclose(r2, 2 * r1, atol=1e-15)
    J1, J2 = sys_.jacobian(x0), sys_.jacobian(rng.standard_normal(64))
    assert np.array_equal(J1, J2)


def test_associator_residual_is_first_order_in_perturbation(rng):
    alg, _ = clifford_algebra(2)
    sys_ = build_constraint_system(alg)
    x0 = product_to_coords(alg.bullet)
    d = rng.standard_normal(64)
    r1 = np.linalg.norm(sys_.residual(x0 + 1e-4 * d))
    r2 = np.linalg.norm(sys_.residual(x0 + 2e-4 * d))
    assert r2 / r1 == pytest.approx(2.0, rel=1e-2)


def test_associator_jacobian_matches_fd_at_clifford():
    alg, curve = clifford_algebra(2)
    sys_ = build_constraint_system(alg)
    x = product_to_coords(curve_eval(curve, 1.0))
    J = sys_.jacobian(x)
    assert np.abs(J - fd_jacobian(sys_, x)).max() / np.abs(J).max() < 1e-6


@pytest.mark.parametrize("flags", [(True, False, False), (True, True, True), (False, True, True)])
def test_complex_system_jacobian_matches_fd(flags, rng):
    alg = truncated_polynomial_algebra(2, 1.0, field="complex")
    sys_ = build_constraint_system(alg, *flags)
    x = rng.standard_normal(sys_.ambient_dim)
    assert rel_err(sys_.jacobian(x), fd_jacobian(sys_, x)) < 1e-6


def test_second_derivative_of_quadratic_blocks(rng):
    alg, _ = clifford_algebra(2)
    sys_ = build_constraint_system(alg, True, True, True)
    x, v = rng.standard_normal((2, 64))
    eps = 1e-3
    fd = (sys_.residual(x + eps * v) - 2 * sys_.residual(x) + sys_.residual(x - eps * v)) / eps**2
    np.testing.assert_allclose(sys_.second_derivative(v), fd, atol=1e-6)


def test_involution_block_conjugate_linear_at_bullet():
    alg = truncated_polynomial_algebra(2, 1.0, field="complex")
    sys_ = build_constraint_system(alg, associativity=False, involution=True)
    assert np.abs(sys_.residual(product_to_coords(alg.bullet))).max() == 0
    # i * bullet is not *-compatible when the involution conjugates
    assert np.abs(sys_.residual(product_to_coords(1j * alg.bullet))).max() > 0.5


def test_coords_roundtrip_complex(rng):
    p = rng.standard_normal((3, 3, 3)) + 1j * rng.standard_normal((3, 3, 3))
    x = product_to_coords(p)
    assert x.shape == (54,)
    np.testing.assert_array_equal(coords_to_product(x, 3, True), p)
    with pytest.raises(DimensionError):
        coords_to_product(x, 3, False)


def test_flag_parsing():
    assert parse_constraint_flags("assoc,unit") == {"associativity": True, "unit": True,
                                                   "involution": False}
    with pytest.raises(ConfigurationError):
        parse_constraint_flags("assoc,bogus")


def test_system_errors():
    alg, _ = clifford_algebra(1)
    with pytest.raises(ConfigurationError):
        build_constraint_system(alg, False, False, False)
    with pytest.raises(ConfigurationError):
        build_constraint_system(alg).block("unit")
    with pytest.raises(DimensionError):
        QuadraticConstraintSystem(3, (QuadraticBlock(np.eye(4)),))
    with pytest.raises(DimensionError):
        sphere_system(3).residual(np.ones(4))


def test_empty_system_shapes():
    e = empty_system(5)
    assert e.residual(np.ones(5)).shape == (0,)
    assert e.jacobian(np.ones(5)).shape == (0, 5)
