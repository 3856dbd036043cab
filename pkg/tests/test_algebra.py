import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starquant.algebra import (
    AlgebraSpec,
    AutomorphismMap,
    ProductCurve,
    associator_form,
    check_automorphism,
    check_commutativity,
    check_poisson_axioms,
    check_star_axioms,
    curve_eval,
    multiply,
    product_norm_estimate,
    pushforward_product,
    scalar_algebra,
    truncated_polynomial_algebra,
)
from starquant.clifford import clifford_algebra, generator_rotation
from starquant.errors import DimensionError, InvertibilityError

# u*u = v, u*v = u in basis {u, v}
NONASSOC = np.zeros((2, 2, 2))
NONASSOC[1, 0, 0] = 1.0
NONASSOC[0, 0, 1] = 1.0


def _generic_spec(p):
    n = p.shape[0]
    return AlgebraSpec(dim=n, field="real", bullet=np.zeros((n, n, n)), unit=np.eye(n)[0],
                       involution=np.eye(n), poisson=np.zeros((n, n, n)))


def test_multiply_unit_is_identity(rng):
    alg, curve = clifford_algebra(2)
    f = rng.standard_normal(4)
    for h in (0.0, 0.7):
        np.testing.assert_allclose(multiply(curve_eval(curve, h), alg.unit, f), f, atol=1e-15)


def test_clifford_products_at_sample_h():
    _, curve = clifford_algebra(2)
    e = np.eye(4)
    np.testing.assert_array_equal(multiply(curve_eval(curve, 1.0), e[1], e[1]), e[0])
    np.testing.assert_allclose(multiply(curve_eval(curve, 0.5), e[2], e[3]), -0.5 * e[1])


def test_multiply_rejects_wrong_length():
    with pytest.raises(DimensionError):
        multiply(np.zeros((2, 2, 2)), np.ones(3), np.ones(2))


def test_associator_vanishes_for_clifford():
    p = curve_eval(clifford_algebra(2)[1], 1.0)
    assert np.abs(associator_form(p, p)).max() < 1e-12


def test_associator_of_nonassociative_example():
    A = associator_form(NONASSOC, NONASSOC)
    np.testing.assert_array_equal(A[:, 0, 0, 0], [1.0, 0.0])


@pytest.mark.parametrize("n", [1, 3, 5])
def test_associator_vanishes_for_projection_algebra(n):
    p = np.zeros((n, n, n))
    for a in range(n):
        p[a, a, a] = 1.0
    assert not np.any(associator_form(p, p))


def test_associator_matches_nested_products(rng):
    p = rng.standard_normal((3, 3, 3))
    f, g, h = rng.standard_normal((3, 3))
    A = associator_form(p, p)
    lhs = np.einsum("abde,b,d,e->a", A, f, g, h)
    rhs = multiply(p, f, multiply(p, g, h)) - multiply(p, multiply(p, f, g), h)
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_star_axioms_generated_cliff3_at_two():
    alg, curve = clifford_algebra(3)
    rep = check_star_axioms(alg, curve_eval(curve, 2.0))
    assert rep.passed, rep.failures()


def test_star_axioms_nonassociative_residual_is_one():
    rep = check_star_axioms(_generic_spec(NONASSOC), NONASSOC)
    assert rep["associativity"].residual == 1.0
    assert rep["associativity"].witness == (0, 0, 0)


@pytest.mark.parametrize("make", [scalar_algebra, lambda: clifford_algebra(2)[0],
                                  lambda: truncated_polynomial_algebra(2, 1.5)])
def test_bullet_passes_star_axioms(make):
    alg = make()
    assert check_star_axioms(alg, alg.bullet).passed


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("h", [0.0, 0.3, 1.0, 2.0])
def test_generated_clifford_curve_is_star_product(n, h):
    alg, curve = clifford_algebra(n)
    rep = check_star_axioms(alg, curve_eval(curve, h))
    assert max(c.residual for c in rep.checks.values()) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bullet_is_graded_commutative(n):
    alg, _ = clifford_algebra(n)
    assert check_commutativity(alg).passed


def test_bosonic_bullet_is_symmetric():
    alg = truncated_polynomial_algebra(2, 1.0)
    assert np.array_equal(alg.bullet, np.transpose(alg.bullet, (0, 2, 1)))


def test_poisson_zero_bracket():
    rep = check_poisson_axioms(truncated_polynomial_algebra(2))
    assert all(c.residual == 0 for c in rep.checks.values())


def test_poisson_nilpotent_truncation_passes():
    assert check_poisson_axioms(truncated_polynomial_algebra(1)).passed
    assert check_poisson_axioms(truncated_polynomial_algebra(2, 0.8)).passed


def test_poisson_perturbed_bracket_breaks_jacobi():
    alg = truncated_polynomial_algebra(2, 1.0)
    P = np.array(alg.poisson)
    P[1, 0, 1] += 0.1  # {1, x} picks up 0.1 x
    bad = AlgebraSpec(dim=4, field="real", bullet=alg.bullet, unit=alg.unit,
                      involution=alg.involution, poisson=P)
    assert check_poisson_axioms(bad)["jacobi"].residual > 0


def test_poisson_fermionic_mode_rejected():
    with pytest.raises(ValueError):
        check_poisson_axioms(truncated_polynomial_algebra(1), mode="fermionic")


def test_norm_estimate_scalar():
    assert product_norm_estimate(scalar_algebra().bullet, 50, 3) == (1.0, 1.0)


def test_norm_estimate_zero():
    assert product_norm_estimate(np.zeros((3, 3, 3))) == (0.0, 0.0)


# sup over unit f of |L_f|_2 on a 61x61x121 angular grid of the unit 3-sphere
EXTERIOR2_GRID_NORM = 1.2247448612784064


def test_norm_estimate_exterior_product_fixture():
    lower, upper = product_norm_estimate(clifford_algebra(2)[0].bullet, 1000, 0)
    assert lower == pytest.approx(1.210850918522332, abs=1e-12)
    assert upper == pytest.approx(2.0, abs=1e-12)
    assert lower <= EXTERIOR2_GRID_NORM + 1e-9 <= upper


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 4), samples=st.integers(1, 50))
def test_norm_estimate_bracket_ordered(seed, n, samples):
    p = np.random.default_rng(seed).standard_normal((n, n, n))
    lower, upper = product_norm_estimate(p, samples, seed)
    assert 0 <= lower <= upper < np.inf


def test_curve_second_derivative_entry():
    _, curve = clifford_algebra(2)
    for h in (0.0, 0.4, 3.0):
        assert curve_eval(curve, h, 2)[0, 3, 3] == -2.0


def test_curve_first_derivative_diagonal():
    _, curve = clifford_algebra(2)
    d = curve_eval(curve, 0.0, 1)
    assert d[0, 1, 1] == 1.0 and d[0, 2, 2] == 1.0


def test_constant_curve_has_zero_derivative():
    c = ProductCurve((np.ones((2, 2, 2)),))
    assert not np.any(curve_eval(c, 0.3, 1))
    with pytest.raises(ValueError):
        curve_eval(c, 0.3, 3)


def test_curve_derivatives_match_finite_differences():
    _, curve = clifford_algebra(3)
    h, eps = 0.7, 1e-5
    fd1 = (curve_eval(curve, h + eps) - curve_eval(curve, h - eps)) / (2 * eps)
    np.testing.assert_allclose(curve_eval(curve, h, 1), fd1, atol=1e-8)


def test_pushforward_identity_is_noop(rng):
    p = rng.standard_normal((3, 3, 3))
    np.testing.assert_array_equal(pushforward_product(AutomorphismMap(np.eye(3)), p), p)


def test_pushforward_rotation_preserves_clifford():
    _, curve = clifford_algebra(2)
    U = AutomorphismMap(generator_rotation(2, 0, 1))
    for h in (0.0, 0.5, 1.0):
        p = curve_eval(curve, h)
        np.testing.assert_allclose(pushforward_product(U, p), p, atol=1e-14)


def test_pushforward_scaling_dim_one():
    out = pushforward_product(AutomorphismMap(2 * np.eye(1)), scalar_algebra().bullet)
    assert out[0, 0, 0] == pytest.approx(0.5)


def test_pushforward_is_group_action(rng):
    p = rng.standard_normal((3, 3, 3))
    U = AutomorphismMap(np.eye(3) + 0.3 * rng.standard_normal((3, 3)))
    V = AutomorphismMap(np.eye(3) + 0.3 * rng.standard_normal((3, 3)))
    lhs = pushforward_product(U.compose(V), p)
    rhs = pushforward_product(U, pushforward_product(V, p))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_singular_map_rejected():
    with pytest.raises(InvertibilityError):
        AutomorphismMap(np.zeros((2, 2))).inverse_matrix()


def test_automorphism_identity():
    rep = check_automorphism(AutomorphismMap(np.eye(4)), clifford_algebra(2)[0])
    assert all(c.residual == 0 for c in rep.checks.values())


def test_automorphism_rotation():
    rep = check_automorphism(AutomorphismMap(generator_rotation(2, 0, 1)), clifford_algebra(2)[0])
    assert max(c.residual for c in rep.checks.values()) < 1e-12


def test_automorphism_scaling_breaks_product():
    M = np.eye(4)
    M[1, 1] = 2.0
    alg, curve = clifford_algebra(2)
    # on the commutative product e1 * e1 = 0, so test against the h = 1 product
    at_one = AlgebraSpec(dim=4, field="real", bullet=curve_eval(curve, 1.0), unit=alg.unit,
                         involution=alg.involution, poisson=np.zeros((4, 4, 4)))
    assert check_automorphism(AutomorphismMap(M), at_one)["product"].residual > 0


def test_spec_validation_errors():
    with pytest.raises(DimensionError):
        AlgebraSpec(dim=2, field="real", bullet=np.zeros((2, 2, 3)), unit=[1, 0],
                    involution=np.eye(2), poisson=np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        AlgebraSpec(dim=1, field="quaternion", bullet=np.ones((1, 1, 1)), unit=[1],
                    involution=np.eye(1), poisson=np.zeros((1, 1, 1)))
    with pytest.raises(DimensionError):
        AlgebraSpec(dim=1, field="real", bullet=np.full((1, 1, 1), np.nan), unit=[1],
                    involution=np.eye(1), poisson=np.zeros((1, 1, 1)))


def test_complex_algebra_validates():
    alg = truncated_polynomial_algebra(2, 1.0, field="complex")
    assert alg.validate().passed
