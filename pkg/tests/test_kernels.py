import os
import subprocess
import sys

import numpy as np
import pytest

from starquant import kernels
from starquant.clifford import clifford_algebra
from starquant.algebra import curve_eval

BACKENDS = kernels.available_backends()


def loop_associator(p, q):
    n = p.shape[0]
    out = np.zeros((n,) * 4, dtype=np.result_type(p, q))
    for a in range(n):
        for b in range(n):
            for d in range(n):
                for e in range(n):
                    for c in range(n):
                        out[a, b, d, e] += p[a, b, c] * q[c, d, e] - q[c, b, d] * p[a, c, e]
    return out


def loop_two_term(x, lam):
    n = x.shape[0]
    out = np.zeros((n, n, n), dtype=np.result_type(x, lam))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for a in range(n):
                    for b in range(n):
                        out[i, j, k] += x[a, b, i] * lam[a, b, j, k] - x[j, a, b] * lam[i, a, b, k]
    return out


def random_product(rng, n, complex_):
    p = rng.standard_normal((n, n, n))
    if complex_:
        p = p + 1j * rng.standard_normal((n, n, n))
    return p


@pytest.mark.parametrize("name", list(BACKENDS))
@pytest.mark.parametrize("complex_", [False, True])
def test_associator_matches_loop(name, complex_, rng):
    impl = BACKENDS[name]
    p, q = random_product(rng, 3, complex_), random_product(rng, 3, complex_)
    np.testing.assert_allclose(impl.associator(p, q), loop_associator(p, q), atol=1e-12)


@pytest.mark.parametrize("name", list(BACKENDS))
@pytest.mark.parametrize("complex_", [False, True])
def test_jacobian_is_derivative_of_associator(name, complex_, rng):
    impl = BACKENDS[name]
    x, dx = random_product(rng, 3, complex_), random_product(rng, 3, complex_)
    J = impl.associator_jacobian(x)
    expected = loop_associator(x, dx) + loop_associator(dx, x)
    np.testing.assert_allclose(J @ dx.ravel(), expected.ravel(), atol=1e-12)


@pytest.mark.parametrize("name", list(BACKENDS))
def test_two_term_operator_matches_loop(name, rng):
    impl = BACKENDS[name]
    x = curve_eval(clifford_algebra(2)[1], 1.0)
    lam = rng.standard_normal((4, 4, 4, 4))
    M = impl.two_term_operator(x)
    assert M.shape == (64, 256)
    np.testing.assert_allclose(M @ lam.ravel(), loop_two_term(x, lam).ravel(), atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@pytest.mark.parametrize("complex_", [False, True])
def test_backends_agree(complex_, rng):
    c, py = BACKENDS["cython"], BACKENDS["python"]
    x, y = random_product(rng, 5, complex_), random_product(rng, 5, complex_)
    np.testing.assert_allclose(c.associator(x, y), py.associator(x, y), atol=1e-12)
    np.testing.assert_allclose(c.associator_jacobian(x), py.associator_jacobian(x), atol=1e-12)
    np.testing.assert_allclose(c.two_term_operator(x), py.two_term_operator(x), atol=1e-12)


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
def test_compiled_accepts_read_only_input(rng):
    x = random_product(rng, 2, False)
    x.flags.writeable = False
    np.testing.assert_allclose(BACKENDS["cython"].associator(x, x), loop_associator(x, x), atol=1e-12)


def test_selected_backend_is_listed():
    assert kernels.BACKEND in BACKENDS


def test_environment_forces_fallback():
    out = subprocess.run([sys.executable, "-c", "from starquant import kernels; print(kernels.BACKEND)"],
                         env={**os.environ, "STARQUANT_PURE_PYTHON": "1"}, capture_output=True,
                         text=True, check=True)
    assert out.stdout.strip() == "python"
