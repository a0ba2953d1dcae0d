import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kropina_einstein.jets import JetSpace, jet_space

coords = st.floats(-2.0, 2.0, allow_nan=False)


def poly_jet(S, x0, y0):
    """f(x, y) = 3 x^2 y - y^3 + 2 x + 1 built by jet arithmetic around (x0, y0)."""
    x, y = S.variables([x0, y0])
    return 3 * S.mul(S.mul(x, x), y) - S.mul(S.mul(y, y), y) + 2 * x + S.const(1.0)


def test_monomial_count():
    # C(n + d, d)
    assert JetSpace(2, 4).size == 15
    assert JetSpace(6, 4).size == 210
    assert jet_space(3, 2) is jet_space(3, 2)


@given(coords, coords)
def test_polynomial_derivatives_exact(x0, y0):
    S = jet_space(2, 4)
    f = poly_jet(S, x0, y0)
    assert S.value(f) == pytest.approx(3 * x0 ** 2 * y0 - y0 ** 3 + 2 * x0 + 1, abs=1e-10)
    np.testing.assert_allclose(S.gradient(f), [6 * x0 * y0 + 2, 3 * x0 ** 2 - 3 * y0 ** 2], atol=1e-10)
    np.testing.assert_allclose(S.hessian(f), [[6 * y0, 6 * x0], [6 * x0, -6 * y0]], atol=1e-10)


@given(coords, coords)
def test_diff_commutes_and_lowers_degree(x0, y0):
    S = jet_space(2, 4)
    f = poly_jet(S, x0, y0)
    fxy = S.diff(S.diff(f, 0), 1)
    fyx = S.diff(S.diff(f, 1), 0)
    np.testing.assert_allclose(fxy, fyx)
    assert S.value(fxy) == pytest.approx(6 * x0, abs=1e-10)


@settings(max_examples=40)
@given(st.floats(0.5, 3.0), coords)
def test_recip_matches_analytic_derivatives(a, b):
    # 1 / (a + x + b y) around 0
    S = jet_space(2, 4)
    x, y = S.variables([0.0, 0.0])
    r = S.recip(S.const(a) + x + b * y)
    assert S.value(r) == pytest.approx(1 / a)
    np.testing.assert_allclose(S.gradient(r), [-1 / a ** 2, -b / a ** 2], rtol=1e-12)
    np.testing.assert_allclose(S.hessian(r), 2 / a ** 3 * np.array([[1, b], [b, b * b]]), rtol=1e-12, atol=1e-14)
    # exact to the full order: r * (a + x + b y) == 1
    prod = S.mul(r, S.const(a) + x + b * y)
    np.testing.assert_allclose(prod, S.const(1.0), atol=1e-12)


def test_matrix_inverse_series(rng):
    S = jet_space(3, 3)
    xs = S.variables(rng.standard_normal(3) * 0.1)
    A0 = np.eye(2) * 2 + rng.standard_normal((2, 2)) * 0.1
    A = S.const(A0) + np.einsum("ij,kp->ijp", rng.standard_normal((2, 2)), xs)[..., :] / 10
    Ainv = S.inv(A)
    np.testing.assert_allclose(S.matmul(A, Ainv), S.const(np.eye(2)), atol=1e-12)
    np.testing.assert_allclose(S.value(Ainv), np.linalg.inv(S.value(A)), atol=1e-14)


def test_dot_and_matvec_agree_with_mul(rng):
    S = jet_space(2, 3)
    u = rng.standard_normal((3, S.size))
    v = rng.standard_normal((3, S.size))
    M = rng.standard_normal((3, 3, S.size))
    np.testing.assert_allclose(S.dot(u, v), sum(S.mul(u[i], v[i]) for i in range(3)), atol=1e-12)
    expected = np.stack([sum(S.mul(M[i, k], v[k]) for k in range(3)) for i in range(3)])
    np.testing.assert_allclose(S.matvec(M, v), expected, atol=1e-12)
