import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kropina_einstein import catalog, chart
from kropina_einstein.errors import ChartRadiusError, DomainError, InputError
from kropina_einstein.kropina import NavigationData
from kropina_einstein.lie import InnerProduct, ad_matrix
from kropina_einstein.riemann import riemann_ricci

CFG = chart.ChartConfig()
small = arrays(np.float64, 3, elements=st.floats(-0.17, 0.17, allow_nan=False))


def so3_nav():
    e = catalog.get("so_n", {"n": 3})
    return e.algebra, NavigationData.normalized(e.metric, e.vector("W_thm3"))


def test_config_validation():
    with pytest.raises(InputError):
        chart.ChartConfig(series_order=2)
    with pytest.raises(InputError):
        chart.ChartConfig(radius=0.0)
    with pytest.raises(InputError):
        chart.normalize_kind("sideways")
    assert chart.normalize_kind("Right-invariant") == "right"


@given(small)
def test_series_identities(x):
    A = catalog.su2_algebra()
    Phi = chart.phi_series(A, x, 12)
    Psi = chart.psi_series(A, x, 12)
    np.testing.assert_allclose(Phi @ x, x, atol=1e-14)  # ad(x) x = 0
    np.testing.assert_allclose(Psi, chart.phi_series(A, -x, 12), atol=1e-15)
    # Ad(exp x) = exp(ad x) carries the left trivialization to the right one
    np.testing.assert_allclose(chart.expm_series(A, x, 14) @ Phi, Psi, atol=1e-13)


def test_expm_series_is_rotation_for_so3(so3):
    x = np.array([0.0, 0.0, 0.4])
    R = chart.expm_series(so3, x, 20)
    np.testing.assert_allclose(R.T @ R, np.eye(3), atol=1e-14)
    assert np.linalg.det(R) == pytest.approx(1.0)


def test_left_frame_is_left_invariant_field_by_finite_differences(su2):
    # exp(x(t)) with x(t) = x + t P(x) u equals exp(x) exp(t u) to first order
    x = np.array([0.2, -0.1, 0.15])
    u = np.array([0.3, 0.5, -0.2])
    P = chart.left_frame(su2, x)
    h = 1e-6
    Ap = chart.expm_series(su2, x + h * (P @ u), 30)
    Am = chart.expm_series(su2, x - h * (P @ u), 30)
    deriv = (Ap - Am) / (2 * h)
    expected = chart.expm_series(su2, x, 30) @ ad_matrix(su2, u)
    np.testing.assert_allclose(deriv, expected, atol=1e-8)


def test_chart_radius_error(su2):
    # d exp is singular at |x| = 2 pi on su(2)
    with pytest.raises(ChartRadiusError):
        chart.left_frame(su2, np.array([2 * np.pi, 0, 0]), chart.ChartConfig(series_order=60))


def test_metric_chart_at_identity(so3):
    g = InnerProduct(2 * np.eye(3))
    np.testing.assert_allclose(chart.metric_chart(so3, g, np.zeros(3)), g.g)


def test_kropina_F_cone(so3):
    A, nav = so3_nav()
    y = np.array([1.0, 0.0, 0.0])
    assert chart.kropina_F(A, nav, "right", np.zeros(3), y) == pytest.approx(np.sqrt(2) / 2)
    with pytest.raises(DomainError):
        chart.kropina_F(A, nav, "right", np.zeros(3), -y)


@pytest.mark.parametrize("name", ["su2_diag", "heisenberg3", "e0tilde2", "so_n"])
def test_riemannian_pipeline_reproduces_ricci(name):
    # F^2 = g(y, y) through the Finsler machinery gives Ric_ij y^i y^j at the identity
    e = catalog.get(name)
    A, g = e.algebra, e.metric
    ric = riemann_ricci(A, g)
    rng = np.random.default_rng(3)
    for _ in range(3):
        y = rng.standard_normal(3)
        s = chart.finsler_data_riemannian(A, g, np.zeros(3), y)
        assert s.ric == pytest.approx(y @ ric @ y, abs=1e-10)


def test_riemann_ricci_chart_pullback(so3):
    g = InnerProduct(np.diag([1.0, 2.0, 3.0]))
    ric = riemann_ricci(so3, g)
    x = np.array([0.1, -0.2, 0.05])
    P = chart.left_frame(so3, x)
    np.testing.assert_allclose(P.T @ chart.riemann_ricci_chart(so3, g, x) @ P, ric, atol=1e-9)


def finsler_samples(A, nav, kind, count=6, seed=1):
    cfg = chart.ChartConfig(sample_count=count, rng_seed=seed)
    return [chart.finsler_data(A, nav, kind, x, y, cfg) for x, y in chart.sample_pairs(A, nav, kind, cfg)]


def test_finsler_euler_identity_and_homogeneity():
    A, nav = so3_nav()
    for s in finsler_samples(A, nav, "right"):
        dF2y = s.derivatives["dF2_dy"]
        assert dF2y @ s.y == pytest.approx(2 * s.F ** 2, rel=1e-12)
        assert s.y @ s.g_y @ s.y == pytest.approx(s.F ** 2, rel=1e-10)
        assert np.linalg.eigvalsh(s.g_y).min() > 0
        # G is 2-homogeneous in y: y^k dG/dy^k = 2 G
        np.testing.assert_allclose(s.derivatives["dG_dy"] @ s.y, 2 * s.G, atol=1e-10 * (1 + np.abs(s.G).max()))
        s2 = chart.finsler_data(A, nav, "right", s.x, 2.5 * s.y)
        np.testing.assert_allclose(s2.g_y, s.g_y, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(s2.G, 2.5 ** 2 * s.G, rtol=1e-10, atol=1e-12)
        assert s2.ric == pytest.approx(2.5 ** 2 * s.ric, rel=1e-9)


def test_jets_agree_with_finite_differences():
    A, nav = so3_nav()
    cfg = chart.ChartConfig(sample_count=2, rng_seed=5)
    for x, y in chart.sample_pairs(A, nav, "right", cfg):
        dev = chart.derivative_crosscheck(A, nav, "right", x, y, cfg)
        assert max(dev.values()) < 1e-5, dev


def test_so3_finsler_einstein_residual():
    A, nav = so3_nav()
    rep = chart.einstein_residual(A, nav, "right", 0.25, chart.ChartConfig(sample_count=8))
    assert len(rep.samples) == 8 and rep.rejected == 0
    assert rep.max_residual < 1e-8
    np.testing.assert_allclose(rep.ratios, 0.25, atol=1e-8)


def test_sampling_is_seeded_and_within_radius():
    A, nav = so3_nav()
    cfg = chart.ChartConfig(sample_count=10, rng_seed=42, radius=0.2)
    a = chart.sample_pairs(A, nav, "left", cfg)
    b = chart.sample_pairs(A, nav, "left", cfg)
    for (x1, y1), (x2, y2) in zip(a, b):
        np.testing.assert_array_equal(x1, x2)
        np.testing.assert_array_equal(y1, y2)
        assert np.linalg.norm(x1) <= 0.2
        G = chart.metric_chart(A, nav.h, x1, cfg)
        V = chart.field_chart(A, nav.W, "left", x1, cfg)
        assert V @ G @ y1 > 0


def test_lie_derivative_and_invariance_diagnostics(su2):
    e = catalog.get("su2_diag", [1, 2, 3])
    # right-invariant fields are Killing for every left-invariant metric
    assert chart.max_lie_derivative(su2, e.metric, [1, 0, 0], "right") < 1e-10
    # a left-invariant field generally is not
    assert chart.max_lie_derivative(su2, e.metric, [1, 0, 0], "left") > 1e-3
    nav = NavigationData.normalized(e.metric, [1, 0, 0])
    assert chart.left_invariance_check(su2, nav, "left") < 1e-12
    assert chart.ad_orbit_norm(su2, e.metric, nav.W) > 1e-3


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_fundamental_tensor_positive_on_cone(seed):
    e = catalog.get("su2_round", {"lam": 1.0})
    nav = NavigationData.normalized(e.metric, [0.0, 1.0, 1.0])
    cfg = chart.ChartConfig(sample_count=1, rng_seed=seed)
    (x, y), = chart.sample_pairs(e.algebra, nav, "left", cfg)
    s = chart.finsler_data(e.algebra, nav, "left", x, y, cfg)
    assert np.linalg.eigvalsh(s.g_y).min() > 0
    assert s.ric / s.F ** 2 == pytest.approx(0.5, abs=1e-8)
