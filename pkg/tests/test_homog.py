import numpy as np
import pytest

from kropina_einstein import catalog
from kropina_einstein.errors import InputError, ReductiveError
from kropina_einstein.homog import (build_reductive, homogeneous_kropina_certificate, invariant_vectors,
                                    isotropy_defect, nomizu_curvature, nomizu_ricci, sectional_curvature)
from kropina_einstein.lie import InnerProduct, killing_form
from kropina_einstein.riemann import fit_einstein, riemann_ricci


def test_trivial_isotropy_reduces_to_group_ricci():
    for name in ("su2_diag", "heisenberg3", "so_n"):
        e = catalog.get(name)
        S = build_reductive(e.algebra, [], e.metric)
        assert S.dim_h == 0
        np.testing.assert_allclose(nomizu_ricci(S), riemann_ricci(e.algebra, e.metric), atol=1e-14)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_sphere_so_round(n):
    e = catalog.get("sphere_so", {"n": n})
    S = e.space
    assert (S.dim_h, S.dim_m) == (n * (n - 1) // 2, n)
    assert invariant_vectors(S) == []
    fit = fit_einstein(nomizu_ricci(S), S.metric_m.g)
    assert fit.residual < 1e-12
    # constant curvature 1/(2(n-1)) under -B on so(n+1), Ric = (n-1) K g
    assert fit.sigma == pytest.approx(0.5)
    E = S.metric_m.orthonormal_frame()
    R = nomizu_curvature(S)
    assert sectional_curvature(S, E[:, 0], E[:, 1], R) == pytest.approx(1 / (2 * (n - 1)))


@pytest.mark.parametrize("n", [1, 2])
def test_sphere_u_hopf(n):
    e = catalog.get("sphere_u", {"n": n})
    S = e.space
    assert S.dim_m == 2 * n + 1
    m0 = invariant_vectors(S)
    assert len(m0) == 1
    assert isotropy_defect(S) < 1e-12
    cert = homogeneous_kropina_certificate(S, e.vector("hopf"))
    assert cert.verdict == "homogeneous_einstein_kropina"
    assert cert.sigma == pytest.approx(2.0 * n)
    assert cert.checks[0].value < 1e-10
    # the unit round sphere has all sectional curvatures 1
    E = S.metric_m.orthonormal_frame()
    R = nomizu_curvature(S)
    for a in range(S.dim_m):
        for b in range(a + 1, S.dim_m):
            assert sectional_curvature(S, E[:, a], E[:, b], R) == pytest.approx(1.0, abs=1e-12)


def test_sphere_u_normal_metric_is_berger_not_einstein():
    e = catalog.get("sphere_u", {"n": 1})
    S = build_reductive(e.algebra, e.space.h_basis, e.metric)
    assert fit_einstein(nomizu_ricci(S), S.metric_m.g).residual > 0.1


def test_non_invariant_vector_is_einstein_non_homogeneous():
    e = catalog.get("sphere_u", {"n": 1})
    cert = homogeneous_kropina_certificate(e.space, e.vector("horizontal"))
    assert cert.verdict == "einstein_non_homogeneous"
    assert cert.failing() == ["ad_h_invariant"]


def test_not_a_subalgebra_names_invariant():
    A = catalog.so_algebra(3)
    Q = InnerProduct(-killing_form(A).m)
    with pytest.raises(ReductiveError) as err:
        build_reductive(A, [[1, 0, 0], [0, 1, 0]], Q)
    assert "subalgebra" in err.value.invariant
    assert err.value.defect > 0


def test_non_reductive_complement_detected():
    # h = span{x} in the Heisenberg algebra with a skewed form: [x, m] leaks into h
    A = catalog.get("heisenberg3").algebra
    Q = InnerProduct(np.array([[1.0, 0.0, 0.9], [0.0, 1.0, 0.0], [0.9, 0.0, 1.0]]))
    with pytest.raises(ReductiveError) as err:
        build_reductive(A, [[1, 0, 0]], Q)
    assert "reductive" in err.value.invariant


def test_non_invariant_metric_rejected():
    e = catalog.get("sphere_so", {"n": 2})
    with pytest.raises(ReductiveError) as err:
        build_reductive(e.algebra, e.space.h_basis, e.metric, InnerProduct(np.diag([1.0, 2.0])))
    assert "ad(h)-invariant" in err.value.invariant


def test_input_validation():
    e = catalog.get("sphere_u", {"n": 1})
    with pytest.raises(InputError):
        homogeneous_kropina_certificate(e.space, np.zeros(3))
    with pytest.raises(InputError):
        homogeneous_kropina_certificate(e.space, np.ones(4))
    with pytest.raises(InputError):
        build_reductive(e.algebra, [np.eye(4)[0], np.eye(4)[0]], e.metric)


def test_split_roundtrip(rng):
    S = catalog.get("sphere_u", {"n": 2}).space
    v = rng.standard_normal(S.ambient.dim)
    hc, mc = S.split(v)
    np.testing.assert_allclose(S.H @ hc + S.M @ mc, v, atol=1e-12)
