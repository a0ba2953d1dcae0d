"""Reductive homogeneous spaces G/H and invariant Kropina metrics on them.

Vectors of m are handled in the coordinates of ``m_basis``; vectors of g in the
ambient basis.  Ad(H)-invariance is tested infinitesimally ([h, W] = 0), which
is equivalent for connected H.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, ReductiveError
from .kropina import UNIT_TOL, Certificate, Check, _span_residual
from .lie import InnerProduct, LieAlgebra, canonical_span_basis, kernel_basis
from .riemann import ricci_from_curvature, fit_einstein

TOL_REDUCTIVE = 1e-10
TOL_HOMOG_EINSTEIN = 1e-8
TOL_INVARIANT = 1e-8


@dataclass(frozen=True, eq=False)
class ReductiveSpace:
    ambient: LieAlgebra
    h_basis: tuple[np.ndarray, ...]
    m_basis: tuple[np.ndarray, ...]
    metric_m: InnerProduct

    @property
    def dim_h(self) -> int:
        return len(self.h_basis)

    @property
    def dim_m(self) -> int:
        return len(self.m_basis)

    @property
    def H(self) -> np.ndarray:
        return np.array(self.h_basis).reshape(self.dim_h, self.ambient.dim).T

    @property
    def M(self) -> np.ndarray:
        return np.array(self.m_basis).reshape(self.dim_m, self.ambient.dim).T

    def split(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of an ambient vector (or stack, last axis) in h_basis and m_basis."""
        Binv = np.linalg.inv(np.hstack([self.H, self.M]))
        coords = np.einsum("ij,...j->...i", Binv, np.asarray(v, dtype=float))
        return coords[..., : self.dim_h], coords[..., self.dim_h:]

    def to_ambient(self, w_m) -> np.ndarray:
        return self.M @ np.asarray(w_m, dtype=float)

    def structure(self):
        """Bracket tables: [m_a, m_b] split into (h, m) parts, and [h_p, m_a] in m."""
        c = self.ambient.c
        H, M = self.H, self.M
        mm = np.einsum("ijk,ia,jb->abk", c, M, M)
        hm = np.einsum("ijk,ip,ja->pak", c, H, M)
        mm_h, mm_m = self.split(mm)
        _, hm_m = self.split(hm)
        return mm_h, mm_m, hm_m


def _defect_scale(c: np.ndarray) -> float:
    return max(1.0, float(np.abs(c).max()))


def build_reductive(ambient: LieAlgebra, h_basis, Q: InnerProduct,
                    metric_m: InnerProduct | None = None) -> ReductiveSpace:
    """g = h + m with m the Q-orthogonal complement of h.

    ``metric_m`` defaults to the restriction of Q (a normal metric); any other
    Ad(H)-invariant inner product on m-coordinates may be supplied instead.
    """
    dim = ambient.dim
    if Q.dim != dim:
        raise InputError(f"ambient form has dimension {Q.dim}, algebra has {dim}")
    H = np.array([np.asarray(h, dtype=float) for h in h_basis]).reshape(-1, dim).T
    k = H.shape[1]
    if k and np.linalg.matrix_rank(H) < k:
        raise InputError("subalgebra basis is linearly dependent")
    if k == dim:
        raise InputError("subalgebra must be a proper subspace")
    M = np.column_stack(kernel_basis(H.T @ Q.g)) if k else np.eye(dim)
    m_basis = tuple(M.T.copy())
    normal = InnerProduct.symmetrized(M.T @ Q.g @ M)
    S = ReductiveSpace(ambient, tuple(H.T.copy()), m_basis, normal)

    scale = _defect_scale(ambient.c)
    if k:
        hh = np.einsum("ijk,ip,jq->pqk", ambient.c, H, H)
        _, hh_m = S.split(hh)
        defect = float(np.abs(hh_m).max())
        if defect > TOL_REDUCTIVE * scale:
            raise ReductiveError("subalgebra: [h, h] is not contained in h", defect)
        hm = np.einsum("ijk,ip,ja->pak", ambient.c, H, M)
        hm_h, _ = S.split(hm)
        defect = float(np.abs(hm_h).max())
        if defect > TOL_REDUCTIVE * scale:
            raise ReductiveError("reductive: [h, m] is not contained in m", defect)
    if metric_m is None:
        metric_m = normal
    elif metric_m.dim != M.shape[1]:
        raise InputError(f"metric_m must be {M.shape[1]}x{M.shape[1]}")
    S = ReductiveSpace(ambient, S.h_basis, m_basis, metric_m)
    defect = isotropy_defect(S)
    if defect > TOL_REDUCTIVE * scale * max(1.0, float(np.abs(metric_m.g).max())):
        raise ReductiveError("metric_m is not ad(h)-invariant", defect)
    return S


def isotropy_defect(S: ReductiveSpace) -> float:
    if not S.dim_h:
        return 0.0
    _, _, hm_m = S.structure()
    g = S.metric_m.g
    worst = 0.0
    for p in range(S.dim_h):
        A = hm_m[p].T  # matrix of u -> [h_p, u]_m
        worst = max(worst, float(np.abs(A.T @ g + g @ A).max()))
    return worst


def invariant_vectors(S: ReductiveSpace) -> list[np.ndarray]:
    """metric_m-orthonormal basis (m-coordinates) of the isotropy-fixed subspace m_0."""
    if not S.dim_h:
        return kernel_basis(np.zeros((1, S.dim_m)), metric=S.metric_m.g)
    _, _, hm_m = S.structure()
    op = np.concatenate([hm_m[p].T for p in range(S.dim_h)], axis=0)
    return kernel_basis(op, metric=S.metric_m.g)


def nomizu_connection(S: ReductiveSpace) -> np.ndarray:
    """``lam[a, b]`` is the m-coordinate vector Lambda(m_a) m_b."""
    _, mm_m, _ = S.structure()
    g = S.metric_m.g
    low = np.einsum("abk,kc->abc", mm_m, g)  # <[m_a, m_b]_m, m_c>
    U = 0.5 * (low.transpose(1, 2, 0) + low.transpose(2, 1, 0))
    lam_low = 0.5 * low + U
    n = S.dim_m
    return np.linalg.solve(g, lam_low.reshape(-1, n).T).T.reshape(n, n, n)


def nomizu_curvature(S: ReductiveSpace) -> np.ndarray:
    """``R[a, b]`` is the matrix of Z -> R(m_a, m_b) Z on m-coordinates."""
    mm_h, mm_m, hm_m = S.structure()
    lam = nomizu_connection(S)
    L = lam.transpose(0, 2, 1)  # L[a] = matrix of Lambda(m_a)
    comm = np.einsum("aij,bjk->abik", L, L)
    R = comm - comm.transpose(1, 0, 2, 3) - np.einsum("abc,cij->abij", mm_m, L)
    if S.dim_h:
        ad_h = hm_m.transpose(0, 2, 1)  # ad_h[p] = matrix of u -> [h_p, u]_m
        R = R - np.einsum("abp,pij->abij", mm_h, ad_h)
    return R


def nomizu_ricci(S: ReductiveSpace) -> np.ndarray:
    return ricci_from_curvature(nomizu_curvature(S), S.metric_m)


def sectional_curvature(S: ReductiveSpace, u, v, R: np.ndarray | None = None) -> float:
    R = nomizu_curvature(S) if R is None else R
    g = S.metric_m.g
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    Ruv_v = np.einsum("a,b,abij,j->i", u, v, R, v)
    area = (u @ g @ u) * (v @ g @ v) - (u @ g @ v) ** 2
    return float(Ruv_v @ g @ u / area)


def homogeneous_kropina_certificate(S: ReductiveSpace, W, normalize: bool = True,
                                    tol_einstein: float = TOL_HOMOG_EINSTEIN) -> Certificate:
    """Invariant Einstein Kropina test for navigation data (metric_m, W*), W in m."""
    W = np.asarray(W, dtype=float)
    if W.shape != (S.dim_m,):
        raise InputError(f"W must have length {S.dim_m} (m-coordinates)")
    if not np.any(W):
        raise InputError("W must be nonzero")
    g = S.metric_m
    raw_norm = g.norm(W)
    if normalize:
        W = W / raw_norm
    fit = fit_einstein(nomizu_ricci(S), g.g)
    m0 = invariant_vectors(S)
    unit = abs(g(W, W) - 1.0)
    inv_resid = _span_residual(W, m0, g.g) if m0 else 1.0
    checks = [
        Check("einstein_metric", fit.residual < tol_einstein, fit.residual, tol_einstein),
        Check("unit_norm", unit <= UNIT_TOL, unit, UNIT_TOL),
        Check("ad_h_invariant", inv_resid < TOL_INVARIANT, inv_resid, TOL_INVARIANT),
    ]
    einstein_ok, unit_ok, inv_ok = (c.passed for c in checks)
    if einstein_ok and unit_ok and inv_ok:
        verdict = "homogeneous_einstein_kropina"
    elif einstein_ok and unit_ok:
        verdict = "einstein_non_homogeneous"
    else:
        verdict = "falsified"
    return Certificate(
        verdict=verdict,
        checks=checks,
        sigma=fit.sigma,
        ricci_constant=einstein_ok and unit_ok and S.dim_m >= 3,
        details={"m0_dim": len(m0), "input_norm": raw_norm, "W": W},
    )
