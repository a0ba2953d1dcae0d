"""Curvature of left-invariant Riemannian metrics, computed on the Lie algebra."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .lie import KERNEL_RTOL, InnerProduct, LieAlgebra, ad_matrix, ad_star_matrix, kernel_basis


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    """``gamma[i, j]`` holds the coordinates of the covariant derivative of e_j along e_i."""

    gamma: np.ndarray

    def operator(self, i: int) -> np.ndarray:
        """Matrix of v -> nabla_{e_i} v."""
        return self.gamma[i].T


@dataclass(frozen=True)
class EinsteinFit:
    sigma: float
    residual: float


def _check(A: LieAlgebra, g: InnerProduct):
    if g.dim != A.dim:
        raise InputError(f"metric dimension {g.dim} does not match algebra dimension {A.dim}")


def koszul_connection(A: LieAlgebra, g: InnerProduct) -> ConnectionTable:
    _check(A, g)
    # lower[i,j,k] = <[e_i,e_j], e_k>
    lower = np.einsum("ijm,mk->ijk", A.c, g.g)
    # 2<nabla_u v, w> = <[u,v],w> - <[v,w],u> + <[w,u],v>
    cov = 0.5 * (lower - lower.transpose(2, 0, 1) + lower.transpose(1, 2, 0))
    gamma = np.linalg.solve(g.g, cov.reshape(-1, A.dim).T).T.reshape(A.dim, A.dim, A.dim)
    return ConnectionTable(gamma)


def curvature_operators(A: LieAlgebra, conn: ConnectionTable) -> np.ndarray:
    """``R[i, j]`` is the matrix of w -> R(e_i, e_j) w.

    R(u, v) = [nabla_u, nabla_v] - nabla_[u,v].
    """
    L = np.stack([conn.operator(i) for i in range(A.dim)])
    comm = np.einsum("iab,jbc->ijac", L, L)
    comm = comm - comm.transpose(1, 0, 2, 3)
    return comm - np.einsum("ijk,kab->ijab", A.c, L)


def ricci_from_curvature(R: np.ndarray, g: InnerProduct) -> np.ndarray:
    """Ric(u, v) = sum_k <R(f_k, u) v, f_k> over the ordered g-orthonormal frame f."""
    E = g.orthonormal_frame()
    # R(f_k, e_a) e_b = sum_i E[i,k] R[i,a] e_b ; pair with g f_k
    ric = np.einsum("ik,lk,lm,iamb->ab", E, E, g.g, R)
    return 0.5 * (ric + ric.T)


def riemann_ricci(A: LieAlgebra, g: InnerProduct) -> np.ndarray:
    conn = koszul_connection(A, g)
    return ricci_from_curvature(curvature_operators(A, conn), g)


def fit_einstein(ric: np.ndarray, g: np.ndarray) -> EinsteinFit:
    """Least-squares Einstein scalar for Ric = sigma g, residual relative to |g|_F."""
    gg = float(np.sum(g * g))
    sigma = float(np.sum(ric * g)) / gg
    residual = float(np.linalg.norm(ric - sigma * g) / np.sqrt(gg))
    return EinsteinFit(sigma, residual)


def einstein_fit(A: LieAlgebra, g: InnerProduct) -> EinsteinFit:
    return fit_einstein(riemann_ricci(A, g), g.g)


def killing_operator(A: LieAlgebra, g: InnerProduct) -> np.ndarray:
    """Matrix (dim^2 x dim) of the linear map w -> ad(w) + ad*(w)."""
    _check(A, g)
    cols = []
    for i in range(A.dim):
        e = A.basis_vector(i)
        cols.append((ad_matrix(A, e) + ad_star_matrix(A, g, e)).ravel())
    return np.stack(cols, axis=1)


def killing_space(A: LieAlgebra, g: InnerProduct) -> list[np.ndarray]:
    """g-orthonormal basis of left-invariant Killing fields."""
    return kernel_basis(killing_operator(A, g), metric=g.g, rtol=KERNEL_RTOL)


def killing_defect(A: LieAlgebra, g: InnerProduct, w) -> float:
    """Max entry of ad(w) + ad*(w)."""
    return float(np.abs(ad_matrix(A, w) + ad_star_matrix(A, g, w)).max())
