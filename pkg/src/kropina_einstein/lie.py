"""Finite-dimensional real Lie algebras given by structure constants.

Convention: ``c[i, j, k]`` is the coefficient of ``e_k`` in ``[e_i, e_j]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InputError

KERNEL_RTOL = 1e-10
JACOBI_TOL = 1e-12


def _as_vector(v, dim: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape != (dim,):
        raise InputError(f"expected a vector of length {dim}, got shape {v.shape}")
    return v


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    c: np.ndarray
    basis_names: tuple[str, ...] = ()
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        c = np.array(self.c, dtype=float)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]) or c.shape[0] < 1:
            raise InputError(f"structure constants must be a dim x dim x dim array, got {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "c", c)
        names = tuple(self.basis_names) or tuple(f"e{i + 1}" for i in range(c.shape[0]))
        if len(names) != c.shape[0]:
            raise InputError(f"{len(names)} basis names for a {c.shape[0]}-dimensional algebra")
        object.__setattr__(self, "basis_names", names)
        if self.validate:
            if np.any(c + c.transpose(1, 0, 2) != 0.0):
                raise InputError("structure constants are not antisymmetric in (i, j)")
            defect = jacobi_defect(c)
            scale = max(1.0, float(np.abs(c).max())) ** 2
            if defect > JACOBI_TOL * scale:
                raise InputError(f"Jacobi identity fails (defect {defect:.3e})")

    @property
    def dim(self) -> int:
        return self.c.shape[0]

    @classmethod
    def from_brackets(cls, dim: int, brackets: dict[tuple[int, int], Sequence[float]],
                      basis_names: Sequence[str] = (), validate: bool = True) -> "LieAlgebra":
        """Build from ``{(i, j): coeffs}`` listing each unordered pair once."""
        c = np.zeros((dim, dim, dim))
        for (i, j), coeffs in brackets.items():
            if not (0 <= i < dim and 0 <= j < dim) or i == j:
                raise InputError(f"invalid bracket index pair ({i}, {j})")
            coeffs = _as_vector(coeffs, dim)
            c[i, j] = coeffs
            c[j, i] = -coeffs
        return cls(c, tuple(basis_names), validate)

    def basis_vector(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e


@dataclass(frozen=True, eq=False)
class BilinearForm:
    m: np.ndarray

    def __post_init__(self):
        m = np.array(self.m, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise InputError(f"bilinear form must be square, got shape {m.shape}")
        if np.any(m != m.T):
            raise InputError("bilinear form is not symmetric")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    def __call__(self, u, v) -> float:
        return float(np.asarray(u) @ self.m @ np.asarray(v))


@dataclass(frozen=True, eq=False)
class InnerProduct:
    """Positive-definite symmetric form; a left-invariant metric on the group."""

    g: np.ndarray

    def __post_init__(self):
        g = np.array(self.g, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise InputError(f"metric must be square, got shape {g.shape}")
        if np.any(g != g.T):
            raise InputError("metric is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0.0:
            raise InputError("metric is not positive definite")
        g.setflags(write=False)
        object.__setattr__(self, "g", g)

    @classmethod
    def symmetrized(cls, g) -> "InnerProduct":
        g = np.asarray(g, dtype=float)
        return cls(0.5 * (g + g.T))

    @property
    def dim(self) -> int:
        return self.g.shape[0]

    def __call__(self, u, v) -> float:
        return float(np.asarray(u) @ self.g @ np.asarray(v))

    def norm(self, u) -> float:
        return float(np.sqrt(self(u, u)))

    def orthonormal_frame(self) -> np.ndarray:
        """Gram-Schmidt of the coordinate basis in order; columns are the frame."""
        L = np.linalg.cholesky(self.g)
        return np.linalg.inv(L).T


def bracket(A: LieAlgebra, u, v) -> np.ndarray:
    u = _as_vector(u, A.dim)
    v = _as_vector(v, A.dim)
    return np.einsum("ijk,i,j->k", A.c, u, v)


def jacobi_defect(A) -> float:
    """Max-norm of the cyclic Jacobi sum over all basis triples.

    Accepts a :class:`LieAlgebra` or a raw structure-constant array, so that
    invalid constants can be diagnosed before construction.
    """
    c = A.c if isinstance(A, LieAlgebra) else np.asarray(A, dtype=float)
    # [e_i, [e_j, e_k]] has coefficient sum_m c[j,k,m] c[i,m,l] on e_l
    t = np.einsum("jkm,iml->ijkl", c, c)
    cyc = t + t.transpose(1, 2, 0, 3) + t.transpose(2, 0, 1, 3)
    return float(np.abs(cyc).max()) if cyc.size else 0.0


def ad_matrix(A: LieAlgebra, w) -> np.ndarray:
    w = _as_vector(w, A.dim)
    return np.einsum("ijk,i->kj", A.c, w)


def ad_star_matrix(A: LieAlgebra, g: InnerProduct, w) -> np.ndarray:
    """g-adjoint of ``ad_matrix(A, w)``."""
    if g.dim != A.dim:
        raise InputError(f"metric dimension {g.dim} does not match algebra dimension {A.dim}")
    return np.linalg.solve(g.g, ad_matrix(A, w).T @ g.g)


def killing_form(A: LieAlgebra) -> BilinearForm:
    ads = np.einsum("ijk->ikj", A.c)  # ads[i] = ad(e_i)
    B = np.einsum("iab,jba->ij", ads, ads)
    return BilinearForm(0.5 * (B + B.T))


def center(A: LieAlgebra) -> list[np.ndarray]:
    M = A.c.reshape(A.dim, -1).T  # w -> (c[i,j,k] w_i)_{j,k}
    return kernel_basis(M)


def kernel_basis(M: np.ndarray, metric: np.ndarray | None = None,
                 rtol: float = KERNEL_RTOL) -> list[np.ndarray]:
    """Canonical basis of ker M, orthonormal for ``metric`` (Euclidean by default).

    Rank is decided by singular values above ``rtol`` times the largest one.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[1]
    s_max = np.abs(M).max() if M.size else 0.0
    if s_max == 0.0:
        V = np.eye(n)
    else:
        _, s, vt = np.linalg.svd(M)
        rank = int(np.sum(s > rtol * s[0]))
        V = vt[rank:].T
    return canonical_span_basis(V, metric)


def canonical_span_basis(V: np.ndarray, metric: np.ndarray | None = None) -> list[np.ndarray]:
    """Deterministic orthonormal basis of the column span of ``V``.

    The basis is independent of which spanning set is passed in: columns of the
    orthogonal projector onto the span are Gram-Schmidt'ed, preferring low
    coordinate indices, and each vector gets its first significant entry positive.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    G = np.eye(n) if metric is None else np.asarray(metric, dtype=float)
    d = V.shape[1] if V.ndim == 2 else 0
    if d == 0:
        return []
    P = V @ np.linalg.solve(V.T @ G @ V, V.T @ G)
    basis: list[np.ndarray] = []
    resid = P.copy()
    for _ in range(d):
        norms = np.sqrt(np.maximum(np.einsum("ij,ik,kj->j", resid, G, resid), 0.0))
        j = int(np.argmax(norms >= 0.5 * norms.max()))
        v = resid[:, j] / norms[j]
        big = np.flatnonzero(np.abs(v) > 1e-10 * np.abs(v).max())
        if v[big[0]] < 0:
            v = -v
        basis.append(v)
        resid = resid - np.outer(v, v @ G @ resid)
    return basis
