"""Truncated multivariate Taylor polynomials (jets).

A jet over ``nvars`` variables to total degree ``order`` is stored as the last
axis of a numpy array, one entry per monomial, so arrays of jets (vectors,
matrices) are ordinary arrays with a trailing coefficient axis.  Products are
truncated; the degree-d coefficient of a product only depends on degrees <= d
of the factors, so a jet that is exact to degree p stays exact to degree p.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np


class JetSpace:
    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        monos = [(0,) * nvars]
        for deg in range(1, order + 1):
            for combo in combinations_with_replacement(range(nvars), deg):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        self.monomials = monos
        self.size = len(monos)
        self.index = {m: i for i, m in enumerate(monos)}
        self.degree = np.array([sum(m) for m in monos])

        I, J, K = [], [], []
        for a, ma in enumerate(monos):
            for b, mb in enumerate(monos):
                if self.degree[a] + self.degree[b] <= order:
                    I.append(a)
                    J.append(b)
                    K.append(self.index[tuple(x + y for x, y in zip(ma, mb))])
        perm = np.argsort(K, kind="stable")
        self._I = np.array(I)[perm]
        self._J = np.array(J)[perm]
        K = np.array(K)[perm]
        self._starts = np.searchsorted(K, np.arange(self.size))

        self._diff = []
        for v in range(nvars):
            src, dst, fac = [], [], []
            for a, m in enumerate(monos):
                if m[v] > 0:
                    lower = list(m)
                    lower[v] -= 1
                    src.append(a)
                    dst.append(self.index[tuple(lower)])
                    fac.append(m[v])
            self._diff.append((np.array(src, dtype=int), np.array(dst, dtype=int),
                               np.array(fac, dtype=float)))

        self._first = np.array([self.index[self._unit(v)] for v in range(nvars)]) if order >= 1 else None

    def _unit(self, v: int, times: int = 1) -> tuple:
        e = [0] * self.nvars
        e[v] += times
        return tuple(e)

    # construction
    def const(self, value) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        out = np.zeros(value.shape + (self.size,))
        out[..., 0] = value
        return out

    def variables(self, base, offset: int = 0) -> np.ndarray:
        """Vector jet ``base + delta`` where delta_i is variable ``offset + i``."""
        base = np.asarray(base, dtype=float)
        out = self.const(base)
        for i in range(base.shape[0]):
            out[i, self.index[self._unit(offset + i)]] = 1.0
        return out

    # arithmetic
    def _collect(self, prod: np.ndarray) -> np.ndarray:
        return np.add.reduceat(prod, self._starts, axis=-1)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return self._collect(a[..., self._I] * b[..., self._J])

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        return self._collect(np.einsum("...ikp,...kjp->...ijp", A[..., self._I], B[..., self._J]))

    def dot(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self._collect(np.einsum("...kp,...kp->...p", u[..., self._I], v[..., self._J]))

    def matvec(self, A: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self._collect(np.einsum("...ikp,...kp->...ip", A[..., self._I], v[..., self._J]))

    def recip(self, a: np.ndarray) -> np.ndarray:
        a0 = a[..., :1]
        x = -(a - self.const(a[..., 0])) / a0
        out = self.const(np.ones(a.shape[:-1]))
        term = out
        for _ in range(self.order):
            term = self.mul(term, x)
            out = out + term
        return out / a0

    def inv(self, A: np.ndarray) -> np.ndarray:
        A0inv = np.linalg.inv(A[..., 0])
        X = -np.einsum("ij,jkp->ikp", A0inv, A - self.const(A[..., 0]))
        out = self.const(np.eye(A.shape[0]))
        term = out
        for _ in range(self.order):
            term = self.matmul(term, X)
            out = out + term
        return np.einsum("ikp,kj->ijp", out, A0inv)

    def diff(self, a: np.ndarray, v: int) -> np.ndarray:
        """Partial derivative in variable ``v``; exact to one degree less than ``a``."""
        src, dst, fac = self._diff[v]
        out = np.zeros_like(a)
        out[..., dst] = a[..., src] * fac
        return out

    # reading off derivatives at the base point
    def value(self, a: np.ndarray) -> np.ndarray:
        return a[..., 0]

    def gradient(self, a: np.ndarray) -> np.ndarray:
        return a[..., self._first]

    def hessian(self, a: np.ndarray) -> np.ndarray:
        n = self.nvars
        out = np.empty(a.shape[:-1] + (n, n))
        for i in range(n):
            out[..., i, i] = 2.0 * a[..., self.index[self._unit(i, 2)]]
            for j in range(i + 1, n):
                e = [0] * n
                e[i] += 1
                e[j] += 1
                out[..., i, j] = out[..., j, i] = a[..., self.index[tuple(e)]]
        return out


@lru_cache(maxsize=None)
def jet_space(nvars: int, order: int) -> JetSpace:
    return JetSpace(nvars, order)


