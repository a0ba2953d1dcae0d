"""Kropina metrics, their navigation data, and algebraic Einstein certificates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import chart
from .errors import DomainError, InputError
from .lie import InnerProduct, LieAlgebra, bracket
from .riemann import einstein_fit, killing_space

UNIT_TOL = 1e-12
TOL_EINSTEIN_ALGEBRAIC = 1e-8
TOL_EINSTEIN_NUMERIC = 1e-4
TOL_KILLING = 1e-8
TOL_LIE_DERIVATIVE = 1e-6
TOL_AD_ORBIT = 1e-8


@dataclass(frozen=True, eq=False)
class KropinaAlgebraic:
    """F(y) = a(y, y) / a(X, y)."""

    a: InnerProduct
    X: np.ndarray

    def __post_init__(self):
        X = np.array(self.X, dtype=float)
        if X.shape != (self.a.dim,):
            raise InputError(f"X must have length {self.a.dim}")
        if self.a(X, X) <= 0.0:
            raise InputError("a(X, X) must be positive")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)


@dataclass(frozen=True, eq=False)
class NavigationData:
    """Navigation data (h, W) with |W|_h = 1; F = h(y, y) / (2 h(W, y))."""

    h: InnerProduct
    W: np.ndarray
    scale: float = 1.0

    def __post_init__(self):
        W = np.array(self.W, dtype=float)
        if W.shape != (self.h.dim,):
            raise InputError(f"W must have length {self.h.dim}")
        if abs(self.h(W, W) - 1.0) > UNIT_TOL:
            raise InputError(f"W is not a unit vector for h (|W|^2 = {self.h(W, W)!r})")
        if not self.scale > 0:
            raise InputError("scale must be positive")
        W.setflags(write=False)
        object.__setattr__(self, "W", W)

    @classmethod
    def normalized(cls, h: InnerProduct, W) -> "NavigationData":
        W = np.asarray(W, dtype=float)
        norm = h.norm(W)
        if norm == 0.0:
            raise InputError("W must be nonzero")
        return cls(h, W / norm)


def eval_F_algebraic(k: KropinaAlgebraic, y) -> float:
    y = np.asarray(y, dtype=float)
    beta = k.a(k.X, y)
    if beta <= 0.0:
        raise DomainError("a(X, y) <= 0: y is outside the Kropina cone")
    return k.a(y, y) / beta


def eval_F_navigation(n: NavigationData, y) -> float:
    y = np.asarray(y, dtype=float)
    w0 = n.h(n.W, y)
    if w0 <= 0.0:
        raise DomainError("h(W, y) <= 0: y is outside the Kropina cone")
    return n.h(y, y) / (2.0 * w0)


def to_navigation(k: KropinaAlgebraic) -> NavigationData:
    """h = e^{2 rho} a and W = X / 2 with e^{2 rho} b^2 = 4, b = |X|_a."""
    b2 = k.a(k.X, k.X)
    if b2 == 0.0:
        raise InputError("a(X, X) = 0")
    scale = 4.0 / b2
    h = InnerProduct(scale * k.a.g)
    W = k.X / 2.0
    # |W|_h^2 = scale * b2 / 4 is 1 up to rounding; renormalize to hold it at machine precision
    W = W / h.norm(W)
    return NavigationData(h, W, scale)


def from_navigation(n: NavigationData) -> KropinaAlgebraic:
    if abs(n.h(n.W, n.W) - 1.0) > UNIT_TOL:
        raise InputError("W is not h-unit")
    return KropinaAlgebraic(n.h, 2.0 * n.W)


def finsler_condition_generic(phi: Callable[[float], float], dphi: Callable[[float], float],
                              ddphi: Callable[[float], float], b: float, s: float) -> float:
    """phi(s) - s phi'(s) + (b^2 - s^2) phi''(s) for an arbitrary (alpha, beta) profile."""
    return phi(s) - s * dphi(s) + (b * b - s * s) * ddphi(s)


def finsler_condition(b: float, s: float) -> float:
    """Positivity expression for the Kropina profile phi(s) = 1/s, which equals 2 b^2 / s^3."""
    if s <= 0.0:
        raise DomainError("s must be positive on the Kropina cone")
    if b <= 0.0:
        raise DomainError("b must be positive")
    return 2.0 * b * b / s ** 3


def kropina_condition_generic(b: float, s: float) -> float:
    if s <= 0.0:
        raise DomainError("s must be positive on the Kropina cone")
    return finsler_condition_generic(lambda t: 1.0 / t, lambda t: -1.0 / t ** 2, lambda t: 2.0 / t ** 3, b, s)


@dataclass
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float


@dataclass
class Certificate:
    verdict: str
    checks: list[Check]
    sigma: float | None = None
    ricci_constant: bool = False
    details: dict = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]


def _span_residual(W: np.ndarray, basis: list[np.ndarray], g: np.ndarray) -> float:
    """Relative g-distance of W from span(basis); basis is g-orthonormal."""
    proj = sum(((v @ g @ W) * v for v in basis), np.zeros_like(W))
    d = W - proj
    return float(np.sqrt(max(d @ g @ d, 0.0)) / np.sqrt(W @ g @ W))


def einstein_certificate(A: LieAlgebra, n: NavigationData, w_kind: str,
                         cfg: chart.ChartConfig | None = None,
                         tol_einstein: float = TOL_EINSTEIN_ALGEBRAIC) -> Certificate:
    """Einstein test for the Kropina metric of (h, W): h Einstein, W unit Killing.

    Right-invariant W is checked through the chart (Lie derivative of the metric
    and the norm along the Ad-orbit); left-invariant W through the algebraic
    Killing space; central W through commutation with every basis vector.
    """
    kind = chart.normalize_kind(w_kind)
    cfg = cfg or chart.ChartConfig()
    W = np.asarray(n.W, dtype=float)
    if not np.any(W):
        raise InputError("W must be nonzero")
    fit = einstein_fit(A, n.h)
    checks = [Check("einstein_metric", fit.residual < tol_einstein, fit.residual, tol_einstein)]
    details: dict = {"einstein_residual": fit.residual, "w_kind": kind}

    if kind == "left":
        K = killing_space(A, n.h)
        resid = _span_residual(W, K, n.h.g) if K else 1.0
        details["killing_dim"] = len(K)
        checks.append(Check("killing_left_invariant", resid < TOL_KILLING, resid, TOL_KILLING))
    elif kind == "central":
        comm = max(float(np.abs(bracket(A, W, A.basis_vector(i))).max()) for i in range(A.dim))
        checks.append(Check("killing_central", comm < TOL_KILLING, comm, TOL_KILLING))
    else:
        lie = chart.max_lie_derivative(A, n.h, W, "right", cfg)
        checks.append(Check("killing_right_invariant", lie < TOL_LIE_DERIVATIVE, lie, TOL_LIE_DERIVATIVE))

    unit = abs(n.h(W, W) - 1.0)
    checks.append(Check("unit_norm", unit <= UNIT_TOL, unit, UNIT_TOL))
    if kind != "left":
        orbit = chart.ad_orbit_norm(A, n.h, W, cfg)
        checks.append(Check("ad_orbit_norm", orbit < TOL_AD_ORBIT, orbit, TOL_AD_ORBIT))

    ok = all(c.passed for c in checks)
    return Certificate(
        verdict="einstein_kropina" if ok else "falsified",
        checks=checks,
        sigma=fit.sigma,
        ricci_constant=ok and A.dim >= 3,
        details=details,
    )
