"""Exponential chart around the identity and numerical Finsler curvature.

Chart points are canonical coordinates of the first kind, ``x -> exp(x)``.  The
left-trivialized differential of ``exp`` is ``Phi(x) = sum (-ad x)^k/(k+1)!``
and the right-trivialized one is ``Psi(x) = sum (ad x)^k/(k+1)!``; both are
truncated at ``ChartConfig.series_order``.  Every derivative used by the Finsler
pipeline is obtained from jets (see :mod:`.jets`); finite differences appear
only in :func:`derivative_crosscheck`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .errors import ChartRadiusError, DomainError, InputError, SampleRejected
from .jets import JetSpace, jet_space
from .lie import InnerProduct, LieAlgebra, ad_matrix

W_KINDS = ("left", "right", "central")
MAX_FRAME_COND = 1e6
MAX_FUNDAMENTAL_COND = 1e10


@dataclass(frozen=True)
class ChartConfig:
    series_order: int = 10
    radius: float = 0.3
    fd_step: float = 1e-4
    sample_count: int = 20
    rng_seed: int = 0

    def __post_init__(self):
        if self.series_order < 4:
            raise InputError("series_order must be at least 4")
        if self.radius <= 0 or self.fd_step <= 0:
            raise InputError("radius and fd_step must be positive")
        if self.sample_count < 0:
            raise InputError("sample_count must be non-negative")


@dataclass
class FinslerSample:
    x: np.ndarray
    y: np.ndarray
    F: float
    g_y: np.ndarray
    G: np.ndarray
    ric: float
    derivatives: dict = field(default_factory=dict, repr=False)


def normalize_kind(w_kind: str) -> str:
    kind = str(w_kind).lower().replace("-invariant", "")
    if kind not in W_KINDS:
        raise InputError(f"w_kind must be one of {W_KINDS}, got {w_kind!r}")
    return kind


# ---------------------------------------------------------------- float path

def _series(A: LieAlgebra, x, order: int, sign: float) -> np.ndarray:
    ad = sign * ad_matrix(A, x)
    S = np.eye(A.dim) / factorial(order + 1)
    for k in range(order - 1, -1, -1):
        S = np.eye(A.dim) / factorial(k + 1) + ad @ S
    return S


def phi_series(A: LieAlgebra, x, order: int) -> np.ndarray:
    if order < 1:
        raise InputError("order must be at least 1")
    return _series(A, x, order, -1.0)


def psi_series(A: LieAlgebra, x, order: int) -> np.ndarray:
    if order < 1:
        raise InputError("order must be at least 1")
    return _series(A, x, order, 1.0)


def _checked_inverse(M: np.ndarray) -> np.ndarray:
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > MAX_FRAME_COND:
        raise ChartRadiusError(f"exponential chart is singular here (condition number {cond:.3e})")
    return np.linalg.inv(M)


def left_frame(A: LieAlgebra, x, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    return _checked_inverse(phi_series(A, x, cfg.series_order))


def right_frame(A: LieAlgebra, x, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    return _checked_inverse(psi_series(A, x, cfg.series_order))


def metric_chart(A: LieAlgebra, g: InnerProduct, x, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    Phi = phi_series(A, x, cfg.series_order)
    _checked_inverse(Phi)
    return Phi.T @ g.g @ Phi


def field_chart(A: LieAlgebra, W, w_kind: str, x, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    """Chart components at x of the invariant field whose value at the identity is W."""
    kind = normalize_kind(w_kind)
    frame = right_frame(A, x, cfg) if kind == "right" else left_frame(A, x, cfg)
    return frame @ np.asarray(W, dtype=float)


def expm_series(A: LieAlgebra, x, order: int) -> np.ndarray:
    ad = ad_matrix(A, x)
    S = np.eye(A.dim) / factorial(order)
    for k in range(order - 1, -1, -1):
        S = np.eye(A.dim) / factorial(k) + ad @ S
    return S


def kropina_F(A: LieAlgebra, nav, w_kind: str, x, y, cfg: ChartConfig = ChartConfig()) -> float:
    """F(x, y) = |y|^2 / (2 <W(x), y>) in the chart metric; plain floating point."""
    G = metric_chart(A, nav.h, x, cfg)
    V = field_chart(A, nav.W, w_kind, x, cfg)
    y = np.asarray(y, dtype=float)
    b = float(V @ G @ y)
    if b <= 0.0:
        raise DomainError("y lies outside the Kropina cone at x")
    return float(y @ G @ y) / (2.0 * b)


# ----------------------------------------------------------------- jet path

def _series_jet(space: JetSpace, A: LieAlgebra, xj: np.ndarray, order: int, sign: float) -> np.ndarray:
    ad = sign * np.einsum("ijk,ip->kjp", A.c, xj)
    eye = space.const(np.eye(A.dim))
    S = eye / factorial(order + 1)
    for k in range(order - 1, -1, -1):
        S = eye / factorial(k + 1) + space.matmul(ad, S)
    return S


def _metric_and_field_jets(space: JetSpace, A: LieAlgebra, g: InnerProduct, W, w_kind: str | None,
                           x, cfg: ChartConfig):
    """Jets (in the first dim variables) of the chart metric and, optionally, of the W field."""
    xj = space.variables(x, 0)
    Phi = _series_jet(space, A, xj, cfg.series_order, -1.0)
    _checked_inverse(Phi[..., 0])
    G = space.matmul(Phi.transpose(1, 0, 2), np.einsum("ab,bcp->acp", g.g, Phi))
    if w_kind is None:
        return G, None
    kind = normalize_kind(w_kind)
    if kind == "right":
        Psi = _series_jet(space, A, xj, cfg.series_order, 1.0)
        _checked_inverse(Psi[..., 0])
        frame = space.inv(Psi)
    else:
        frame = space.inv(Phi)
    V = np.einsum("ijp,j->ip", frame, np.asarray(W, dtype=float))
    return G, V


def _kropina_f2_jet(space: JetSpace, A: LieAlgebra, nav, w_kind: str, x, y, cfg: ChartConfig):
    n = A.dim
    G, V = _metric_and_field_jets(space, A, nav.h, nav.W, w_kind, x, cfg)
    yj = space.variables(y, n)
    Gy = space.matvec(G, yj)
    q = space.dot(yj, Gy)
    b = space.dot(V, Gy)
    if b[0] <= 0.0:
        raise DomainError("y lies outside the Kropina cone at x")
    return space.mul(space.mul(q, q), space.recip(4.0 * space.mul(b, b))), yj


def _riemannian_f2_jet(space: JetSpace, A: LieAlgebra, g: InnerProduct, x, y, cfg: ChartConfig):
    G, _ = _metric_and_field_jets(space, A, g, None, None, x, cfg)
    yj = space.variables(y, A.dim)
    return space.dot(yj, space.matvec(G, yj)), yj


def _spray_jet(space: JetSpace, F2: np.ndarray, yj: np.ndarray, n: int):
    """Fundamental tensor and spray coefficients as jets (exact to ``order - 2``)."""
    dF2y = np.stack([space.diff(F2, n + i) for i in range(n)])
    gy = 0.5 * np.stack([np.stack([space.diff(dF2y[i], n + j) for j in range(n)]) for i in range(n)])
    ginv = space.inv(gy)
    term = np.stack([
        sum(space.mul(space.diff(dF2y[l], k), yj[k]) for k in range(n)) - space.diff(F2, l)
        for l in range(n)
    ])
    return gy, 0.25 * space.matvec(ginv, term)


def _finsler_ricci(space: JetSpace, F2: np.ndarray, yj: np.ndarray, n: int, x, y) -> FinslerSample:
    gy_jet, Gjet = _spray_jet(space, F2, yj, n)
    F2v = float(space.value(F2))
    gy = space.value(gy_jet)
    gy = 0.5 * (gy + gy.T)
    eig = np.linalg.eigvalsh(gy)
    if eig.min() <= 0.0 or eig.max() / eig.min() > MAX_FUNDAMENTAL_COND:
        raise SampleRejected(f"fundamental tensor ill-conditioned (eigenvalues {eig.min():.3e}..{eig.max():.3e})")
    G0 = space.value(Gjet)
    grad = space.gradient(Gjet)
    hess = space.hessian(Gjet)
    dGx, dGy = grad[:, :n], grad[:, n:]
    ddGxy = hess[:, :n, n:]
    ddGyy = hess[:, n:, n:]
    y = np.asarray(y, dtype=float)
    R = (2.0 * dGx - np.einsum("j,ijk->ik", y, ddGxy) + 2.0 * np.einsum("j,ijk->ik", G0, ddGyy)
         - dGy @ dGy)
    grad_f2 = space.gradient(F2)
    hess_f2 = space.hessian(F2)
    derivs = {
        "dF2_dx": grad_f2[:n], "dF2_dy": grad_f2[n:], "d2F2_dxdy": hess_f2[:n, n:],
        "dG_dx": dGx, "dG_dy": dGy, "d2G_dxdy": ddGxy, "d2G_dydy": ddGyy, "R": R,
    }
    return FinslerSample(np.asarray(x, dtype=float), y, float(np.sqrt(F2v)), gy, G0,
                         float(np.trace(R)), derivs)


def finsler_data(A: LieAlgebra, nav, w_kind: str, x, y, cfg: ChartConfig = ChartConfig()) -> FinslerSample:
    """Fundamental tensor, spray and Finsler Ricci of the Kropina metric at (x, y)."""
    space = jet_space(2 * A.dim, 4)
    F2, yj = _kropina_f2_jet(space, A, nav, w_kind, x, y, cfg)
    return _finsler_ricci(space, F2, yj, A.dim, x, y)


def finsler_data_riemannian(A: LieAlgebra, g: InnerProduct, x, y, cfg: ChartConfig = ChartConfig()) -> FinslerSample:
    """Same pipeline applied to F^2 = g(y, y); its Ricci is Ric_ij y^i y^j."""
    space = jet_space(2 * A.dim, 4)
    F2, yj = _riemannian_f2_jet(space, A, g, x, y, cfg)
    return _finsler_ricci(space, F2, yj, A.dim, x, y)


def spray_value(A: LieAlgebra, nav, w_kind: str, x, y, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    space = jet_space(2 * A.dim, 2)
    F2, yj = _kropina_f2_jet(space, A, nav, w_kind, x, y, cfg)
    return space.value(_spray_jet(space, F2, yj, A.dim)[1])


def riemann_ricci_chart(A: LieAlgebra, g: InnerProduct, x, cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    """Ricci tensor (chart components) of the chart metric, from Christoffel symbols."""
    n = A.dim
    space = jet_space(n, 2)
    G, _ = _metric_and_field_jets(space, A, g, None, None, x, cfg)
    dG = np.stack([space.diff(G, k) for k in range(n)])  # dG[k, i, j] = d_k G_ij
    ginv = space.inv(G)
    # lowered Gamma_{ijl} = (d_i G_jl + d_j G_il - d_l G_ij) / 2
    low = 0.5 * (dG + dG.transpose(1, 0, 2, 3) - dG.transpose(1, 2, 0, 3))
    gam = np.stack([np.stack([space.matvec(ginv, low[i, j]) for j in range(n)]) for i in range(n)])
    # gam[i, j, l] = Gamma^l_ij, exact to degree 1
    Gv = space.value(gam)
    dGam = space.gradient(gam)  # dGam[i, j, l, k] = d_k Gamma^l_ij
    # R^l_{ijk} = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    d_term = np.einsum("jkli->lijk", dGam)
    q_term = np.einsum("iml,jkm->lijk", Gv, Gv)
    Rm = d_term - d_term.transpose(0, 2, 1, 3) + q_term - q_term.transpose(0, 2, 1, 3)
    ric = np.einsum("iijk->jk", Rm)
    return 0.5 * (ric + ric.T)


def lie_derivative_metric(A: LieAlgebra, g: InnerProduct, W, w_kind: str, x,
                          cfg: ChartConfig = ChartConfig()) -> np.ndarray:
    """(L_V h)_ij at chart point x, V the invariant extension of W."""
    n = A.dim
    space = jet_space(n, 1)
    G, V = _metric_and_field_jets(space, A, g, W, w_kind, x, cfg)
    Gv = space.value(G)
    dG = space.gradient(G)  # dG[i, j, k] = d_k G_ij
    Vv = space.value(V)
    dV = space.gradient(V)  # dV[k, i] = d_i V^k
    transport = Gv @ dV  # G_kj d_i V^k, indexed [j, i]
    return np.einsum("k,ijk->ij", Vv, dG) + transport.T + transport


# ------------------------------------------------------------------ sampling

def sample_chart_points(dim: int, cfg: ChartConfig, rng: np.random.Generator, count: int) -> list[np.ndarray]:
    pts = []
    for _ in range(count):
        d = rng.standard_normal(dim)
        d /= np.linalg.norm(d)
        pts.append(d * cfg.radius * rng.uniform() ** (1.0 / dim))
    return pts


def _cone_vector(rng: np.random.Generator, Gx: np.ndarray, Vx: np.ndarray) -> np.ndarray:
    """Random y with <V, y>_G >= 0.1 |V|_G |y|_G."""
    nv = np.sqrt(Vx @ Gx @ Vx)
    while True:
        y = rng.standard_normal(len(Vx))
        c = (Vx @ Gx @ y) / (nv * np.sqrt(y @ Gx @ y))
        if c < 0:
            y, c = -y, -c
        if c >= 0.1:
            return y


def sample_pairs(A: LieAlgebra, nav, w_kind: str, cfg: ChartConfig,
                 count: int | None = None) -> list[tuple[np.ndarray, np.ndarray]]:
    """Seeded (x, y) samples with |x| <= radius and y well inside the Kropina cone."""
    count = cfg.sample_count if count is None else count
    rng = np.random.default_rng(cfg.rng_seed)
    pairs = []
    for _ in range(count):
        x = sample_chart_points(A.dim, cfg, rng, 1)[0]
        Gx = metric_chart(A, nav.h, x, cfg)
        Vx = field_chart(A, nav.W, w_kind, x, cfg)
        pairs.append((x, _cone_vector(rng, Gx, Vx)))
    return pairs


@dataclass
class ResidualReport:
    sigma: float
    samples: list[FinslerSample]
    residuals: list[float]
    rejected: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else float("nan")

    @property
    def ratios(self) -> list[float]:
        return [s.ric / s.F ** 2 for s in self.samples]


def einstein_residual(A: LieAlgebra, nav, w_kind: str, sigma: float,
                      cfg: ChartConfig = ChartConfig()) -> ResidualReport:
    """|Ric_F - sigma F^2| / F^2 over the seeded sample set."""
    samples, residuals, rejected = [], [], 0
    for x, y in sample_pairs(A, nav, w_kind, cfg):
        try:
            s = finsler_data(A, nav, w_kind, x, y, cfg)
        except SampleRejected:
            rejected += 1
            continue
        samples.append(s)
        residuals.append(abs(s.ric - sigma * s.F ** 2) / s.F ** 2)
    return ResidualReport(float(sigma), samples, residuals, rejected)


def max_lie_derivative(A: LieAlgebra, g: InnerProduct, W, w_kind: str, cfg: ChartConfig = ChartConfig()) -> float:
    rng = np.random.default_rng(cfg.rng_seed)
    pts = [np.zeros(A.dim)] + sample_chart_points(A.dim, cfg, rng, max(cfg.sample_count, 1))
    return max(float(np.abs(lie_derivative_metric(A, g, W, w_kind, x, cfg)).max()) for x in pts)


def left_invariance_check(A: LieAlgebra, nav, w_kind: str, cfg: ChartConfig = ChartConfig()) -> float:
    """max |F(x, P(x)u) - F(0, u)| / F(0, u) over seeded samples."""
    rng = np.random.default_rng(cfg.rng_seed)
    zero = np.zeros(A.dim)
    W = np.asarray(nav.W, dtype=float)
    worst = 0.0
    for x in sample_chart_points(A.dim, cfg, rng, max(cfg.sample_count, 1)):
        u = _cone_vector(rng, nav.h.g, W)
        F0 = kropina_F(A, nav, "left", zero, u, cfg)
        y = left_frame(A, x, cfg) @ u
        try:
            Fx = kropina_F(A, nav, w_kind, x, y, cfg)
        except DomainError:
            continue  # the translated vector left the cone: reported by the other samples
        worst = max(worst, abs(Fx - F0) / F0)
    return worst


def ad_orbit_norm(A: LieAlgebra, g: InnerProduct, W, cfg: ChartConfig = ChartConfig()) -> float:
    """max | |exp(ad x) W|_g - 1 | over seeded chart points."""
    rng = np.random.default_rng(cfg.rng_seed)
    W = np.asarray(W, dtype=float)
    pts = [np.zeros(A.dim)] + sample_chart_points(A.dim, cfg, rng, max(cfg.sample_count, 1))
    return max(abs(g.norm(expm_series(A, x, cfg.series_order) @ W) - 1.0) for x in pts)


# ------------------------------------------------------- finite differences

def _central(f, h: float):
    """Richardson-extrapolated central difference operator for scalar step functions."""
    def d(step):
        return (f(step) - f(-step)) / (2 * step)
    return (4 * d(h / 2) - d(h)) / 3


def fd_gradient(f, z, h: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    cols = []
    for i in range(len(z)):
        e = np.zeros_like(z)
        e[i] = 1.0
        cols.append(_central(lambda t: np.asarray(f(z + t * e)), h))
    return np.stack(cols, axis=-1)


def fd_hessian(f, z, h: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    n = len(z)

    def second(i, j, step):
        ei = np.zeros(n)
        ej = np.zeros(n)
        ei[i] = step
        ej[j] = step
        if i == j:
            return (np.asarray(f(z + ei)) - 2 * np.asarray(f(z)) + np.asarray(f(z - ei))) / step ** 2
        return (np.asarray(f(z + ei + ej)) - np.asarray(f(z + ei - ej))
                - np.asarray(f(z - ei + ej)) + np.asarray(f(z - ei - ej))) / (4 * step ** 2)

    rows = []
    for i in range(n):
        rows.append(np.stack([(4 * second(i, j, h / 2) - second(i, j, h)) / 3 for j in range(n)], axis=-1))
    return np.stack(rows, axis=-2)


def derivative_crosscheck(A: LieAlgebra, nav, w_kind: str, x, y, cfg: ChartConfig = ChartConfig(),
                          sample: FinslerSample | None = None) -> dict[str, float]:
    """Scaled max deviation between jet derivatives and finite differences."""
    n = A.dim
    s = sample if sample is not None else finsler_data(A, nav, w_kind, x, y, cfg)
    z0 = np.concatenate([np.asarray(x, float), np.asarray(y, float)])
    h = cfg.fd_step

    def f2(z):
        return kropina_F(A, nav, w_kind, z[:n], z[n:], cfg) ** 2

    def spray(z):
        return spray_value(A, nav, w_kind, z[:n], z[n:], cfg)

    grad_f2 = fd_gradient(f2, z0, h)
    hess_f2 = fd_hessian(f2, z0, h)
    grad_G = fd_gradient(spray, z0, h)
    hess_G = fd_hessian(spray, z0, h)
    pairs = {
        "dF2_dx": (s.derivatives["dF2_dx"], grad_f2[:n]),
        "dF2_dy": (s.derivatives["dF2_dy"], grad_f2[n:]),
        "g_y": (s.g_y, 0.5 * hess_f2[n:, n:]),
        "d2F2_dxdy": (s.derivatives["d2F2_dxdy"], hess_f2[:n, n:]),
        "G": (s.G, spray(z0)),
        "dG_dx": (s.derivatives["dG_dx"], grad_G[:, :n]),
        "dG_dy": (s.derivatives["dG_dy"], grad_G[:, n:]),
        "d2G_dxdy": (s.derivatives["d2G_dxdy"], hess_G[:, :n, n:]),
        "d2G_dydy": (s.derivatives["d2G_dydy"], hess_G[:, n:, n:]),
    }
    return {k: float(np.abs(a - b).max() / max(1.0, np.abs(a).max())) for k, (a, b) in pairs.items()}
