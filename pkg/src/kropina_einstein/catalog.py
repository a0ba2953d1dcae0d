"""Built-in, parameterized instances: the worked examples and negative controls.

Each expected value carries a tag saying where the number comes from:
``reference`` (a published value), ``derived`` (an independent computation)
or ``trivial`` (follows from the definitions).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import InputError
from .homog import ReductiveSpace, build_reductive
from .lie import InnerProduct, LieAlgebra, killing_form


@dataclass(frozen=True)
class Expected:
    value: object
    tag: str


@dataclass(eq=False)
class CatalogEntry:
    name: str
    params: dict[str, float]
    algebra: LieAlgebra
    metric: InnerProduct
    distinguished_vectors: dict[str, np.ndarray] = field(default_factory=dict)
    expected: dict[str, Expected] = field(default_factory=dict)
    space: ReductiveSpace | None = None
    w_kind: str = "left"

    def vector(self, name: str) -> np.ndarray:
        try:
            return self.distinguished_vectors[name]
        except KeyError:
            raise InputError(
                f"{self.name} has no vector {name!r}; available: {sorted(self.distinguished_vectors)}"
            ) from None

    def to_instance(self) -> dict:
        """Serialize to the CLI instance-file format."""
        A = self.algebra
        brackets = []
        for i in range(A.dim):
            for j in range(i + 1, A.dim):
                if np.any(A.c[i, j]):
                    brackets.append({"i": i, "j": j, "coeffs": A.c[i, j].tolist()})
        doc: dict = {
            "algebra": {"dim": A.dim, "basis": list(A.basis_names), "brackets": brackets},
            "metric": self.metric.g.tolist(),
        }
        if self.space is not None:
            doc["subalgebra"] = [h.tolist() for h in self.space.h_basis]
            doc["ambient_form"] = self.metric.g.tolist()
            doc["metric_m"] = self.space.metric_m.g.tolist()
        if self.distinguished_vectors:
            key = "W_thm3" if "W_thm3" in self.distinguished_vectors else sorted(self.distinguished_vectors)[0]
            doc["vector"] = self.distinguished_vectors[key].tolist()
            doc["w_kind"] = self.w_kind
        return doc


# --------------------------------------------------------------- algebras

SU2_BRACKETS = {(0, 1): [0, 0, 1], (0, 2): [0, -1, 0], (1, 2): [1, 0, 0]}


def su2_algebra() -> LieAlgebra:
    return LieAlgebra.from_brackets(3, SU2_BRACKETS, ("x", "y", "z"))


def so_pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def so_algebra(n: int) -> LieAlgebra:
    """so(n) on the basis E_ij (i < j), lexicographic.

    [E_ij, E_kl] = d_jk E_il - d_ik E_jl - d_jl E_ik + d_il E_jk, with E_ba = -E_ab.
    """
    pairs = so_pairs(n)
    index = {p: a for a, p in enumerate(pairs)}
    dim = len(pairs)
    c = np.zeros((dim, dim, dim))

    def add(p, q, a, b, coef):
        if a == b:
            return
        if a < b:
            c[p, q, index[(a, b)]] += coef
        else:
            c[p, q, index[(b, a)]] -= coef

    for p, (i, j) in enumerate(pairs):
        for q, (k, l) in enumerate(pairs):
            if j == k:
                add(p, q, i, l, 1.0)
            if i == k:
                add(p, q, j, l, -1.0)
            if j == l:
                add(p, q, i, k, -1.0)
            if i == l:
                add(p, q, j, k, 1.0)
    names = tuple(f"E{i + 1}{j + 1}" if n < 10 else f"E{i + 1}_{j + 1}" for i, j in pairs)
    return LieAlgebra(c, names)


def u_basis(n: int) -> tuple[list[np.ndarray], list[str]]:
    """Real basis of u(n): i E_kk, then E_kl - E_lk and i(E_kl + E_lk) for k < l."""
    mats, names = [], []
    for k in range(n):
        m = np.zeros((n, n), dtype=complex)
        m[k, k] = 1j
        mats.append(m)
        names.append(f"iE{k + 1}{k + 1}")
    for k in range(n):
        for l in range(k + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[k, l], m[l, k] = 1, -1
            mats.append(m)
            names.append(f"A{k + 1}{l + 1}")
            m = np.zeros((n, n), dtype=complex)
            m[k, l] = m[l, k] = 1j
            mats.append(m)
            names.append(f"S{k + 1}{l + 1}")
    return mats, names


def u_coordinates(X: np.ndarray) -> np.ndarray:
    """Coordinates of a skew-Hermitian matrix in :func:`u_basis` order."""
    n = X.shape[0]
    out = [X[k, k].imag for k in range(n)]
    for k in range(n):
        for l in range(k + 1, n):
            out += [X[k, l].real, X[k, l].imag]
    return np.array(out)


def u_algebra(n: int) -> LieAlgebra:
    mats, names = u_basis(n)
    dim = len(mats)
    c = np.zeros((dim, dim, dim))
    for a in range(dim):
        for b in range(a + 1, dim):
            comm = mats[a] @ mats[b] - mats[b] @ mats[a]
            c[a, b] = u_coordinates(comm)
            c[b, a] = -c[a, b]
    return LieAlgebra(c, tuple(names))


# ---------------------------------------------------------------- entries

def _r3_abelian(p):
    A = LieAlgebra(np.zeros((3, 3, 3)), ("x", "y", "z"))
    return CatalogEntry(
        "r3_abelian", p, A, InnerProduct(np.eye(3)),
        {"W_thm3": np.array([1.0, 0.0, 0.0]), "x": np.array([1.0, 0.0, 0.0])},
        {
            "einstein": Expected(True, "reference: abelian case"),
            "killing_dim": Expected(3, "reference: every unit W = ax+by+cz"),
            "sigma": Expected(0.0, "derived: flat metric"),
            "center_dim": Expected(3, "trivial"),
        },
    )


def _e0tilde2(p):
    nu = p["nu"]
    A = LieAlgebra.from_brackets(3, {(0, 2): [0, 1, 0], (1, 2): [-1, 0, 0]}, ("x", "y", "z"))
    return CatalogEntry(
        "e0tilde2", p, A, InnerProduct(np.diag([1.0, 1.0, nu])),
        {"W_thm3": np.array([0.0, 0.0, 1.0 / np.sqrt(nu)]), "x": np.array([1.0, 0.0, 0.0]),
         "z": np.array([0.0, 0.0, 1.0])},
        {
            "einstein": Expected(True, "reference: flat E~(2) case"),
            "killing_dim": Expected(1, "reference: W = z/sqrt(nu)"),
            "sigma": Expected(0.0, "derived: flat metric, chart Ricci oracle"),
            "center_dim": Expected(0, "derived"),
        },
    )


def _su2_round(p):
    lam = p["lam"]
    return CatalogEntry(
        "su2_round", p, su2_algebra(), InnerProduct(lam * np.eye(3)),
        {"W_thm3": np.array([1.0, 0.0, 0.0]) / np.sqrt(lam), "x": np.array([1.0, 0.0, 0.0]),
         "y": np.array([0.0, 1.0, 0.0]), "z": np.array([0.0, 0.0, 1.0])},
        {
            "einstein": Expected(True, "reference: round su(2) case"),
            "killing_dim": Expected(3, "reference: every unit W = ax+by+cz"),
            "sigma": Expected(1.0 / (2.0 * lam), "derived: bi-invariant metric, chart Ricci oracle"),
            "center_dim": Expected(0, "derived"),
        },
    )


def _su2_diag(p):
    l1, l2, l3 = p["l1"], p["l2"], p["l3"]
    expected = {}
    if len({l1, l2, l3}) == 3:
        expected = {
            "einstein": Expected(False, "derived: einstein_fit residual"),
            "killing_dim": Expected(0, "derived: kernel computation"),
        }
    return CatalogEntry(
        "su2_diag", p, su2_algebra(), InnerProduct(np.diag([l1, l2, l3])),
        {"x": np.array([1.0, 0.0, 0.0]) / np.sqrt(l1), "y": np.array([0.0, 1.0, 0.0]),
         "z": np.array([0.0, 0.0, 1.0])},
        expected,
    )


def _so_n(p):
    n = int(p["n"])
    A = so_algebra(n)
    g = InnerProduct(-killing_form(A).m)
    W = np.zeros(A.dim)
    W[0] = 1.0 / np.sqrt(2.0 * (n - 2))
    return CatalogEntry(
        "so_n", p, A, g, {"W_thm3": W, "E12": np.eye(A.dim)[0]},
        {
            "einstein": Expected(True, "reference: -B is Einstein"),
            "sigma": Expected(0.25, "reference: sigma = 1/4 for -B"),
            "killing_dim": Expected(A.dim, "derived: bi-invariant metric"),
            "center_dim": Expected(0, "derived: semisimple"),
        },
        w_kind="right",
    )


def _heisenberg3(p):
    A = LieAlgebra.from_brackets(3, {(0, 1): [0, 0, 1]}, ("x", "y", "z"))
    return CatalogEntry(
        "heisenberg3", p, A, InnerProduct(np.eye(3)),
        {"z": np.array([0.0, 0.0, 1.0]), "x": np.array([1.0, 0.0, 0.0])},
        {
            "einstein": Expected(False, "derived: Ric = diag(-1/2, -1/2, 1/2)"),
            "killing_dim": Expected(1, "derived: only the central direction"),
            "center_dim": Expected(1, "derived"),
        },
    )


def _su2_plus_r1(p):
    c = np.zeros((4, 4, 4))
    c[:3, :3, :3] = su2_algebra().c
    A = LieAlgebra(c, ("x", "y", "z", "t"))
    return CatalogEntry(
        "su2_plus_r1", p, A, InnerProduct(np.eye(4)),
        {"central": np.array([0.0, 0.0, 0.0, 1.0])},
        {
            "center_dim": Expected(1, "derived: block-diagonal kernel"),
            "einstein": Expected(False, "derived: Ric = diag(1/2, 1/2, 1/2, 0)"),
        },
        w_kind="central",
    )


def _sphere_so(p):
    n = int(p["n"])
    A = so_algebra(n + 1)
    Q = InnerProduct(-killing_form(A).m)
    pairs = so_pairs(n + 1)
    H = [np.eye(A.dim)[a] for a, (i, j) in enumerate(pairs) if j < n]
    S = build_reductive(A, H, Q)
    return CatalogEntry(
        "sphere_so", p, A, Q, {}, {
            "m0_dim": Expected(0, "derived: SO(n) acts irreducibly on m"),
            "einstein": Expected(True, "reference: round S^n = SO(n+1)/SO(n)"),
            "sigma": Expected(0.5, "derived: constant curvature 1/(2(n-1)) under -B"),
        },
        space=S,
    )


def round_sphere_metric(S: ReductiveSpace, n: int) -> InnerProduct:
    """Round metric on S^{2n+1} in m-coordinates: Re <X e_1, Y e_1> for X, Y in u(n+1)."""
    mats, _ = u_basis(n + 1)
    cols = []
    for v in S.m_basis:
        X = sum(coef * m for coef, m in zip(v, mats))
        cols.append(X[:, 0])
    cols = np.array(cols)
    return InnerProduct.symmetrized((cols.conj() @ cols.T).real)


def _sphere_u(p):
    n = int(p["n"])
    A = u_algebra(n + 1)
    mats, _ = u_basis(n + 1)
    Q = InnerProduct.symmetrized(
        np.array([[-np.trace(a @ b).real for b in mats] for a in mats])
    )
    # U(n) acting on coordinates 2..n+1, fixing e_1
    H = []
    for a, m in enumerate(mats):
        if not np.any(m[0, :]) and not np.any(m[:, 0]):
            H.append(np.eye(A.dim)[a])
    S0 = build_reductive(A, H, Q)
    S = build_reductive(A, H, Q, metric_m=round_sphere_metric(S0, n))
    hopf_ambient = np.eye(A.dim)[0]
    hopf = np.linalg.lstsq(S.M, hopf_ambient, rcond=None)[0]
    hopf = hopf / S.metric_m.norm(hopf)
    other = np.zeros(S.dim_m)
    other[1] = 1.0
    return CatalogEntry(
        "sphere_u", p, A, Q,
        {"hopf": hopf, "horizontal": other / S.metric_m.norm(other)},
        {
            "m0_dim": Expected(1, "derived: the Hopf direction"),
            "einstein": Expected(True, "reference: round S^(2n+1) = U(n+1)/U(n)"),
            "sigma": Expected(2.0 * n, "derived: unit round sphere, Ric = 2n g"),
            "verdict": Expected("homogeneous_einstein_kropina", "reference: invariant Hopf field on the round sphere"),
        },
        space=S,
    )


def _positive(x):
    return x > 0


@dataclass(frozen=True)
class _Spec:
    build: Callable[[dict], CatalogEntry]
    params: tuple[tuple[str, float, Callable[[float], bool], str], ...]


_REGISTRY: dict[str, _Spec] = {
    "r3_abelian": _Spec(_r3_abelian, ()),
    "e0tilde2": _Spec(_e0tilde2, (("nu", 1.0, _positive, "nu > 0"),)),
    "su2_round": _Spec(_su2_round, (("lam", 1.0, _positive, "lam > 0"),)),
    "su2_diag": _Spec(_su2_diag, (("l1", 1.0, _positive, "l1 > 0"), ("l2", 2.0, _positive, "l2 > 0"),
                                  ("l3", 3.0, _positive, "l3 > 0"))),
    "so_n": _Spec(_so_n, (("n", 3, lambda v: v >= 3 and v == int(v), "integer n >= 3"),)),
    "heisenberg3": _Spec(_heisenberg3, ()),
    "sphere_so": _Spec(_sphere_so, (("n", 2, lambda v: v >= 2 and v == int(v), "integer n >= 2"),)),
    "sphere_u": _Spec(_sphere_u, (("n", 1, lambda v: v >= 1 and v == int(v), "integer n >= 1"),)),
    "su2_plus_r1": _Spec(_su2_plus_r1, ()),
}

NAMES = tuple(_REGISTRY)


def describe() -> str:
    lines = []
    for name, spec in _REGISTRY.items():
        ranges = ", ".join(f"{p}: {rng}" for p, _, _, rng in spec.params) or "no parameters"
        lines.append(f"{name} ({ranges})")
    return "; ".join(lines)


def resolve_params(name: str, params: Mapping[str, float] | Sequence[float] | None = None) -> dict[str, float]:
    if name not in _REGISTRY:
        raise InputError(f"unknown catalog entry {name!r}; valid entries: {describe()}")
    spec = _REGISTRY[name]
    names = [p[0] for p in spec.params]
    values = {p[0]: p[1] for p in spec.params}
    if params is None:
        params = {}
    if not isinstance(params, Mapping):
        params = list(params)
        if len(params) > len(names):
            raise InputError(f"{name} takes at most {len(names)} parameters ({', '.join(names) or 'none'})")
        params = dict(zip(names, params))
    for key, val in params.items():
        if key not in values:
            raise InputError(f"{name} has no parameter {key!r}; valid: {describe()}")
        values[key] = float(val)
    for pname, _, ok, rng in spec.params:
        if not ok(values[pname]):
            raise InputError(f"{name}: parameter {pname}={values[pname]!r} out of range ({rng})")
        if rng.startswith("integer"):
            values[pname] = int(values[pname])
    return values


def get(name: str, params: Mapping[str, float] | Sequence[float] | None = None) -> CatalogEntry:
    values = resolve_params(name, params)
    return _REGISTRY[name].build(values)
