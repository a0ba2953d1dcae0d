"""Command-line front end.

Exit codes: 0 all checks verified, 2 well-formed input but hypothesis
falsified, 1 input or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import catalog, chart
from .errors import ChartRadiusError, DomainError, InputError
from .homog import (ReductiveSpace, build_reductive, homogeneous_kropina_certificate, invariant_vectors,
                    nomizu_curvature, nomizu_ricci, sectional_curvature)
from .kropina import (TOL_EINSTEIN_ALGEBRAIC, TOL_EINSTEIN_NUMERIC, Check, NavigationData,
                      einstein_certificate)
from .lie import InnerProduct, LieAlgebra, center, jacobi_defect, killing_form
from .report import REPORT_SCHEMA, check_entry, dumps, render_text
from .riemann import einstein_fit, fit_einstein, killing_defect, killing_space, riemann_ricci

EXIT_OK, EXIT_INPUT, EXIT_FALSIFIED = 0, 1, 2
TOL_ORACLE = 1e-6
TOL_KILLING_RESIDUAL = 1e-10
TOL_LEFT_INVARIANCE = 1e-10


@dataclass
class Instance:
    label: dict
    algebra: LieAlgebra
    metric: InnerProduct | None
    vectors: dict[str, np.ndarray] = field(default_factory=dict)
    default_vector: str | None = None
    w_kind: str | None = None
    entry: catalog.CatalogEntry | None = None
    subalgebra: list | None = None
    ambient_form: InnerProduct | None = None
    metric_m: InnerProduct | None = None
    chart: dict = field(default_factory=dict)

    def require_metric(self) -> InnerProduct:
        if self.metric is None:
            raise InputError("instance has no metric")
        return self.metric

    def space(self) -> ReductiveSpace:
        if self.entry is not None and self.entry.space is not None:
            return self.entry.space
        if self.subalgebra is None:
            raise InputError("instance has no subalgebra; homog needs one")
        Q = self.ambient_form or self.metric
        if Q is None:
            B = -killing_form(self.algebra).m
            try:
                Q = InnerProduct(B)
            except InputError:
                raise InputError("no ambient_form given and -Killing form is not positive definite") from None
        return build_reductive(self.algebra, self.subalgebra, Q, self.metric_m)


# ------------------------------------------------------------------ parsing

def parse_params(items: list[str] | None):
    if not items:
        return None
    tokens = [t.strip() for item in items for t in item.split(",") if t.strip()]
    keyed = [t for t in tokens if "=" in t]
    if keyed and len(keyed) != len(tokens):
        raise InputError("--param mixes key=value and positional values")
    try:
        if keyed:
            return {k.strip(): float(v) for k, v in (t.split("=", 1) for t in tokens)}
        return [float(t) for t in tokens]
    except ValueError as exc:
        raise InputError(f"bad --param value: {exc}") from None


def _matrix(doc, key: str, dim: int | None) -> InnerProduct | None:
    if doc.get(key) is None:
        return None
    m = np.asarray(doc[key], dtype=float)
    if dim is not None and m.shape != (dim, dim):
        raise InputError(f"{key!r} must be {dim}x{dim}, got shape {m.shape}")
    return InnerProduct(m)


def load_instance_file(path: str) -> Instance:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("algebra"), dict):
        raise InputError(f"{path}: missing 'algebra' object")
    alg = doc["algebra"]
    try:
        dim = int(alg["dim"])
        basis = alg.get("basis") or [f"e{i + 1}" for i in range(dim)]
        brackets = {}
        for br in alg.get("brackets", []):
            i, j = int(br["i"]), int(br["j"])
            if not i < j:
                raise InputError(f"bracket ({i}, {j}) must be listed with i < j")
            if (i, j) in brackets:
                raise InputError(f"bracket ({i}, {j}) listed twice")
            brackets[(i, j)] = br["coeffs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: malformed algebra ({exc})") from None
    A = LieAlgebra.from_brackets(dim, brackets, basis)
    vectors = {}
    if doc.get("vector") is not None:
        vectors["vector"] = np.asarray(doc["vector"], dtype=float)
    sub = doc.get("subalgebra")
    chart_doc = doc.get("chart") or {}
    known = {"series_order", "radius", "samples", "seed", "fd_step"}
    if set(chart_doc) - known:
        raise InputError(f"unknown chart keys: {sorted(set(chart_doc) - known)}")
    return Instance(
        label={"source": "file", "path": str(path)},
        algebra=A,
        metric=_matrix(doc, "metric", dim),
        vectors=vectors,
        default_vector="vector" if vectors else None,
        w_kind=doc.get("w_kind"),
        subalgebra=[np.asarray(h, dtype=float) for h in sub] if sub is not None else None,
        ambient_form=_matrix(doc, "ambient_form", dim),
        metric_m=_matrix(doc, "metric_m", None),
        chart=chart_doc,
    )


def load_builtin(name: str, params) -> Instance:
    entry = catalog.get(name, params)
    default = None
    for key in ("W_thm3", "hopf", "central"):
        if key in entry.distinguished_vectors:
            default = key
            break
    return Instance(
        label={"source": "builtin", "name": name, "params": dict(entry.params)},
        algebra=entry.algebra,
        metric=entry.metric,
        vectors=dict(entry.distinguished_vectors),
        default_vector=default,
        w_kind=entry.w_kind,
        entry=entry,
    )


def load(args) -> Instance:
    if bool(args.builtin) == bool(args.input):
        raise InputError("give exactly one of --builtin NAME or --input FILE")
    if args.builtin:
        return load_builtin(args.builtin, parse_params(args.param))
    if args.param:
        raise InputError("--param only applies to --builtin")
    return load_instance_file(args.input)


def resolve_vector(inst: Instance, spec: str | None, dim: int) -> tuple[np.ndarray, str]:
    if spec is None:
        if inst.default_vector is None:
            raise InputError("no vector given (use --w) and the instance has no default")
        return inst.vectors[inst.default_vector], inst.default_vector
    try:
        v = np.array([float(t) for t in spec.split(",")])
    except ValueError:
        if spec not in inst.vectors:
            raise InputError(f"unknown vector {spec!r}; available: {sorted(inst.vectors)}") from None
        return inst.vectors[spec], spec
    if v.shape != (dim,):
        raise InputError(f"--w has {v.size} components, expected {dim}")
    return v, spec


def chart_config(args, inst: Instance, default_samples: int) -> chart.ChartConfig:
    c = inst.chart

    def pick(flag, key, default):
        value = getattr(args, flag, None)
        return value if value is not None else c.get(key, default)

    return chart.ChartConfig(
        series_order=int(pick("series_order", "series_order", 10)),
        radius=float(pick("radius", "radius", 0.3)),
        fd_step=float(c.get("fd_step", 1e-4)),
        sample_count=int(pick("samples", "samples", default_samples)),
        rng_seed=int(pick("seed", "seed", 0)),
    )


def _cfg_dict(cfg: chart.ChartConfig) -> dict:
    return {"series_order": cfg.series_order, "radius": cfg.radius, "fd_step": cfg.fd_step,
            "samples": cfg.sample_count, "seed": cfg.rng_seed}


def _report(command: str, inst: Instance, config: dict, checks: list[Check], verdict: str,
            sigma: float | None = None, details: dict | None = None) -> dict:
    rep = {
        "command": command,
        "instance": inst.label,
        "config": config,
        "checks": [check_entry(c) for c in checks],
        "verdict": verdict,
    }
    if sigma is not None:
        rep["sigma"] = sigma
    rep["details"] = details or {}
    return rep


# ----------------------------------------------------------------- commands

def cmd_inspect(args, inst: Instance):
    A = inst.algebra
    defect = jacobi_defect(A)
    Z = center(A)
    B = killing_form(A).m
    checks = [Check("jacobi", defect <= 1e-12, defect, 1e-12)]
    details = {
        "dim": A.dim,
        "basis": list(A.basis_names),
        "killing_form": B,
        "killing_form_signature": [int(np.sum(np.linalg.eigvalsh(B) > 1e-10)),
                                   int(np.sum(np.linalg.eigvalsh(B) < -1e-10))],
        "center_dim": len(Z),
        "center_basis": Z,
    }
    return _report("inspect", inst, {}, checks, "valid_lie_algebra", details=details), EXIT_OK


def cmd_ricci(args, inst: Instance):
    A, g = inst.algebra, inst.require_metric()
    tol = args.tol if args.tol is not None else TOL_EINSTEIN_ALGEBRAIC
    ric = riemann_ricci(A, g)
    fit = einstein_fit(A, g)
    checks = [Check("einstein_metric", fit.residual < tol, fit.residual, tol)]
    details = {"ricci": ric, "einstein_residual": fit.residual}
    config = {"tol": tol}
    if args.oracle:
        cfg = chart_config(args, inst, default_samples=5)
        config["chart"] = _cfg_dict(cfg)
        worst = oracle_deviation(A, g, cfg)
        checks.append(Check("chart_oracle_agreement", worst < TOL_ORACLE, worst, TOL_ORACLE))
        details["oracle_points"] = cfg.sample_count + 1
    ok = all(c.passed for c in checks)
    verdict = "einstein" if ok else ("not_einstein" if not checks[0].passed else "oracle_mismatch")
    return _report("ricci", inst, config, checks, verdict, fit.sigma, details), EXIT_OK if ok else EXIT_FALSIFIED


def oracle_deviation(A: LieAlgebra, g: InnerProduct, cfg: chart.ChartConfig) -> float:
    """Max deviation between algebraic Ricci and the chart Ricci pulled back by the left frame."""
    ric = riemann_ricci(A, g)
    rng = np.random.default_rng(cfg.rng_seed)
    pts = [np.zeros(A.dim)] + chart.sample_chart_points(A.dim, cfg, rng, cfg.sample_count)
    worst = 0.0
    for x in pts:
        P = chart.left_frame(A, x, cfg)
        pulled = P.T @ chart.riemann_ricci_chart(A, g, x, cfg) @ P
        worst = max(worst, float(np.abs(pulled - ric).max()))
    return worst


def cmd_killing(args, inst: Instance):
    A, g = inst.algebra, inst.require_metric()
    K = killing_space(A, g)
    defect = max((killing_defect(A, g, w) for w in K), default=0.0)
    checks = [Check("killing_residual", defect < TOL_KILLING_RESIDUAL, defect, TOL_KILLING_RESIDUAL)]
    details = {"killing_dim": len(K), "killing_basis": K}
    return _report("killing", inst, {}, checks, f"killing_dim_{len(K)}", details=details), EXIT_OK


def cmd_verify(args, inst: Instance):
    A, h = inst.algebra, inst.require_metric()
    W_raw, w_name = resolve_vector(inst, args.w, A.dim)
    kind = chart.normalize_kind(args.w_kind or inst.w_kind or "left")
    cfg = chart_config(args, inst, default_samples=20)
    tol = args.tol if args.tol is not None else TOL_EINSTEIN_ALGEBRAIC
    tol_num = args.tol_numeric if args.tol_numeric is not None else TOL_EINSTEIN_NUMERIC
    nav = NavigationData.normalized(h, W_raw)
    cert = einstein_certificate(A, nav, kind, cfg, tol)
    checks = list(cert.checks)

    res = chart.einstein_residual(A, nav, kind, cert.sigma, cfg)
    max_res = res.max_residual if res.samples else float("inf")
    checks.append(Check("finsler_einstein_residual", bool(res.samples) and max_res < tol_num, max_res, tol_num))
    invariance = chart.left_invariance_check(A, nav, kind, cfg)
    details = {
        "w": w_name,
        "w_input_norm": h.norm(W_raw),
        "W": nav.W,
        "w_kind": kind,
        "ricci_constant": cert.ricci_constant,
        "samples": len(res.samples),
        "rejected": res.rejected,
        "max_finsler_residual": max_res,
        "ric_over_F2_min": min(res.ratios) if res.samples else None,
        "ric_over_F2_max": max(res.ratios) if res.samples else None,
        "left_invariance_deviation": invariance,
    }
    if "killing_dim" in cert.details:
        details["killing_dim"] = cert.details["killing_dim"]
    if kind == "right":
        # right-invariant W: F is Einstein but need not be left-invariant
        details["left_invariant"] = invariance < TOL_LEFT_INVARIANCE
    else:
        checks.append(Check("left_invariance", invariance < TOL_LEFT_INVARIANCE, invariance, TOL_LEFT_INVARIANCE))
    ok = all(c.passed for c in checks)
    config = {"tol": tol, "tol_numeric": tol_num, "w": w_name, "w_kind": kind, "chart": _cfg_dict(cfg)}
    verdict = "einstein_kropina" if ok else "falsified"
    if not ok:
        details["failing_checks"] = [c.name for c in checks if not c.passed]
    return _report("verify", inst, config, checks, verdict, cert.sigma, details), EXIT_OK if ok else EXIT_FALSIFIED


CLASSIFY_CASES = (
    ("(i)", "r3_abelian", {}, True),
    ("(ii)", "e0tilde2", {"nu": 0.5}, True),
    ("(ii)", "e0tilde2", {"nu": 1.0}, True),
    ("(ii)", "e0tilde2", {"nu": 2.0}, True),
    ("(iii)", "su2_round", {"lam": 0.5}, True),
    ("(iii)", "su2_round", {"lam": 1.0}, True),
    ("(iii)", "su2_round", {"lam": 2.0}, True),
    ("control", "heisenberg3", {}, False),
    ("control", "su2_diag", {"l1": 1.0, "l2": 2.0, "l3": 3.0}, False),
)


def classify_row(case: str, name: str, params: dict, expect_admits: bool, tol: float,
                 cfg: chart.ChartConfig) -> tuple[dict, Check]:
    entry = catalog.get(name, params)
    A, g = entry.algebra, entry.metric
    fit = einstein_fit(A, g)
    K = killing_space(A, g)
    admits = fit.residual < tol and len(K) > 0
    label = name + "(" + ",".join(f"{k}={v:g}" for k, v in params.items()) + ")"
    row = {
        "case": case, "label": label, "name": name, "params": params,
        "sigma": fit.sigma, "einstein_residual": fit.residual,
        "killing_dim": len(K), "killing_basis": K, "admits": admits,
    }
    ok = admits == expect_admits
    W = entry.distinguished_vectors.get("W_thm3")
    if W is None and K:
        W = K[0]
    if W is not None:
        cert = einstein_certificate(A, NavigationData.normalized(g, W), "left", cfg, tol)
        row["W"] = NavigationData.normalized(g, W).W
        row["certificate"] = cert.verdict
        ok = ok and (cert.verdict == "einstein_kropina") == expect_admits
        if admits and cfg.sample_count:
            res = chart.einstein_residual(A, NavigationData.normalized(g, W), "left", fit.sigma, cfg)
            row["max_finsler_residual"] = res.max_residual
            ok = ok and res.max_residual < TOL_EINSTEIN_NUMERIC
    for key in ("killing_dim", "sigma"):
        exp = entry.expected.get(key)
        if exp is not None:
            got = row[key]
            ok = ok and (got == exp.value if key == "killing_dim" else abs(got - exp.value) < 1e-10)
    if name == "e0tilde2":
        # unique unit solution must be z / sqrt(nu) up to sign
        W3 = entry.distinguished_vectors["W_thm3"]
        dev = min(np.abs(K[0] - W3).max(), np.abs(K[0] + W3).max()) if len(K) == 1 else np.inf
        row["unit_solution_deviation"] = dev
        ok = ok and dev < 1e-12
    mismatch = 0.0 if ok else 1.0
    return row, Check(f"row {case} {label}", ok, mismatch, 0.0)


def cmd_classify3d(args, inst: Instance | None):
    tol = args.tol if args.tol is not None else TOL_EINSTEIN_ALGEBRAIC
    cfg = chart.ChartConfig(sample_count=args.samples or 0, rng_seed=args.seed or 0,
                            series_order=args.series_order or 10, radius=args.radius or 0.3)
    rows, checks = [], []
    for case, name, params, expect in CLASSIFY_CASES:
        row, check = classify_row(case, name, params, expect, tol, cfg)
        rows.append(row)
        checks.append(check)
    ok = all(c.passed for c in checks)
    config = {"tol": tol, "chart": _cfg_dict(cfg)}
    rep = {
        "command": "classify3d",
        "instance": {"source": "catalog", "cases": [r["label"] for r in rows]},
        "config": config,
        "checks": [check_entry(c) for c in checks],
        "verdict": "matches_classification" if ok else "mismatch",
        "details": {"table": rows},
    }
    return rep, EXIT_OK if ok else EXIT_FALSIFIED


def cmd_homog(args, inst: Instance):
    S = inst.space()
    m0 = invariant_vectors(S)
    ric = nomizu_ricci(S)
    fit = fit_einstein(ric, S.metric_m.g)
    R = nomizu_curvature(S)
    E = S.metric_m.orthonormal_frame()
    secs = [sectional_curvature(S, E[:, a], E[:, b], R) for a in range(S.dim_m) for b in range(a + 1, S.dim_m)]
    details = {
        "dim_h": S.dim_h, "dim_m": S.dim_m, "m_basis": list(S.m_basis), "metric_m": S.metric_m.g,
        "m0_dim": len(m0), "m0_basis": m0, "ricci": ric, "einstein_residual": fit.residual,
        "sectional_min": min(secs) if secs else None, "sectional_max": max(secs) if secs else None,
    }
    config: dict = {"tol": args.tol if args.tol is not None else TOL_EINSTEIN_ALGEBRAIC}
    if args.w is None and not (inst.default_vector and inst.default_vector in inst.vectors):
        if not m0:
            checks = [Check("invariant_vector_exists", False, 0.0, 0.0)]
            return _report("homog", inst, config, checks, "no_invariant_vector", fit.sigma, details), EXIT_FALSIFIED
        W, w_name = m0[0], "m0[0]"
    else:
        W, w_name = resolve_vector(inst, args.w, S.dim_m)
    config["w"] = w_name
    cert = homogeneous_kropina_certificate(S, W, tol_einstein=config["tol"])
    details.update({"w": w_name, "W": cert.details["W"], "w_input_norm": cert.details["input_norm"],
                    "ricci_constant": cert.ricci_constant})
    code = EXIT_OK if cert.verdict == "homogeneous_einstein_kropina" else EXIT_FALSIFIED
    return _report("homog", inst, config, cert.checks, cert.verdict, cert.sigma, details), code


# --------------------------------------------------------------------- main

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kropina-einstein",
                                     description="Construct and verify Einstein Kropina metrics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, instance=True):
        if instance:
            p.add_argument("--builtin", metavar="NAME", help=f"catalog entry: {', '.join(catalog.NAMES)}")
            p.add_argument("--input", metavar="FILE", help="instance JSON file")
            p.add_argument("--param", action="append", help="parameters: 'n=4', 'nu=2' or positional '1,2,3'")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--samples", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--series-order", dest="series_order", type=int, default=None)
        p.add_argument("--radius", type=float, default=None)
        p.add_argument("--w", default=None, help="vector 'a,b,c' or a named vector of the instance")
        p.add_argument("--w-kind", dest="w_kind", choices=chart.W_KINDS, default=None)
        p.add_argument("--tol-numeric", dest="tol_numeric", type=float, default=None)
        p.add_argument("--oracle", action="store_true", help="cross-check against the chart Ricci oracle")

    for name, helptext in [
        ("inspect", "algebra validation, Killing form, center"),
        ("ricci", "Ricci tensor and Einstein fit of the left-invariant metric"),
        ("killing", "left-invariant Killing fields"),
        ("verify", "full Einstein Kropina verification"),
        ("homog", "reductive homogeneous space certificate"),
    ]:
        common(sub.add_parser(name, help=helptext))
    common(sub.add_parser("classify3d", help="reproduce the 3-dimensional classification"), instance=False)
    exp = sub.add_parser("export", help="print a catalog entry in the instance-file format")
    exp.add_argument("--builtin", metavar="NAME", required=True)
    exp.add_argument("--param", action="append")
    sub.add_parser("schema", help="print the JSON report schema")
    return parser


COMMANDS = {
    "inspect": cmd_inspect,
    "ricci": cmd_ricci,
    "killing": cmd_killing,
    "verify": cmd_verify,
    "homog": cmd_homog,
}


def run(argv: list[str] | None = None) -> tuple[str, int]:
    """Execute a command; returns (stdout text, exit code)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return "", EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "schema":
            return dumps(REPORT_SCHEMA), EXIT_OK
        if args.command == "export":
            entry = catalog.get(args.builtin, parse_params(args.param))
            return dumps(entry.to_instance()), EXIT_OK
        if args.command == "classify3d":
            report, code = cmd_classify3d(args, None)
        else:
            report, code = COMMANDS[args.command](args, load(args))
    except (InputError, DomainError, ChartRadiusError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return "", EXIT_INPUT
    text = dumps(report) if args.format == "json" else render_text(report)
    return text, code


def main(argv: list[str] | None = None) -> int:
    text, code = run(argv)
    sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
