"""Command-line front end emitting machine-readable verification reports.

Five subcommands cover the full pipeline: curvature reports, conformal
factor verification, quotient classification, the essentiality witness,
and geodesic integration.  Every command prints one report document, JSON
by default, and exits 0 exactly when every non-skipped check passed.

Reports are built for diffability: insertion-ordered keys, floats always
rendered with 17 significant digits, no timestamps or environment echoes.
Running a command twice on the same inputs must produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .conformal import (
    FLOW_FACTOR_EXACT,
    SCALING_FACTOR_EXACT,
    ScalingExponents,
    conformal_factor,
    diagonal_scaling_map,
    essential_flow,
    validate_exponents,
)
from .errors import ConflabError, InadmissibleExponents, NonFinite, PoleOnPath
from .exact import ExactScalar, Polynomial, RationalFunction
from .geodesic import (
    integrate_geodesic,
    is_lightlike,
    write_projective_csv,
    write_trajectory_csv,
)
from .quotient import (
    build_model,
    classify_model,
    essentiality_witness,
    holonomy_cross_check,
    closed_lightlike_geodesics,
    model_description,
    models_equivalent,
)
from .tensor import (
    build_g0,
    check_first_bianchi,
    check_gamma_symmetry,
    check_inverse,
    check_pair_symmetry,
    check_ricci_symmetry,
    check_riemann_antisymmetry,
    check_weyl_traces,
    conformal_flatness,
    curvature_report,
    flat_metric,
    load_metric,
    nonzero_entries,
    verify_signature,
    weyl_image_at,
)

# ---------------------------------------------------------------------------
# Report document
# ---------------------------------------------------------------------------


class Report:
    """Accumulates check records and renders them deterministically."""

    def __init__(self, command: str, inputs: dict):
        self.command = command
        self.inputs = inputs
        self.checks: list[dict] = []
        self.artifacts: dict = {}

    def add(self, name: str, status: str, mode: str, **details) -> None:
        if status not in ("pass", "fail", "skip"):
            raise ValueError(f"bad status {status!r}")
        self.checks.append(
            {"name": name, "status": status, "mode": mode, "details": details}
        )

    def check(self, name: str, ok: bool, mode: str, **details) -> None:
        self.add(name, "pass" if ok else "fail", mode, **details)

    def skip(self, name: str, reason: str) -> None:
        self.add(name, "skip", "exact", reason=reason)

    @property
    def overall(self) -> str:
        return (
            "pass"
            if all(c["status"] != "fail" for c in self.checks)
            else "fail"
        )

    def to_data(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "checks": self.checks,
            "artifacts": self.artifacts,
            "overall": self.overall,
        }

    @property
    def exit_code(self) -> int:
        return 0 if self.overall == "pass" else 1


def _plain(value):
    """Normalize detail payloads to JSON-ready plain data."""
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (ExactScalar, Polynomial, RationalFunction)):
        return repr(value)
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


def _render_json(value, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [
            f'{pad}  {json.dumps(str(k))}: {_render_json(v, indent + 1)}'
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{pad}  {_render_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            return json.dumps(format(value, ".17g"))
        return format(value, ".17g")
    return json.dumps(value)


def _render_text(doc: dict) -> str:
    lines = [f"command: {doc['command']}"]
    for key, val in doc["inputs"].items():
        lines.append(f"  {key} = {_text_scalar(val)}")
    for chk in doc["checks"]:
        lines.append(f"[{chk['status']:>4}] {chk['name']} ({chk['mode']})")
        for key, val in chk["details"].items():
            lines.append(f"         {key}: {_text_scalar(val)}")
    for key, val in doc["artifacts"].items():
        lines.append(f"wrote {key}: {_text_scalar(val)}")
    lines.append(f"overall: {doc['overall']}")
    return "\n".join(lines)


def _text_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, (dict, list, tuple)):
        return _render_json(value).replace("\n", " ").replace("  ", " ")
    return str(value)


def _emit(report: Report, fmt: str, stream) -> int:
    doc = _plain(report.to_data())
    if fmt == "json":
        stream.write(_render_json(doc) + "\n")
    else:
        stream.write(_render_text(doc) + "\n")
    return report.exit_code


# ---------------------------------------------------------------------------
# Shared argument plumbing
# ---------------------------------------------------------------------------


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _parse_fractions(text: str) -> list[Fraction]:
    return [Fraction(tok.strip()) for tok in text.split(",") if tok.strip()]


def _grid_type(text: str) -> int:
    value = int(text)
    if value < 3:
        raise argparse.ArgumentTypeError("grid must be at least 3 per axis")
    return value


def _add_metric_source(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--builtin",
        choices=("g0", "flat"),
        help="built-in metric family (default: g0)",
    )
    group.add_argument("--file", help="metric description file")
    parser.add_argument("--p", type=int, default=2, help="negative-square count")
    parser.add_argument("--q", type=int, default=2, help="positive-square count")


def _resolve_metric(args):
    if args.file:
        return load_metric(args.file), {"file": args.file}
    name = args.builtin or "g0"
    source = {"builtin": name, "p": args.p, "q": args.q}
    if name == "g0":
        return build_g0(args.p, args.q), source
    return flat_metric(args.p, args.q), source


def _default_point(dim: int) -> list[Fraction]:
    point = [Fraction(0)] * dim
    if dim >= 3:
        point[2] = Fraction(1)
    return point


def _entry_map(tensor, depth: int, symbol: str) -> dict:
    out = {}
    for idx, value in sorted(nonzero_entries(tensor, depth).items()):
        key = symbol + "".join(f"[{i}]" for i in idx)
        out[key] = repr(value)
    return out


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------


def _expected_g0_christoffel(dim: int) -> dict:
    x3 = RationalFunction.from_polynomial(Polynomial.variable(dim, 2))
    return {(2, 1, 3): x3, (2, 3, 1): x3, (4, 1, 1): -x3}


def _expected_g0_curvature(dim: int) -> dict:
    one = RationalFunction.constant(dim, 1)
    return {
        (2, 3, 3, 1): one,
        (2, 3, 1, 3): -one,
        (4, 1, 1, 3): one,
        (4, 1, 3, 1): -one,
    }


def cmd_curvature(args, stream) -> int:
    metric, source = _resolve_metric(args)
    n = metric.dim
    point = _parse_fractions(args.point) if args.point else _default_point(n)
    if len(point) != n:
        raise ConflabError(f"point has {len(point)} coordinates, metric dim is {n}")
    report = Report(
        "curvature",
        {**source, "dim": n, "point": [str(c) for c in point]},
    )
    claim_g0 = source.get("builtin") == "g0"

    try:
        verify_signature(metric, point)
        report.check("signature", True, "exact", p=metric.p, q=metric.q)
    except ConflabError as exc:
        report.check("signature", False, "exact", error=str(exc))
        return _emit(report, args.format, stream)

    rep = curvature_report(metric)
    report.check("metric_inverse", check_inverse(rep), "exact")
    report.check("christoffel_symmetry", check_gamma_symmetry(rep), "exact")
    report.check("curvature_antisymmetry", check_riemann_antisymmetry(rep), "exact")
    report.check("first_bianchi", check_first_bianchi(rep), "exact")
    report.check("ricci_symmetry", check_ricci_symmetry(rep), "exact")
    report.check("pair_symmetry", check_pair_symmetry(rep), "exact")
    if n >= 4:
        report.check("weyl_traces", check_weyl_traces(rep), "exact")
    else:
        report.skip("weyl_traces", "Weyl tensor vanishes identically below dim 4")

    gamma_map = _entry_map(rep.christoffel, 3, "Gamma")
    curv_map = _entry_map(rep.riemann, 4, "R")
    ricci_map = _entry_map(rep.ricci, 2, "Ric")
    report.add(
        "tensor_summary",
        "pass",
        "exact",
        christoffel_nonzero=gamma_map,
        curvature_nonzero=curv_map,
        ricci_nonzero=ricci_map,
        scalar_curvature=repr(rep.scalar),
        ricci_flat=rep.is_ricci_flat(),
    )
    if claim_g0:
        report.check(
            "expected_christoffel",
            nonzero_entries(rep.christoffel, 3) == _expected_g0_christoffel(n),
            "exact",
            expected={"Gamma[2][1][3]": "x3", "Gamma[2][3][1]": "x3", "Gamma[4][1][1]": "-x3"},
        )
        report.check(
            "expected_curvature",
            nonzero_entries(rep.riemann, 4) == _expected_g0_curvature(n),
            "exact",
            expected="R(e3,e1)e1 = -e4 and R(e3,e1)e3 = e2, with index antisymmetry",
        )
        report.check("ricci_flat", rep.is_ricci_flat(), "exact")

    if n >= 4:
        weyl_map = _entry_map(rep.weyl, 4, "W")
        verdict = conformal_flatness(rep)
        details = {"conformally_flat": verdict.conformally_flat}
        if not verdict.conformally_flat:
            l, k, i, j = verdict.witness_component
            details["witness_component"] = f"W[{l}][{k}][{i}][{j}]"
            details["witness_point"] = [str(c) for c in verdict.witness_point]
            details["witness_value"] = repr(verdict.witness_value)
        if claim_g0:
            report.check(
                "weyl_equals_curvature", rep.weyl == rep.riemann, "exact"
            )
            report.check(
                "conformal_flatness", not verdict.conformally_flat, "exact", **details
            )
        else:
            report.add("conformal_flatness", "pass", "exact", **details)
        basis = weyl_image_at(rep, point)
        basis_rows = [[str(c) for c in row] for row in basis]
        if claim_g0:
            expected_rows = [
                ["1" if i == axis - 1 else "0" for i in range(n)] for axis in (2, 4)
            ]
            report.check(
                "weyl_image",
                basis_rows == expected_rows,
                "exact",
                basis=basis_rows,
                weyl_nonzero=weyl_map,
            )
        else:
            report.add(
                "weyl_image", "pass", "exact", basis=basis_rows, weyl_nonzero=weyl_map
            )
    else:
        report.skip("conformal_flatness", "needs dim >= 4")
        report.skip("weyl_image", "needs dim >= 4")
    return _emit(report, args.format, stream)


# ---------------------------------------------------------------------------
# verify-conformal
# ---------------------------------------------------------------------------


def cmd_verify_conformal(args, stream) -> int:
    dim = args.p + args.q
    metric = build_g0(args.p, args.q)
    # without a numeric exponent pair there is nothing to evaluate, so the
    # formal check is all that can run
    symbolic = bool(args.symbolic) or args.alpha is None or args.beta is None
    inputs = {
        "p": args.p,
        "q": args.q,
        "symbolic": symbolic,
        "alpha": args.alpha,
        "beta": args.beta,
        "t": args.t,
    }
    report = Report("verify-conformal", inputs)

    if symbolic:
        mapping = diagonal_scaling_map(dim)
        factor = conformal_factor(mapping, metric)
        report.check(
            "pullback_factor_exact",
            factor == SCALING_FACTOR_EXACT,
            "exact",
            factor=repr(factor),
            entries=[repr(e) for e in mapping.entries],
        )
        report.skip("admissibility_reported", "symbolic mode carries no numbers")
    else:
        lam = ScalingExponents(args.alpha, args.beta)
        mapping = diagonal_scaling_map(dim, lam)
        factor = conformal_factor(mapping, metric)
        report.check(
            "pullback_factor_exact",
            factor == SCALING_FACTOR_EXACT,
            "exact",
            factor=repr(factor),
        )
        expected = math.exp(2.0 * (args.alpha + args.beta))
        got = factor.evaluate(args.alpha, args.beta)
        report.check(
            "pullback_factor_numeric",
            abs(got - expected) < args.tol,
            "numeric",
            value=got,
            expected=expected,
            error=abs(got - expected),
        )
        verdict = validate_exponents(lam, dim)
        report.add(
            "admissibility_reported",
            "pass",
            "numeric",
            admissible=verdict.admissible,
            alpha_lt_beta=verdict.alpha_lt_beta,
            beta_lt_half_alpha=verdict.beta_lt_half_alpha,
            half_alpha_negative=verdict.half_alpha_negative,
            entries_contracting=verdict.entries_contracting,
        )

    if args.t is None:
        report.skip("flow_factor_exact", "no flow time given")
        report.skip("flow_factor_numeric", "no flow time given")
        report.skip("commutation", "no flow time given")
    else:
        flow = essential_flow(args.t, dim)
        flow_factor = conformal_factor(flow, metric)
        report.check(
            "flow_factor_exact",
            flow_factor == FLOW_FACTOR_EXACT,
            "exact",
            factor=repr(flow_factor),
        )
        value = flow_factor.evaluate(*flow.param_values)
        expected = math.exp(-3.0 * args.t)
        report.check(
            "flow_factor_numeric",
            abs(value - expected) < args.tol,
            "numeric",
            value=value,
            expected=expected,
            error=abs(value - expected),
        )
        if symbolic:
            report.skip("commutation", "symbolic mode carries no numbers")
        else:
            lam_entries = diagonal_scaling_map(
                dim, ScalingExponents(args.alpha, args.beta)
            ).numeric_entries()
            flow_entries = flow.numeric_entries()
            ab = [x * y for x, y in zip(lam_entries, flow_entries)]
            ba = [y * x for x, y in zip(lam_entries, flow_entries)]
            diff = max(abs(u - v) for u, v in zip(ab, ba))
            report.check("commutation", diff <= 1e-15, "numeric", max_difference=diff)
    return _emit(report, args.format, stream)


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------


def cmd_classify(args, stream) -> int:
    inputs = {
        "p": args.p,
        "q": args.q,
        "alpha1": args.alpha1,
        "beta1": args.beta1,
        "alpha2": args.alpha2,
        "beta2": args.beta2,
        "tol": args.tol,
    }
    report = Report("classify", inputs)
    models = []
    for label, (alpha, beta) in (
        ("first", (args.alpha1, args.beta1)),
        ("second", (args.alpha2, args.beta2)),
    ):
        try:
            model = build_model(args.p, args.q, ScalingExponents(alpha, beta))
        except InadmissibleExponents as exc:
            report.check(f"admissible_{label}", False, "numeric", error=str(exc))
            return _emit(report, args.format, stream)
        report.check(f"admissible_{label}", True, "numeric")
        models.append(model)

    for label, model in zip(("first", "second"), models):
        pair = classify_model(model)
        report.add(
            f"invariants_{label}",
            "pass",
            "numeric",
            mu_gamma=pair.mu_gamma,
            mu_delta=pair.mu_delta,
            exact_gamma=repr(pair.exact_gamma),
            exact_delta=repr(pair.exact_delta),
        )
        geods = {g.axis: g for g in closed_lightlike_geodesics(model)}
        for axis, name in ((2, "gamma"), (4, "delta")):
            chk = holonomy_cross_check(model, geods[axis])
            report.check(
                f"holonomy_{name}_{label}",
                chk.discrepancy <= args.tol and chk.fit_residual <= args.tol,
                "numeric",
                generator=chk.generator_value,
                transport=chk.transport_value,
                discrepancy=chk.discrepancy,
            )

    equivalent = models_equivalent(models[0], models[1], tol=args.tol)
    report.add("equivalence", "pass", "numeric", equivalent=equivalent)
    return _emit(report, args.format, stream)


# ---------------------------------------------------------------------------
# essential-demo
# ---------------------------------------------------------------------------


def cmd_essential_demo(args, stream) -> int:
    ts = _parse_floats(args.t_list)
    inputs = {
        "p": args.p,
        "q": args.q,
        "alpha": args.alpha,
        "beta": args.beta,
        "t_list": ts,
        "grid": args.grid,
        "window": args.window,
        "out": args.out,
    }
    report = Report("essential-demo", inputs)
    try:
        model = build_model(args.p, args.q, ScalingExponents(args.alpha, args.beta))
    except InadmissibleExponents as exc:
        report.check("admissible", False, "numeric", error=str(exc))
        return _emit(report, args.format, stream)
    report.check("admissible", True, "numeric")

    witness = essentiality_witness(
        model, ts, grid_per_axis=args.grid, window=args.window, threads=args.threads
    )
    report.add(
        "witness_computed",
        "pass",
        "numeric",
        distances=list(witness.distances),
        resolution=witness.resolution,
    )
    if len(ts) < 2:
        report.skip("monotone_decay", "need at least two flow times")
    else:
        report.check(
            "monotone_decay",
            witness.strictly_decreasing(),
            "numeric",
            initial=witness.distances[0],
            final=witness.distances[-1],
        )
    report.add("model", "pass", "numeric", **model_description(model))

    out = Path(args.out)
    with open(out, "w") as fh:
        witness.write_csv(fh)
    report.artifacts["witness_csv"] = str(out)
    if args.plot:
        from .plotting import plot_witness

        png = out.with_suffix(".png")
        plot_witness(witness, png)
        report.artifacts["witness_plot"] = str(png)
    return _emit(report, args.format, stream)


# ---------------------------------------------------------------------------
# geodesic
# ---------------------------------------------------------------------------


def cmd_geodesic(args, stream) -> int:
    metric, source = _resolve_metric(args)
    n = metric.dim
    x0 = _parse_floats(args.x0)
    v0 = _parse_floats(args.v0)
    inputs = {
        **source,
        "x0": x0,
        "v0": v0,
        "step": args.step,
        "nsteps": args.nsteps,
        "projective": bool(args.projective),
        "out": args.out,
    }
    report = Report("geodesic", inputs)
    if len(x0) != n or len(v0) != n:
        report.check(
            "state_dimension", False, "exact", expected=n, got=[len(x0), len(v0)]
        )
        return _emit(report, args.format, stream)
    report.check("state_dimension", True, "exact", dim=n)

    null0 = is_lightlike(metric, x0, v0, tol=args.null_tol)
    report.add("initial_causal_type", "pass", "numeric", lightlike=null0)

    try:
        path = integrate_geodesic(
            metric,
            x0,
            v0,
            step=args.step,
            nsteps=args.nsteps,
            with_projective=bool(args.projective),
        )
    except (PoleOnPath, NonFinite) as exc:
        report.check(
            "integration", False, "numeric", error=str(exc), step=exc.step
        )
        return _emit(report, args.format, stream)
    report.check(
        "integration",
        True,
        "numeric",
        endpoint=[float(c) for c in path.x[-1]],
        steps=args.nsteps,
    )
    report.check(
        "norm_conserved",
        path.null_drift <= args.drift_tol,
        "numeric",
        drift=path.null_drift,
        tolerance=args.drift_tol,
    )

    out = Path(args.out)
    with open(out, "w") as fh:
        write_trajectory_csv(path, fh)
    report.artifacts["trajectory_csv"] = str(out)
    if args.projective:
        report.add(
            "projective_series",
            "pass",
            "numeric",
            chart_boundaries=list(path.chart_ends),
        )
        proj = out.with_suffix(".projective.csv")
        with open(proj, "w") as fh:
            write_projective_csv(path, fh)
        report.artifacts["projective_csv"] = str(proj)
    if args.plot:
        from .plotting import plot_trajectory

        png = out.with_suffix(".png")
        plot_trajectory(path, png)
        report.artifacts["trajectory_plot"] = str(png)
    return _emit(report, args.format, stream)


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conflab",
        description="Exact curvature, conformal maps, quotient models, geodesics.",
    )
    parser.add_argument("--version", action="version", version=f"conflab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cur = sub.add_parser("curvature", help="exact curvature report for a metric")
    _add_metric_source(cur)
    cur.add_argument("--point", help="comma-separated rational point (default: x3=1)")
    cur.add_argument("--format", choices=("json", "text"), default="json")
    cur.set_defaults(func=cmd_curvature)

    ver = sub.add_parser(
        "verify-conformal", help="conformal factors of the scaling maps and the flow"
    )
    ver.add_argument("--p", type=int, default=2)
    ver.add_argument("--q", type=int, default=2)
    ver.add_argument("--symbolic", action="store_true", help="formal exponents only")
    ver.add_argument("--alpha", type=float)
    ver.add_argument("--beta", type=float)
    ver.add_argument("--t", type=float, help="flow time for the one-parameter family")
    ver.add_argument("--tol", type=float, default=1e-12)
    ver.add_argument("--format", choices=("json", "text"), default="json")
    ver.set_defaults(func=cmd_verify_conformal)

    cls = sub.add_parser("classify", help="compare two quotient models by invariants")
    cls.add_argument("--p", type=int, default=2)
    cls.add_argument("--q", type=int, default=2)
    cls.add_argument("--alpha1", type=float, required=True)
    cls.add_argument("--beta1", type=float, required=True)
    cls.add_argument("--alpha2", type=float, required=True)
    cls.add_argument("--beta2", type=float, required=True)
    cls.add_argument("--tol", type=float, default=1e-12)
    cls.add_argument("--format", choices=("json", "text"), default="json")
    cls.set_defaults(func=cmd_classify)

    ess = sub.add_parser(
        "essential-demo", help="Hausdorff-contraction witness for the flow"
    )
    ess.add_argument("--p", type=int, default=2)
    ess.add_argument("--q", type=int, default=2)
    ess.add_argument("--alpha", type=float, default=-2.0)
    ess.add_argument("--beta", type=float, default=-1.5)
    ess.add_argument("--t-list", default="0,2,4,6,8,10", help="comma-separated times")
    ess.add_argument("--grid", type=_grid_type, default=5, help="grid points per axis")
    ess.add_argument("--window", type=int, default=40, help="group-shift search window")
    ess.add_argument("--threads", type=int, help="worker cap (else CONFLAB_THREADS)")
    ess.add_argument("--out", required=True, help="witness CSV path")
    ess.add_argument("--plot", action="store_true", help="render decay figure as PNG")
    ess.add_argument("--format", choices=("json", "text"), default="json")
    ess.set_defaults(func=cmd_essential_demo)

    geo = sub.add_parser("geodesic", help="integrate a geodesic and write the path")
    _add_metric_source(geo)
    geo.add_argument("--x0", required=True, help="comma-separated start position")
    geo.add_argument("--v0", required=True, help="comma-separated start velocity")
    geo.add_argument("--step", type=float, default=1e-3)
    geo.add_argument("--nsteps", type=int, default=10_000)
    geo.add_argument("--projective", action="store_true")
    geo.add_argument("--null-tol", type=float, default=1e-9)
    geo.add_argument("--drift-tol", type=float, default=1e-9)
    geo.add_argument("--out", required=True, help="trajectory CSV path")
    geo.add_argument("--plot", action="store_true", help="render trajectory PNG")
    geo.add_argument("--format", choices=("json", "text"), default="json")
    geo.set_defaults(func=cmd_geodesic)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, sys.stdout)
    except ConflabError as exc:
        report = Report(args.command, {})
        report.check("run", False, "exact", error=f"{type(exc).__name__}: {exc}")
        return _emit(report, getattr(args, "format", "json"), sys.stdout)


if __name__ == "__main__":
    sys.exit(main())
