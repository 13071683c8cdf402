"""Command-line interface.

Subcommands: ``catalog`` (list builtins), ``eval`` (one metric value),
``verify --theorem {A|B|C}`` (closed-form model vs integrated pullback),
``order`` (convergence study), ``tangency`` (first-order comparison at the
zero section).  Exit code 0 means every checked tolerance passed.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .catalog import CATALOG
from .config import ConfigError, RunConfig, load_config
from .formulas import euclidean_exact, quadratic_expansion, space_form_exact
from .pullback import pullback_metric, pullback_metric_fd
from .report import emit, format_value
from .runs import run_order, run_tangency, run_verify
from .tube import TubePoint, TubeTangent, sasaki

VERIFY_COLUMNS = [
    "base_point_index",
    "normal_index",
    "r",
    "sample_index",
    "sample_kind",
    "pullback",
    "sasaki",
    "model_value",
    "model_variant",
    "residual",
]

TANGENCY_COLUMNS = [
    "base_point_index",
    "normal_index",
    "probe_i",
    "probe_j",
    "derivative",
    "minus_two_ii",
    "defect",
    "verdict",
]

ORDER_COLUMNS = ["r", "max_residual", "mean_residual"]

EVAL_QUANTITIES = (
    "pullback",
    "pullback-fd",
    "sasaki",
    "theorem-A",
    "theorem-B",
    "theorem-C-corrected",
    "theorem-C-original",
)


def _floats(text: str) -> np.ndarray:
    return np.array([float(t) for t in text.split(",") if t.strip() != ""])


def _add_common(sub):
    sub.add_argument("--config", required=True, help="path to a JSON run configuration")
    sub.add_argument("--out", default=None, help="output path (default: stdout)")
    sub.add_argument("--format", choices=["csv", "json"], default="csv")
    sub.add_argument("--seed", type=int, default=None, help="override the config seed")
    sub.add_argument("--ode-tol", type=float, default=None, help="override the ODE tolerance")


def _load(args) -> RunConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if getattr(args, "ode_tol", None) is not None:
        config.tol_ode = args.ode_tol
    return config


def cmd_catalog(_args) -> int:
    for entry in CATALOG.values():
        params = ", ".join(f"{k}={v:g}" for k, v in entry.params.items()) or "-"
        print(f"{entry.name:16s} params: {params}")
        print(f"{'':16s} {entry.description}")
        print(f"{'':16s} ambient: {entry.ambient_req} (dim {entry.ambient_dim}); domain: {entry.param_domain}")
    return 0


def cmd_eval(args) -> int:
    config = _load(args)
    imm = config.immersion
    q = _floats(args.q) if args.q else config.base_points[0]
    n_coeffs = _floats(args.n_coeffs) if args.n_coeffs else config.normal_list(imm.codim)[0]
    at = TubePoint(imm=imm, q=q, r=args.r, n_coeffs=n_coeffs)
    qdot = _floats(args.qdot) if args.qdot else np.zeros(imm.n_params)
    ndot = _floats(args.ndot) if args.ndot else np.zeros(imm.codim)
    u = TubeTangent(at=at, qdot=qdot, ndot=ndot)
    quantity = args.quantity
    if quantity == "pullback":
        value = pullback_metric(imm, u, u, config.tol_ode)
    elif quantity == "pullback-fd":
        value = pullback_metric_fd(imm, u, u, config.tol_ode)
    elif quantity == "sasaki":
        value = sasaki(u, u)
    elif quantity == "theorem-A":
        value = quadratic_expansion(imm, u, u)
    elif quantity == "theorem-B":
        value = euclidean_exact(imm, u, u)
    elif quantity == "theorem-C-corrected":
        value = space_form_exact(imm, u, u, "corrected")
    else:
        value = space_form_exact(imm, u, u, "original")
    print(format_value(float(value)))
    return 0


def cmd_verify(args) -> int:
    config = _load(args)
    report = run_verify(config, args.theorem)
    emit(report.rows, report.summary, VERIFY_COLUMNS, args.format, args.out)
    return 0 if report.passed else 1


def cmd_order(args) -> int:
    config = _load(args)
    report = run_order(config, args.model)
    emit(report.rows, report.summary, ORDER_COLUMNS, args.format, args.out)
    slope = report.summary.get("fitted_slope")
    if slope is not None:
        print(f"fitted slope: {slope:.4f}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_tangency(args) -> int:
    config = _load(args)
    report = run_tangency(config)
    emit(report.rows, report.summary, TANGENCY_COLUMNS, args.format, args.out)
    print(f"first-order tangent: {report.summary['verdict']}", file=sys.stderr)
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubemetrics",
        description="Sasaki vs exponential-pullback metrics on normal tubes",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("catalog", help="list builtin submanifolds").set_defaults(fn=cmd_catalog)

    p_eval = sub.add_parser("eval", help="evaluate one metric value at explicit inputs")
    _add_common(p_eval)
    p_eval.add_argument("--quantity", choices=EVAL_QUANTITIES, required=True)
    p_eval.add_argument("--q", default=None, help="comma-separated base parameters")
    p_eval.add_argument("--n-coeffs", default=None, help="comma-separated unit normal coefficients")
    p_eval.add_argument("--r", type=float, required=True, help="tube radius")
    p_eval.add_argument("--qdot", default=None, help="comma-separated parameter velocity")
    p_eval.add_argument("--ndot", default=None, help="comma-separated normal-coefficient velocity")
    p_eval.set_defaults(fn=cmd_eval)

    p_verify = sub.add_parser("verify", help="check a closed-form model against the ODE pullback")
    _add_common(p_verify)
    p_verify.add_argument("--theorem", choices=["A", "B", "C"], required=True)
    p_verify.set_defaults(fn=cmd_verify)

    p_order = sub.add_parser("order", help="convergence-order study of a model residual")
    _add_common(p_order)
    p_order.add_argument(
        "--model", choices=["quadratic", "euclidean", "space_form"], default="quadratic"
    )
    p_order.set_defaults(fn=cmd_order)

    p_tan = sub.add_parser("tangency", help="first-order tangency test at the zero section")
    _add_common(p_tan)
    p_tan.set_defaults(fn=cmd_tangency)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
