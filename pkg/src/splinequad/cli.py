"""Command-line front-end: emit rules, run verification suites, sample kernels.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 internal
construction failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from decimal import ROUND_DOWN, Context, Decimal
from typing import Optional

import numpy as np

from . import error_analysis, oracle, quadrature
from .grid_basis import make_grid
from .quadrature import ConstructionError, QuadratureRule

__all__ = ["RuleDocument", "main"]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RuleDocument:
    """Serializable description of one rule."""

    schema_version: int
    n: int
    a: float
    b: float
    h: float
    nodes: list[float]
    weights: list[float]
    error_constant: float

    @classmethod
    def from_rule(cls, rule: QuadratureRule) -> "RuleDocument":
        grid = rule.grid
        return cls(
            schema_version=SCHEMA_VERSION,
            n=grid.n,
            a=grid.a,
            b=grid.b,
            h=grid.h,
            nodes=rule.nodes.tolist(),
            weights=rule.weights.tolist(),
            error_constant=error_analysis.error_constant(rule),
        )

    def to_json(self) -> str:
        # json emits repr floats: shortest strings that parse back bit-identically
        return json.dumps(
            {
                "schema_version": self.schema_version,
                "n": self.n,
                "a": self.a,
                "b": self.b,
                "h": self.h,
                "nodes": self.nodes,
                "weights": self.weights,
                "error_constant": self.error_constant,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RuleDocument":
        data = json.loads(text)
        return cls(**data)


_SIG16 = Context(prec=16, rounding=ROUND_DOWN)


def _fixed(v: float, ctx: Context) -> str:
    """Fixed-point decimal truncated to the context's significant digits."""
    return format(ctx.create_decimal(Decimal(v)), "f")


def _format_table(rule: QuadratureRule) -> str:
    n = rule.grid.n
    lines = ["i tau omega"]
    for i in range(n + 1):
        lines.append(
            f"{i + 1} {_fixed(rule.nodes[i], _SIG16)} {_fixed(rule.weights[i], _SIG16)}"
        )
    lines.append(
        f"# rows {n + 2}..{2 * n + 1} by symmetry: tau(i) = a+b-tau(2n+2-i), "
        f"omega(i) = omega(2n+2-i)"
    )
    return "\n".join(lines) + "\n"


def _format_csv(rule: QuadratureRule) -> str:
    # 17 significant digits parse back to the same doubles
    lines = ["i,tau,omega"]
    for i, (t, w) in enumerate(zip(rule.nodes, rule.weights), start=1):
        lines.append(f"{i},{t:.17g},{w:.17g}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _rule_from_args(args: argparse.Namespace) -> QuadratureRule:
    return quadrature.build_rule(make_grid(args.a, args.b, args.n))


def _cmd_rule(args: argparse.Namespace) -> int:
    rule = _rule_from_args(args)
    if args.format == "json":
        _emit(RuleDocument.from_rule(rule).to_json() + "\n", args.out)
    elif args.format == "csv":
        _emit(_format_csv(rule), args.out)
    else:
        _emit(_format_table(rule), args.out)
    return 0


def _cmd_kernel(args: argparse.Namespace) -> int:
    rule = _rule_from_args(args)
    profile = error_analysis.kernel_profile(rule, args.samples_per_cell)
    lines = ["t,K6"]
    for t, v in profile.samples:
        lines.append(f"{t:.17g},{v:.17g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_check(args: argparse.Namespace) -> int:
    """Verification suites over n = 1 .. n-max; nonzero exit on any failure.

    Each suite has a built-in gate; an explicit --tolerance replaces all of
    them (tighter or looser).
    """
    failures = 0

    def gate_for(default: float) -> float:
        return default if args.tolerance is None else args.tolerance

    def report(name: str, value: float, gate: float) -> None:
        nonlocal failures
        ok = value <= gate
        failures += 0 if ok else 1
        print(f"{name} value={value:.3e} gate={gate:.1e} "
              f"status={'PASS' if ok else 'FAIL'}")

    # basis exactness and layout, on [0, n] so every cell has unit width
    worst_exact = 0.0
    layout_ok = True
    for n in range(1, args.n_max + 1):
        rule = quadrature.build_rule(make_grid(0.0, float(n), n))
        rep = oracle.exactness_report(rule)
        worst_exact = max(worst_exact, rep.max_basis_residual)
        counts = rep.per_interval_node_counts
        layout_ok &= (
            sum(counts) == 2 * n + 1
            and counts.count(3) == 1
            and counts.count(2) == n - 1
        )
    report("exactness.max_basis_residual", worst_exact, gate_for(1e-13))
    print(f"layout.counts status={'PASS' if layout_ok else 'FAIL'}")
    failures += 0 if layout_ok else 1

    # seeded random splines: quadrature vs exact integral by linearity
    worst_rand = 0.0
    for n in range(1, args.n_max + 1):
        grid = make_grid(0.0, float(n), n)
        rule = quadrature.build_rule(grid)
        for seed in range(args.seeds):
            spline = oracle.random_spline(grid, seed)
            q = quadrature.apply_rule(rule, spline.value)
            scale = float(np.sum(np.abs(spline.c)))
            worst_rand = max(worst_rand, abs(q - spline.exact_integral()) / scale)
    report("exactness.random_spline_relative", worst_rand, gate_for(1e-12))

    # residue invariants along every visited state
    residue_ok = True
    for n in (args.n_max, 10_000):
        _, trace = quadrature.build_rule_with_trace(make_grid(0.0, 1.0, n))
        for st in trace.states:
            try:
                st.validate()
            except ConstructionError:
                residue_ok = False
            residue_ok &= oracle.cubic_rootfree_check(st, 1.0 / n)
    print(f"residues.invariants_and_cubic status={'PASS' if residue_ok else 'FAIL'}")
    failures += 0 if residue_ok else 1

    # Peano kernel on unit-interval grids
    worst_knot = 0.0
    worst_neg = 0.0
    for n in range(1, min(args.n_max, 20) + 1):
        rule = quadrature.build_rule(make_grid(0.0, 1.0, n))
        prof = error_analysis.kernel_profile(rule, 1000)
        vals = prof.samples[:, 1]
        worst_neg = max(worst_neg, max(0.0, -float(vals.min())))
        knots = rule.grid.knots()
        kv = [abs(error_analysis.peano_kernel(rule, float(t))) for t in knots]
        worst_knot = max(worst_knot, max(kv))
    report("peano.negativity", worst_neg, gate_for(1e-15))
    report("peano.knot_values", worst_knot, gate_for(1e-14))

    # two-third limit: nodes/weights far from the boundary match the pattern
    if args.n_max >= 20:
        worst_dev = 0.0
        for n in (20, min(args.n_max, 40)):
            rule = quadrature.build_rule(make_grid(0.0, float(n), n))
            dev = oracle.limit_rule_deviation(rule)
            worst_dev = max(worst_dev, float(dev[16 : 2 * n - 16].max()))
        report("limit.deviation_beyond_cell_9", worst_dev, gate_for(1e-15))

    # the single-cell rule must be three-point Gauss-Legendre
    rule1 = quadrature.build_rule(make_grid(0.0, 1.0, 1))
    gl_nodes = (0.5 - 0.5 * 0.6**0.5, 0.5, 0.5 + 0.5 * 0.6**0.5)
    gl_weights = (5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0)
    gl_dev = max(
        max(abs(t - g) for t, g in zip(rule1.nodes, gl_nodes)),
        max(abs(w - g) for w, g in zip(rule1.weights, gl_weights)),
    )
    ok = gl_dev <= gate_for(1e-14)
    failures += 0 if ok else 1
    print(f"n=1 equals 3-point Gauss-Legendre: {'PASS' if ok else 'FAIL'} "
          f"(deviation {gl_dev:.3e})")

    # report how far the single-sided even-middle variant is off
    _, trace = quadrature.build_rule_with_trace(make_grid(0.0, 10.0, 10))
    st = trace.states[-1]
    w_used = quadrature.middle_even(st, 1.0)
    w_single = quadrature.middle_even_single_sided(st, 1.0)
    print(f"diagnostics.even_middle_single_sided_defect value={abs(w_used - w_single):.6f}")

    print(f"max residual <= {max(worst_exact, worst_rand):.3e}")
    print(f"OVERALL: {'PASS' if failures == 0 else 'FAIL'}")
    return 0 if failures == 0 else 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="splinequad",
        description="Optimal quadrature rules for C1 quintic splines on "
        "uniform knot grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_rule = sub.add_parser("rule", help="emit one rule as table, CSV or JSON")
    p_rule.add_argument("--n", type=_positive_int, required=True,
                        help="number of subintervals (>= 1)")
    p_rule.add_argument("--a", type=float, default=0.0, help="left endpoint")
    p_rule.add_argument("--b", type=float, default=1.0, help="right endpoint")
    p_rule.add_argument("--format", choices=("table", "csv", "json"),
                        default="table")
    p_rule.add_argument("--out", default=None, help="write to file instead of stdout")
    p_rule.set_defaults(func=_cmd_rule)

    p_check = sub.add_parser("check", help="run the verification suites")
    p_check.add_argument("--n-max", type=_positive_int, default=50)
    p_check.add_argument("--seeds", type=_positive_int, default=20,
                         help="random splines per grid size")
    p_check.add_argument("--tolerance", type=float, default=None,
                         help="replace every built-in gate with this value")
    p_check.set_defaults(func=_cmd_check)

    p_kernel = sub.add_parser("kernel", help="emit sampled Peano kernel as CSV")
    p_kernel.add_argument("--n", type=_positive_int, required=True)
    p_kernel.add_argument("--a", type=float, default=0.0)
    p_kernel.add_argument("--b", type=float, default=1.0)
    p_kernel.add_argument("--samples-per-cell", type=_positive_int, default=64)
    p_kernel.add_argument("--out", default=None)
    p_kernel.set_defaults(func=_cmd_kernel)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
