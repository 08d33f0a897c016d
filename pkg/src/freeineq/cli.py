"""Command-line entry point.

Exit codes: 0 success, 1 input or domain error, 2 inequality violation.
Option values come from flags, then the JSON file named by ``FREEINEQ_CONFIG``,
then built-in defaults.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

from . import experiments
from .equilibrium import (
    double_well_demo, euler_lagrange_residual, global_transport_check,
    potential_from_spec, solve_equilibrium, transport_test_family,
)
from .functionals import entropy_H, fisher_I, fisher_J, total_variation
from .measures import BetaDensity, ScaledMeasure, load_measure
from .transport import wasserstein_p

log = logging.getLogger("freeineq")

DEFAULTS = {
    "seed": 0, "samples": 1000, "degree": 32, "cells": 2000, "jobs": 1, "out": None,
    "tolerance": 1e-9,
}
EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _fmt(v) -> str:
    """JSON text with every float at 17 significant digits."""
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isnan(v):
            return "null"
        if math.isinf(v):
            return '"inf"' if v > 0 else '"-inf"'
        return "%.17g" % v
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    return json.dumps(str(v))


def _csv_cell(v) -> str:
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "inf" if math.isinf(v) else "%.17g" % v
    return str(v)


def write_csv(rows, columns, fh, footer: str | None = None):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_csv_cell(r[c]) for c in columns])
    if footer:
        fh.write(f"# {footer}\n")


def load_config() -> dict:
    path = os.environ.get("FREEINEQ_CONFIG")
    if not path:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read FREEINEQ_CONFIG {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InputError("FREEINEQ_CONFIG must hold a JSON object")
    return cfg


def resolve(args, config: dict) -> dict:
    out = {}
    for key, default in DEFAULTS.items():
        flag = getattr(args, key, None)
        out[key] = flag if flag is not None else config.get(key, default)
    return out


def _emit_table(rows, columns, out, summary: dict, footer=None):
    if out:
        with open(out, "w", newline="") as fh:
            write_csv(rows, columns, fh, footer)
        print(_fmt(summary))
    else:
        buf = io.StringIO()
        write_csv(rows, columns, buf, footer)
        sys.stdout.write(buf.getvalue())
        print(_fmt(summary), file=sys.stderr)


def _value(fv) -> float:
    return math.inf if fv.is_infinite else float(fv.value)


def cmd_functionals(args, opts) -> int:
    try:
        mu, nu = load_measure(args.measure_a), load_measure(args.measure_b)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    w1 = wasserstein_p(mu, nu, 1)
    H = _value(entropy_H(mu, nu))
    I = _value(fisher_I(mu, nu))
    J = _value(fisher_J(mu, nu))
    TV = _value(total_variation(mu, nu))
    with np.errstate(invalid="ignore"):
        out = {
            "W1": w1, "H": H, "I": I, "J": J, "TV": TV,
            "slack_transport": 2 * H - w1 ** 2,
            "slack_lsi": J - 2 * H,
            "slack_hwi": math.sqrt(2 * I) * w1 - 0.5 * w1 ** 2 - H,
        }
    print(_fmt(out))
    if args.diagnostic:
        tol = float(opts["tolerance"])
        slacks = [out[k] for k in ("slack_transport", "slack_lsi", "slack_hwi")]
        if any(not math.isnan(s) and s < -tol for s in slacks):
            return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args, opts) -> int:
    n = int(opts["samples"])
    if n < 0:
        raise InputError("--samples must be nonnegative")
    rep = experiments.verify_inequalities(int(opts["seed"]), n, degree=int(opts["degree"]),
                                          jobs=int(opts["jobs"]), floor=-float(opts["tolerance"]))
    summary = {
        "seed": rep.seed, "samples": n, "degree": int(opts["degree"]),
        "violations": len(rep.violations), "min_slacks": rep.min_slacks,
        "sharpness": {str(c): s for c, s in rep.sharpness.items()},
    }
    _emit_table(rep.rows, experiments.VERIFY_COLUMNS, opts["out"], summary)
    return EXIT_OK if rep.ok else EXIT_VIOLATION


LP_COLUMNS = ("r", "terms", "tail_bound", "H", "lp_integral", "lp_information", "ratio", "bound")


def lp_grid(r_min: float, r_max: float, steps: int) -> np.ndarray:
    """``steps`` values of ``r`` with ``1 - r`` geometrically spaced."""
    if not 0 < r_min <= r_max < 1:
        raise InputError("need 0 < r_min <= r_max < 1")
    if steps < 1:
        raise InputError("--steps must be positive")
    if steps == 1:
        return np.array([r_min])
    return 1.0 - np.geomspace(1.0 - r_min, 1.0 - r_max, steps)


def cmd_lp_sweep(args, opts) -> int:
    if args.p < 1:
        raise InputError("p must be at least 1")
    rs = lp_grid(args.r_min, args.r_max, args.steps)
    table = experiments.lp_explorer(args.p, rs, args.eta)
    footer = None
    if table.slope is not None:
        footer = "slope=%.17g intercept=%.17g (lp_integral against -log(1-r))" % (table.slope, table.intercept)
    summary = {"p": args.p, "eta": args.eta, "rows": len(table.rows), "slope": table.slope}
    _emit_table(table.rows, LP_COLUMNS, opts["out"], summary, footer)
    return EXIT_OK


def cmd_equilibrium(args, opts) -> int:
    try:
        with open(args.potential) as fh:
            spec = json.load(fh)
        V = potential_from_spec(spec)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(str(exc)) from exc
    eq = solve_equilibrium(V, n_cells=int(opts["cells"]))
    report = {
        "potential": V.spec, "cells": int(opts["cells"]), "robin_constant": eq.robin_constant,
        "residual": euler_lagrange_residual(eq, V), "support": list(eq.support),
        "iterations": eq.iterations, "A": V.A, "B": V.B,
    }
    if spec.get("kind") == "poly" and len(V.spec["coeffs"]) == 3:
        c = V.spec["coeffs"]
        # quadratic field: the equilibrium is a semicircle of radius 2/sqrt(2 c2) around the minimum
        center, half = -c[1] / (2 * c[2]), 1.0 / math.sqrt(2 * c[2])
        report["W1_to_semicircle"] = wasserstein_p(
            eq.measure, ScaledMeasure(BetaDensity.semicircle(), half, center), 1)
    check = global_transport_check(V, eq, transport_test_family(eq, np.random.default_rng(opts["seed"])))
    report["transport_check"] = {
        "constant": check.certificate.constant, "L": check.certificate.L,
        "A_effective": check.certificate.A, "B_effective": check.certificate.B,
        "sensitivity": check.certificate.sensitivity,
        "empirical_constant": check.empirical_constant, "passed": check.passed,
        "min_relative_entropy": check.min_relative_entropy,
    }
    if spec.get("kind") == "double_well":
        demo = double_well_demo(V.spec["a1"], V.spec["a2"])
        report["double_well"] = {
            "hilbert_error": list(demo.hilbert_error), "oracle_error": list(demo.oracle_error),
            "fisher_integrals": list(demo.fisher_integrals), "W1_between": demo.w1_between,
            "certified": demo.certified,
        }
    if opts["out"]:
        m = eq.measure
        h = np.diff(m.edges)
        U = eq.effective_potential_cells(m.edges)
        rows = [{"x": x, "weight": w, "density": w / hh, "V": v, "U": u}
                for x, w, hh, v, u in zip(m.nodes, m.weights, h, V(m.nodes), U)]
        with open(opts["out"], "w", newline="") as fh:
            write_csv(rows, ("x", "weight", "density", "V", "U"), fh)
    print(_fmt(report))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--degree", type=int)
    common.add_argument("--cells", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--out")
    common.add_argument("--tolerance", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="freeineq", description="Free entropy, Fisher information and transport checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    f = sub.add_parser("functionals", parents=[common], help="functionals of two measure specs")
    f.add_argument("measure_a")
    f.add_argument("measure_b")
    f.add_argument("--diagnostic", action="store_true", help="exit 2 on a violated inequality")
    f.set_defaults(func=cmd_functionals)
    v = sub.add_parser("verify", parents=[common], help="random inequality sweep as CSV")
    v.set_defaults(func=cmd_verify)
    lp = sub.add_parser("lp-sweep", parents=[common], help="L^p information on the geometric family")
    lp.add_argument("--p", type=float, default=1.5)
    lp.add_argument("--r-min", type=float, default=0.9)
    lp.add_argument("--r-max", type=float, default=0.9999)
    lp.add_argument("--steps", type=int, default=10)
    lp.add_argument("--eta", type=float, default=1.0)
    lp.set_defaults(func=cmd_lp_sweep)
    e = sub.add_parser("equilibrium", parents=[common], help="equilibrium measure of a potential spec")
    e.add_argument("potential")
    e.set_defaults(func=cmd_equilibrium)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        opts = resolve(args, load_config())
        return args.func(args, opts)
    except (InputError, ValueError) as exc:
        print(f"freeineq: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
