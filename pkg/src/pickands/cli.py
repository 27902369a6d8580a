"""Command line interface.

Every subcommand accepts ``--config FILE``: a plain text file of
``key = value`` lines (``#`` starts a comment) whose keys are the long
option names.  Values from the file act as defaults, so options given on
the command line win.  List options take whitespace separated values;
separate models with ``;`` since model names may contain commas.

The number of worker processes for Monte Carlo runs is read from the
``PICKANDS_WORKERS`` environment variable (default 1) unless ``--workers``
is given.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .approximation import best_approx, min_distance, optimal_weight
from .copulas import from_name
from .empirical import pseudo_observations, read_sample
from .estimators import DependenceCurve, WeightSpec, estimate_curve
from .evdtest import TestConfig, power_approximation, run_test
from .experiments import (
    ANL_RHOS,
    K_GRID,
    MIXED_RHOS,
    run_k_sweep,
    run_mise,
    run_power_table,
    write_csv,
)
from .shape import clamp_bounds, endpoint_correct_cfg, endpoint_correct_pickands, full_correction


def read_config(path):
    """Parse ``key = value`` lines into a dict of strings."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = val
    return out


def _apply_config(parser, values):
    """Turn config strings into typed defaults of ``parser``."""
    actions = {a.dest: a for a in parser._actions}
    defaults = {}
    for key, raw in values.items():
        if key not in actions:
            raise ValueError(f"unknown config key {key!r} for this command")
        a = actions[key]
        conv = a.type or (lambda s: s)
        if isinstance(a, argparse._StoreTrueAction):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        elif a.nargs in ("+", "*"):
            parts = raw.split(";") if ";" in raw else raw.split()
            defaults[key] = [conv(p.strip()) for p in parts if p.strip()]
        else:
            defaults[key] = conv(raw)
        a.required = False  # satisfied by the file
    parser.set_defaults(**defaults)


def _out(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _curve_csv(curve, comments):
    lines = [f"# {c}" for c in comments] + ["t,value"]
    lines += [f"{t:.6g},{v:.12g}" for t, v in zip(curve.t, curve.values)]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def cmd_estimate(args):
    ps = pseudo_observations(read_sample(args.input))
    t = np.linspace(0, 1, args.grid)
    weight = WeightSpec.hk(args.k, args.eps)
    curve = estimate_curve(ps, args.estimator, t, weight, args.gamma)
    if args.correct != "none" and args.estimator == "pickands":
        curve = endpoint_correct_pickands(curve)
    elif args.correct != "none" and args.estimator == "cfg":
        curve = endpoint_correct_cfg(curve)
    if args.correct == "clamp":
        curve = clamp_bounds(curve)
    elif args.correct == "gcm":
        curve = full_correction(curve)
    comments = [
        f"pickands {__version__}",
        f"estimator={curve.label} correct={args.correct}",
        f"input={args.input} n={ps.n}",
    ]
    _out(_curve_csv(curve, comments), args.output)


def cmd_test(args):
    cfg = TestConfig(k=args.k, eps=args.eps, gamma=args.gamma, t_points=args.grid, B=args.B,
                     alpha=args.alpha, seed=args.seed, decision=args.decision)
    rep = run_test(read_sample(args.input), cfg)
    if args.replicates_out:
        np.savetxt(args.replicates_out, rep.replicates, header="replicate", comments="")
    _out(json.dumps(rep.to_dict(with_replicates=False), indent=2) + "\n", args.output)


def cmd_distance(args):
    C = from_name(args.model)
    weight = WeightSpec.hk(args.k, args.eps)
    t = np.linspace(0, 1, args.grid)
    curve = DependenceCurve(t, best_approx(C, weight, t), "A*")
    comments = [f"pickands {__version__}", f"model={C} weight={weight.label()}"]
    if C.is_pqd:
        comments.append(f"M_h={min_distance(C, weight):.10g}")
    if args.power:
        pa = power_approximation(C, weight, args.power)
        comments.append(f"sigma={pa.sigma:.10g} ratio={pa.ratio:.10g} power(n={args.power})={pa.power:.6g}")
    _out(_curve_csv(curve, comments), args.output)


def cmd_optimal_weight(args):
    C = from_name(args.model)
    res = optimal_weight(C, args.t, args.N, tol=args.tol)
    lines = [
        f"# pickands {__version__}",
        f"# model={C} t={args.t} N={args.N}",
        f"# V={res.V:.12g} kkt_residual={res.residual:.3e} iterations={res.iterations}",
        "location,mass",
    ]
    lines += [f"{x:.6g},{m:.12g}" for x, m in zip(res.weight.locations, res.weight.masses)]
    _out("\n".join(lines) + "\n", args.output)


def cmd_mise(args):
    reps = 5000 if args.full_scale else args.replicates
    rows = run_mise(args.model, tuple(args.estimators), args.n, reps, args.seed, np.linspace(0, 1, args.grid),
                    args.gamma, not args.raw, args.workers)
    _out(write_csv(rows, comments=[f"pickands {__version__} mise"]), args.output)


def cmd_ksweep(args):
    reps = 5000 if args.full_scale else args.replicates
    rhos = args.rhos or (ANL_RHOS if args.family == "asy-neg-log" else MIXED_RHOS)
    rows, summary = run_k_sweep(args.family, tuple(rhos), tuple(args.k_grid), args.n, reps, args.seed,
                                np.linspace(0, 1, args.grid), args.gamma, args.workers)
    comments = [f"pickands {__version__} ksweep", f"argmin={json.dumps(summary)}"]
    _out(write_csv(rows, comments=comments), args.output)


def cmd_power(args):
    trials = 1000 if args.full_scale else args.trials
    cfg = TestConfig(k=args.k, eps=args.eps, gamma=args.gamma, t_points=args.grid, B=args.B,
                     seed=args.seed, decision=args.decision)
    rows = run_power_table(args.model, args.n, trials, cfg, tuple(args.alphas), args.seed, args.workers)
    _out(write_csv(rows, comments=[f"pickands {__version__} power"]), args.output)


# ---------------------------------------------------------------------------
# parser


def _common(p, grid=101):
    p.add_argument("--config", help="key = value file with defaults")
    p.add_argument("--output", "-o", help="write here instead of stdout")
    p.add_argument("--grid", type=int, default=grid, help="number of t grid points")


def _mc(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $PICKANDS_WORKERS or 1)")
    p.add_argument("--full-scale", action="store_true", help="use the large replicate counts")


def build_parser():
    parser = argparse.ArgumentParser(prog="pickands", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"pickands {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate A(t) from a two-column CSV sample")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--estimator", choices=("pickands", "cfg", "md"), default="md")
    p.add_argument("--k", type=float, default=0.4)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--correct", choices=("none", "clamp", "gcm"), default="gcm")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("test", help="bootstrap test of extreme-value dependence")
    _common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=float, default=0.4)
    p.add_argument("--eps", type=float, default=0.02)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--B", type=int, default=200)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--decision", choices=("pvalue", "quantile"), default="pvalue")
    p.add_argument("--replicates-out", help="CSV file for the bootstrap replicates")
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("distance", help="best approximation A* and minimal distance of a model")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--k", type=float, default=0.4)
    p.add_argument("--eps", type=float, default=0.0)
    p.add_argument("--power", type=int, default=0, metavar="N", help="also report the power approximation at sample size N")
    p.set_defaults(func=cmd_distance)

    p = sub.add_parser("optimal-weight", help="variance-minimising discrete weight at one t")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--N", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_optimal_weight)

    p = sub.add_parser("mise", help="MISE of estimators for extreme-value models")
    _common(p)
    _mc(p)
    p.add_argument("--model", nargs="+", required=True)
    p.add_argument("--estimators", nargs="+", default=["pickands", "cfg", "md:0.4", "md:0.6"])
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--replicates", type=int, default=500)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--raw", action="store_true", help="skip endpoint and convexity corrections")
    p.set_defaults(func=cmd_mise)

    p = sub.add_parser("ksweep", help="MISE ratio curves over the weight exponent k")
    _common(p)
    _mc(p)
    p.add_argument("--family", choices=("asy-neg-log", "mixed", "gumbel", "huesler-reiss"), default="asy-neg-log")
    p.add_argument("--rhos", nargs="+", type=float, default=None)
    p.add_argument("--k-grid", nargs="+", type=float, default=list(K_GRID))
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--replicates", type=int, default=200)
    p.add_argument("--gamma", type=float, default=0.95)
    p.set_defaults(func=cmd_ksweep)

    p = sub.add_parser("power", help="rejection frequencies of the test")
    _common(p)
    _mc(p)
    p.add_argument("--model", nargs="+", required=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--B", type=int, default=200)
    p.add_argument("--alphas", nargs="+", type=float, default=[0.05, 0.1])
    p.add_argument("--k", type=float, default=0.4)
    p.add_argument("--eps", type=float, default=0.02)
    p.add_argument("--gamma", type=float, default=0.95)
    p.add_argument("--decision", choices=("pvalue", "quantile"), default="pvalue")
    p.set_defaults(func=cmd_power)
    return parser


def _find_config(argv):
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def main(argv=None):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    choices = parser._subparsers._group_actions[0].choices
    command = next((a for a in argv if a in choices), None)
    path = _find_config(argv)
    if command and path:
        try:
            _apply_config(choices[command], read_config(path))
        except (OSError, ValueError) as exc:
            parser.error(str(exc))
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValueError as exc:
        print(f"pickands: error: {exc}", file=sys.stderr)
        return 2
    return 0

if __name__ == "__main__":
    sys.exit(main())
