"""Command line entry point.

Subcommands
-----------
simulate      run SNIPE on one spec (one trial by default), print final_dG
sweep         run a spec as written; write trace/summary CSV and an SVG plot
compare       run SNIPE, GROUSE and zero-filled SVD on identical streams
oracle-check  compare the closed-form interpolation with the direct solver

Exit status is 0 on success, 1 on configuration errors, 2 on runtime errors.
"""

import argparse
import logging
import os
import sys

import numpy as np

from ..baselines import oracle_equivalence_suite
from ..exceptions import ConfigInvalid
from .plot import emit_plot
from .report import emit_csv, emit_summary_csv
from .runner import run_experiment
from .spec import ESTIMATORS, load_spec

ORACLE_TOL = 1e-8


def _parser():
    parser = argparse.ArgumentParser(prog="snipe", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "run SNIPE on one configuration"),
        ("sweep", "run an experiment spec"),
        ("compare", "compare estimators on paired streams"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment spec (JSON)")
        p.add_argument("--seed", type=int, help="override the base stream seed")
        p.add_argument("--out", help="output directory (default: the config's outputs field)")
        p.add_argument("--trials", type=int, help="override the trial count")
        p.add_argument("--workers", type=int, help="parallel trial workers")
    p = sub.add_parser("oracle-check", help="closed-form vs direct least-change solver")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    return parser


def _load(args, estimators=None, default_trials=None):
    spec = load_spec(args.config)
    if args.trials is not None and args.trials < 1:
        raise ConfigInvalid("--trials must be positive")
    stream = dict(spec.stream)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigInvalid("--seed must be non-negative")
        stream["seed"] = args.seed
    trials = args.trials if args.trials is not None else default_trials
    return spec.with_overrides(
        stream=stream, trials=trials, estimators=estimators, outputs=args.out
    )


def _write_outputs(report, spec):
    os.makedirs(spec.outputs, exist_ok=True)
    base = os.path.join(spec.outputs, spec.name)
    emit_csv(report, base + ".csv")
    emit_summary_csv(report, base + "_summary.csv")
    emit_plot(report, base + ".svg")
    return base


def _print_finals(report, out):
    multi_axis = len(report.axis_values()) > 1
    multi_est = len(report.estimators()) > 1
    for est in report.estimators():
        for value in report.axis_values():
            finals = report.final_errors(est, value)
            label = []
            if multi_est:
                label.append(f"estimator={est}")
            if multi_axis:
                label.append(f"{report.axis_name}={value}")
            label.append(f"final_dG={np.mean(finals):.6g}")
            print(" ".join(label), file=out)


def cmd_simulate(args, out):
    spec = _load(args, estimators=("snipe",), default_trials=1)
    report = run_experiment(spec, workers=args.workers)
    _print_finals(report, out)
    _write_outputs(report, spec)


def cmd_sweep(args, out):
    spec = _load(args)
    report = run_experiment(spec, workers=args.workers)
    _print_finals(report, out)
    base = _write_outputs(report, spec)
    print(f"wrote {base}.csv", file=out)


def cmd_compare(args, out):
    spec = load_spec(args.config)
    ests = spec.estimators if len(spec.estimators) > 1 else ESTIMATORS
    spec = _load(args, estimators=ests)
    report = run_experiment(spec, workers=args.workers)
    _print_finals(report, out)
    base = _write_outputs(report, spec)
    print(f"wrote {base}.csv", file=out)


def cmd_oracle_check(args, out):
    if args.trials < 1:
        raise ConfigInvalid("--trials must be positive")
    res = oracle_equivalence_suite(args.trials, args.seed)
    print(f"instances={res['trials']}", file=out)
    print(f"max_rel_err={res['max_rel_err']:.3e}", file=out)
    print(f"max_feasibility_residual={res['max_feasibility']:.3e}", file=out)
    if res["max_rel_err"] < ORACLE_TOL:
        print("max_rel_err<1e-8", file=out)
        return 0
    print("max_rel_err>=1e-8", file=out)
    return 2


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.WARNING)
    try:
        return COMMANDS[args.command](args, out) or 0
    except FileNotFoundError as exc:
        if exc.filename != getattr(args, "config", None):
            print(f"snipe: error: {exc}", file=sys.stderr)
            return 2
        print(f"snipe: config file not found: {exc.filename}", file=sys.stderr)
        return 1
    except ConfigInvalid as exc:
        print(f"snipe: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - every other failure is a runtime error
        print(f"snipe: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
