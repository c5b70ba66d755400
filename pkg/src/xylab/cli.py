"""Command-line entry points.

    xylab run <config.json>         run an experiment config
    xylab oracle-check --n 6 --seed 42
    xylab fit <csv> --min-distance 5
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .eigencorrelator import fit_decay
from .experiments import ConfigError, oracle_suite, parse_config, run


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error: config is not valid JSON: {exc}", file=sys.stderr)
        return 2
    try:
        config = parse_config(raw)
        payload = run(config)
    except ConfigError as exc:
        print(f"error: invalid config: {exc}", file=sys.stderr)
        return 2
    verdicts = payload.get("verdicts", {})
    for name, ok in sorted(verdicts.items()):
        print(f"{'PASS' if ok else 'FAIL'}  {name}")
    print(f"artifacts written to {config.output_dir}")
    return 0


def _cmd_oracle_check(args) -> int:
    result = oracle_suite(n=args.n, seed=args.seed, realizations=args.realizations)
    for name in sorted(result["checks"]):
        ok = result["checks"][name]
        print(f"{'PASS' if ok else 'FAIL'}  {name}  (max error {result['max_errors'][name]:.3e})")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(result, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if result["all_pass"] else 1


def _cmd_fit(args) -> int:
    try:
        rows = np.loadtxt(args.csv, delimiter=",", skiprows=1, ndmin=2)
    except OSError as exc:
        print(f"error: cannot read csv: {exc}", file=sys.stderr)
        return 2
    distances = rows[:, 0].astype(int)
    values = np.zeros(int(distances.max()) + 1)
    values[distances] = rows[:, 1]
    try:
        fit = fit_decay(values, args.min_distance, args.max_distance)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(
        {"C": fit.C, "eta": fit.eta, "r_squared": fit.r_squared,
         "min_distance": fit.min_distance},
        indent=2, sort_keys=True,
    ))
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="xylab",
        description="Localization diagnostics for the disordered XY chain.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser(
        "run",
        help="run an experiment config (JSON)",
        description="Runs one experiment. Data CSVs use the column sets "
        "documented per experiment: eigencorrelator/lr_bound/correlations "
        "write (distance, mean, stderr, count); entanglement experiments "
        "write (ell, statistic, mean, stderr, count, strategy); transport "
        "writes (t, value) plus a summary with baseline/sup/bound/pass.",
    )
    p_run.add_argument("config", help="path to the experiment config JSON")
    p_run.set_defaults(fn=_cmd_run)

    p_oracle = sub.add_parser("oracle-check", help="run the brute-force identity suite")
    p_oracle.add_argument("--n", type=int, default=6)
    p_oracle.add_argument("--seed", type=int, default=42)
    p_oracle.add_argument("--realizations", type=int, default=5)
    p_oracle.add_argument("--output", help="optional JSON output path")
    p_oracle.set_defaults(fn=_cmd_oracle_check)

    p_fit = sub.add_parser("fit", help="exponential-decay fit of a profile CSV")
    p_fit.add_argument("csv", help="CSV with columns distance, mean, ...")
    p_fit.add_argument("--min-distance", type=int, default=1)
    p_fit.add_argument("--max-distance", type=int, default=None)
    p_fit.set_defaults(fn=_cmd_fit)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
