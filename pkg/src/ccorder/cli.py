"""
Command-line entry point ``ccorder``.

Subcommands::

    ccorder detect   --x X.csv --y Y.csv --method NAME [--pfa P] [--rmax R] [--json]
    ccorder simulate (--preset NAME | --config FILE) --trials N --seed S --out OUT.csv
    ccorder hist     (--preset NAME | --config FILE) --rx R --ry R --s S --trials N --out OUT.csv

Exit codes: 0 success, 2 configuration or input error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .cca import DataMatrixPair
from .config import PRESETS, load_experiment, load_scenario, preset
from .detectors import DetectorConfig, Method, detect
from .errors import ComputationError, ConfigError
from .harness import (
    emit_csv,
    emit_histogram_csv,
    run_experiment,
    run_statistic_histogram,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _parse_complex(text, where):
    t = text.strip().replace(" ", "")
    if not t:
        raise ConfigError(f"{where}: empty entry")
    try:
        return complex(t.replace("i", "j").replace("I", "j"))
    except ValueError:
        raise ConfigError(f"{where}: cannot parse {text!r} as a complex number") from None


def read_matrix_csv(path) -> np.ndarray:
    """Complex matrix from CSV; entries like ``1.5-0.2i``, one row per component."""
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [r for r in csv.reader(fh) if any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise ConfigError(f"{path}: no data")
    width = len(rows[0])
    out = np.empty((len(rows), width), dtype=complex)
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ConfigError(f"{path}: row {i + 1} has {len(row)} entries, expected {width}")
        for j, cell in enumerate(row):
            out[i, j] = _parse_complex(cell, f"{path}:{i + 1}:{j + 1}")
    return out


def _decision_doc(decision, cfg):
    return {
        "method": cfg.method.value,
        "label": cfg.label,
        "d_hat": decision.d_hat,
        "r_x": decision.r_x_star,
        "r_y": decision.r_y_star,
    }


def _cmd_detect(args):
    pair = DataMatrixPair(read_matrix_csv(args.x), read_matrix_csv(args.y))
    cfg = DetectorConfig(Method.parse(args.method), args.pfa, args.rmax)
    decision = detect(pair, cfg)
    doc = _decision_doc(decision, cfg)
    if args.json:
        print(json.dumps(doc))
    else:
        print(f"{doc['label']}: d_hat={doc['d_hat']} r_x={doc['r_x']} r_y={doc['r_y']}")
    return EXIT_OK


def _experiment(args):
    if args.config:
        spec = load_experiment(args.config)
        changes = {}
        if args.trials is not None:
            changes["trials"] = args.trials
        if args.seed is not None:
            changes["seed"] = args.seed
        return replace(spec, **changes) if changes else spec
    return preset(args.preset,
                  trials=1000 if args.trials is None else args.trials,
                  seed=0 if args.seed is None else args.seed)


def _cmd_simulate(args):
    spec = _experiment(args)
    report = run_experiment(spec, workers=args.workers)
    emit_csv(report, args.out)
    errs = sum(r.err_trials for r in report.rows)
    print(f"wrote {len(report.rows)} rows to {args.out}"
          + (f" ({errs} detector errors counted)" if errs else ""))
    return EXIT_OK


def _cmd_hist(args):
    if args.config:
        scenario = load_scenario(args.config)
    else:
        scenario = preset(args.preset, trials=1).scenario
    hist = run_statistic_histogram(
        scenario, args.rx, args.ry, args.s, args.trials,
        seed=args.seed, p_fa=args.pfa, workers=args.workers,
    )
    emit_histogram_csv(hist, args.out)
    print(f"dof={hist.dof} threshold={hist.threshold!r} p_fa={hist.p_fa:g} "
          f"samples={hist.statistic.size} degenerate={hist.n_degenerate}")
    return EXIT_OK


def _source_group(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--preset", choices=PRESETS, help="built-in scenario")
    g.add_argument("--config", type=Path, help="JSON config file (schema 1)")


def build_parser() -> argparse.ArgumentParser:
    methods = ", ".join(m.value for m in Method)
    parser = argparse.ArgumentParser(
        prog="ccorder",
        description="Joint PCA rank and correlated-signal count selection for two data sets.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run one detector on a pair of data matrices")
    p.add_argument("--x", required=True, type=Path, help="CSV, n rows x M samples")
    p.add_argument("--y", required=True, type=Path, help="CSV, m rows x M samples")
    p.add_argument("--method", required=True, help=f"one of: {methods}")
    p.add_argument("--pfa", type=float, default=0.005)
    p.add_argument("--rmax", type=int, default=None)
    p.add_argument("--json", action="store_true", help="print a JSON object")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("simulate", help="Monte Carlo detection probabilities to CSV")
    _source_group(p)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("hist", help="samples of the Bartlett-Lawley statistic to CSV")
    _source_group(p)
    p.add_argument("--rx", required=True, type=int)
    p.add_argument("--ry", required=True, type=int)
    p.add_argument("--s", required=True, type=int)
    p.add_argument("--trials", required=True, type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pfa", type=float, default=0.01)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_cmd_hist)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"ccorder: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ComputationError as exc:
        print(f"ccorder: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
