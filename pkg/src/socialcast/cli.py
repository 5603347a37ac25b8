"""Command-line interface.

Subcommands: simulate, compare, analyze, fit. Exit codes: 0 success,
2 configuration error, 3 runtime error, 4 analysis precondition unmet.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .analysis import LagHistogram, fit_zipf
from .config import load_config
from .delivery import fit_c1_c2
from .errors import AnalysisError, ConfigError
from .runner import analyze_run, apply_strategy, compare_strategies, run_scenario, write_comparison

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_ANALYSIS = 4


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if args.replication:
        cfg = apply_strategy(cfg, args.replication)
    if args.d2d:
        cfg = apply_strategy(cfg, f"d2d-{args.d2d}")
    manifest = run_scenario(cfg, args.out)
    print(f"wrote {len(manifest.outputs)} files to {args.out} "
          f"(config {manifest.config_hash[:12]}, seed {manifest.seed})")
    if not manifest.lag_law_consistent:
        print("warning: configured lag law keeps less than 95% of re-shares "
              "within 24 slots", file=sys.stderr)
    return EXIT_OK


def _cmd_compare(args) -> int:
    cfg = load_config(args.config)
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    rows = compare_strategies(cfg, strategies, args.seeds)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_comparison(rows, strategies[0], out / "comparison.csv")
    for r in rows:
        print(f"{r.strategy:16s} {r.metric:12s} mean={r.mean:.4f} "
              f"diff={r.diff_vs_base:+.4f} ci=[{r.ci_low:+.4f}, {r.ci_high:+.4f}]")
    return EXIT_OK


def _cmd_analyze(args) -> int:
    written = analyze_run(args.in_dir, args.fig, args.out)
    print(f"wrote {', '.join(written)} to {args.out}")
    return EXIT_OK


def _read_two_column_csv(path) -> list[tuple[float, float]]:
    rows = []
    with Path(path).open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ConfigError(f"{path}: empty file")
        for row in reader:
            if not row:
                continue
            rows.append((float(row[0]), float(row[1])))
    return rows


def _cmd_fit(args) -> int:
    data = _read_two_column_csv(args.in_file)
    if args.what == "zipf":
        hist = LagHistogram(tuple(int(l) for l, _ in data),
                            tuple(int(c) for _, c in data))
        print(f"s={fit_zipf(hist)!r}")
    else:
        c1, c2 = fit_c1_c2(data)
        print(f"c1={c1!r} c2={c2!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="socialcast",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its logs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--replication", choices=("static", "influence-index", "oracle"),
                   help="override the replication strategy")
    p.add_argument("--d2d", choices=("off", "flood", "coverage"),
                   help="override the D2D mode")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", help="paired strategy comparison over seeds")
    p.add_argument("--config", required=True)
    p.add_argument("--strategies", required=True,
                   help="comma-separated tokens, e.g. static,influence-index,oracle")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("analyze", help="produce plot-ready figure CSVs from a run")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--fig", type=int, choices=(2, 3, 4), required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("fit", help="fit the zipf lag law or the c1/c2 constants")
    p.add_argument("--what", choices=("zipf", "c1c2"), required=True)
    p.add_argument("--in", dest="in_file", required=True)
    p.set_defaults(func=_cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AnalysisError as exc:
        print(f"analysis precondition unmet: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FileNotFoundError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
