"""Command-line entry point: ``adma {sumrate-cdf,nmse-sweep,lemma1}``."""
from __future__ import annotations

import argparse
import sys

from .config import ExperimentConfig, load_config
from .experiments import run_lemma1_study, run_nmse_sweep, run_sumrate_cdf, write_csv

RUNNERS = {
    "sumrate-cdf": run_sumrate_cdf,
    "nmse-sweep": run_nmse_sweep,
    "lemma1": run_lemma1_study,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adma", description="Angle-domain hybrid massive MIMO experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="INI file with an [experiment] section (defaults if omitted)")
        p.add_argument("--out", required=True, help="CSV output path")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument("--trials", type=int, help="override the trial count")
        p.add_argument("--workers", type=int, help="worker threads (results do not depend on it)")
    return parser


def _summarize(table) -> str:
    lines = []
    for (method, metric), pct in table.summary().items():
        if metric.endswith("_cdf"):
            continue
        lines.append(f"{method:>10s} {metric:<16s} p10={pct[10]:.4g} p50={pct[50]:.4g} p90={pct[90]:.4g}")
    return "\n".join(lines)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig()
        overrides = {k: getattr(args, k) for k in ("seed", "trials", "workers") if getattr(args, k) is not None}
        if overrides:
            cfg = cfg.replace(**overrides)
        table = RUNNERS[args.command](cfg)
        write_csv(table, args.out)
    except Exception as exc:  # one-line diagnostic, nonzero exit
        print(f"adma {args.command}: error: {exc}", file=sys.stderr)
        return 1
    print(_summarize(table))
    return 0


if __name__ == "__main__":
    sys.exit(main())
