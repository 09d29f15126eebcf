"""Command-line interface.

Subcommands: compare (scheme comparison over transmit power), allocate
(throughput versus training rounds), ppp (key rate under Poisson-distributed
eavesdroppers), validate (fast self-checks). All runs are deterministic for
a given seed. With --out, the report path writes <out>.csv (per-trial rows
behind a '#'-commented config echo), <out>.json (summary aggregates), and a
figure <out>_<cmd>.png unless --no-plot; allocate additionally writes
<out>_curve.csv. Without --out, the selected format is printed to stdout.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .harness import (config_from_mapping, parse_config_file, rows_to_csv,
                      run_allocation_sweep, run_ppp_sweep, run_scheme_comparison,
                      run_validation_suite, summary_to_json)

_COMMANDS = {
    "compare": "compare secure throughput of each scheme over transmit power",
    "allocate": "sweep training rounds and locate the optimal allocation",
    "ppp": "key rate versus element count under PPP eavesdroppers",
    "validate": "run fast self-checks and report pass/fail counts",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irskg",
        description="Key generation with a randomly configured reflecting surface.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in _COMMANDS.items():
        sp = sub.add_parser(name, help=text, description=text)
        sp.add_argument("--config", metavar="FILE",
                        help="key=value config file ('#' comments allowed)")
        sp.add_argument("--seed", type=int, help="base seed (overrides config)")
        sp.add_argument("--trials", type=int, help="Monte Carlo trials (overrides config)")
        sp.add_argument("--out", metavar="STEM",
                        help="output stem; writes STEM.csv, STEM.json, and figures")
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="stdout/report format (default csv)")
        sp.add_argument("--set", action="append", default=[], dest="overrides",
                        metavar="KEY=VALUE", help="override one config key (repeatable)")
        sp.add_argument("--no-plot", action="store_true",
                        help="skip figure rendering on the report path")
    return parser


def _resolve_config(args):
    mapping = {}
    if args.config:
        mapping.update(parse_config_file(args.config))
    for item in args.overrides:
        if "=" not in item:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        key, value = item.split("=", 1)
        mapping[key.strip()] = value.strip()
    config = config_from_mapping(mapping)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    return config


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _run_validate(args) -> int:
    config = _resolve_config(args)
    checks = run_validation_suite(seed=config.seed)
    for name, passed, detail in checks:
        status = "ok  " if passed else "FAIL"
        line = f"{status} {name}"
        if detail:
            line += f": {detail}"
        print(line)
    n_pass = sum(1 for _, passed, _ in checks if passed)
    print(f"passed {n_pass}/{len(checks)} checks")
    if args.out:
        payload = {"checks": [{"name": n, "passed": p, "detail": d}
                              for n, p, d in checks],
                   "passed": n_pass, "total": len(checks)}
        _write(Path(args.out).with_suffix(".json"),
               summary_to_json(payload, config))
    return 0 if n_pass == len(checks) else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return _run_validate(args)
        config = _resolve_config(args)
        curves = None
        if args.command == "compare":
            rows, summary = run_scheme_comparison(config)
        elif args.command == "allocate":
            rows, summary, curves = run_allocation_sweep(config)
        else:
            rows, summary = run_ppp_sweep(config)

        if args.out is None:
            if args.format == "json":
                sys.stdout.write(summary_to_json(summary, config, rows=rows))
            else:
                sys.stdout.write(rows_to_csv(rows, config))
            return 0

        stem = Path(args.out)
        if stem.suffix in (".csv", ".json"):
            stem = stem.with_suffix("")
        if args.format == "json":
            _write(stem.with_suffix(".json"),
                   summary_to_json(summary, config, rows=rows))
        else:
            _write(stem.with_suffix(".csv"), rows_to_csv(rows, config))
            _write(stem.with_suffix(".json"), summary_to_json(summary, config))
            if curves is not None:
                _write(Path(f"{stem}_curve.csv"), rows_to_csv(curves, config))
        if not args.no_plot:
            from . import plotting
            fig_path = f"{stem}_{args.command}.png"
            Path(fig_path).parent.mkdir(parents=True, exist_ok=True)
            if args.command == "compare":
                plotting.save_comparison_figure(summary["aggregates"], fig_path)
            elif args.command == "allocate":
                plotting.save_allocation_figure(curves, summary["curve_marks"], fig_path)
            else:
                plotting.save_ppp_figure(summary["aggregates"], summary["theory"], fig_path)
            print(f"wrote {fig_path}")
        return 0
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


cli_main = main


if __name__ == "__main__":
    sys.exit(main())
