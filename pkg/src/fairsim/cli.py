"""Command-line entry point.

Verbs:
  run     single simulation; writes a one-row CSV, a JSON report and a chart
  sweep   expand a config file's [sweep] section and run every point
  plot    render charts from an existing results CSV
  theory  endorsement-probability curves from the closed-form model
"""

import argparse
import csv
import dataclasses
import logging
import sys
from pathlib import Path

from . import harness, plotting
from .harness import PRESETS, SimulationConfig, SweepSpec


def _add_common(p):
    p.add_argument("config", type=Path, nargs="?", default=None,
                   help="INI file overriding the preset")
    p.add_argument("--preset", choices=sorted(PRESETS), default="desk",
                   help="base parameter set (default: desk)")
    p.add_argument("--out", type=Path, default=Path("out"),
                   help="output directory (default: ./out)")


def _add_overrides(p):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--profile", choices=("small", "medium", "large"), default=None,
                   dest="delay_profile")
    p.add_argument("--infected-peers", type=int, default=None)
    p.add_argument("--infected-orderers", type=int, default=None)
    p.add_argument("--withhold-votes", action="store_true", default=None)
    p.add_argument("--mitigation", choices=("off", "dowdall", "borda"), default=None)


def _load(args) -> tuple:
    if args.config is not None:
        base, spec = harness.load_config_file(args.config, preset=args.preset)
    else:
        base, spec = PRESETS[args.preset], None
    overrides = {}
    for name in ("seed", "delay_profile", "infected_peers", "infected_orderers",
                 "withhold_votes", "mitigation"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    if overrides:
        base = dataclasses.replace(base, **overrides)
        if spec is not None:
            spec.base = base
    return base, spec


def cmd_run(args) -> int:
    config, _ = _load(args)
    result = harness.run_one(config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "run.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=harness.CSV_COLUMNS)
        writer.writeheader()
        writer.writerow(harness.csv_row(config, result.report))
    harness.write_json(out / "run.json", harness.report_json(config, result))
    plotting.plot_run_report(result.report, out / "run_violations.svg")
    report = result.report
    print(f"wrote {csv_path}")
    score = (f"{float(report.score_target):.4f}"
             if report.score_target is not None else "n/a")
    print(f"target score {score} over g={report.g} games; "
          f"{report.num_blocks} blocks; goal_met={report.goal_met}")
    return 0


def cmd_sweep(args) -> int:
    config, spec = _load(args)
    if spec is None or (not spec.axes and not spec.seeds):
        spec = spec or SweepSpec(config)
        print("note: no [sweep] section found; running the base config once",
              file=sys.stderr)
    csv_path = harness.run_sweep(spec, args.out, json_mirrors=not args.no_json)
    table = plotting.read_table(csv_path)
    out = Path(args.out)
    if spec.axes:
        x = next(iter(spec.axes))
        group = args.group or (list(spec.axes)[1] if len(spec.axes) > 1 else None)
        plotting.plot_sweep_grid(table, x, group, out / "sweep_fairness.svg")
        plotting.plot_metric(table, x, "score_target", group, out / "sweep_score.svg")
    print(f"wrote {csv_path} ({len(table)} rows)")
    return 0


def cmd_plot(args) -> int:
    table = plotting.read_table(args.table)
    columns = set(table[0]) if table else set(harness.CSV_COLUMNS)
    for name in (args.x, args.group, None if args.y == "all" else args.y):
        if name is not None and name not in columns:
            print(f"error: unknown column {name!r}", file=sys.stderr)
            return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.y == "all":
        path = plotting.plot_sweep_grid(table, args.x, args.group,
                                        out / f"{args.x}_fairness.svg")
    else:
        path = plotting.plot_metric(table, args.x, args.y, args.group,
                                    out / f"{args.x}_{args.y}.svg")
    print(f"wrote {path}")
    return 0


def cmd_theory(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = plotting.plot_endorsement_theory(args.n, args.q, args.b, out / "endorsement_theory.svg")
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairsim",
        description="Deterministic fairness simulator for an endorse-then-order "
                    "blockchain network under programmatic attack.")
    parser.add_argument("-v", "--verbose", action="store_true",
                        help="log per-run progress")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one simulation")
    _add_common(p_run)
    _add_overrides(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep")
    _add_common(p_sweep)
    p_sweep.add_argument("--group", default=None,
                         help="column used to split chart lines")
    p_sweep.add_argument("--no-json", action="store_true",
                         help="skip per-run JSON mirrors")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_plot = sub.add_parser("plot", help="chart an existing results CSV")
    p_plot.add_argument("table", type=Path, help="results CSV from run/sweep")
    p_plot.add_argument("--x", required=True, help="column for the x axis")
    p_plot.add_argument("--y", default="all",
                        help="column for the y axis, or 'all' for the 6-panel grid")
    p_plot.add_argument("--group", default=None)
    p_plot.add_argument("--out", type=Path, default=Path("out"))
    p_plot.set_defaults(fn=cmd_plot)

    p_theory = sub.add_parser("theory", help="plot endorsement probability curves")
    p_theory.add_argument("--n", type=int, default=20, help="total peers")
    p_theory.add_argument("--q", type=int, default=10, help="endorsement quorum")
    p_theory.add_argument("--b", type=int, nargs="+", default=[0, 2, 5, 8],
                          help="sabotaged-peer counts, one curve each")
    p_theory.add_argument("--out", type=Path, default=Path("out"))
    p_theory.set_defaults(fn=cmd_theory)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
