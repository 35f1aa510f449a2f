"""Command line interface: run scenarios, export plots, list bundled files."""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .report import emit_plotdata
from .runner import run_scenario
from .scenario import ScenarioError, parse_scenario


def _bundled_dir():
    return resources.files("skewlab") / "scenarios"


def _resolve_scenario(arg):
    p = Path(arg)
    if p.exists():
        return p
    bundled = _bundled_dir() / f"{arg}.scn"
    if bundled.is_file():
        return bundled
    raise FileNotFoundError(f"no scenario file or bundled scenario named '{arg}'")


def cmd_run(args):
    try:
        path = _resolve_scenario(args.scenario)
        sc = parse_scenario(path)
    except (ScenarioError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out) if args.out else Path("out") / sc.name
    out.mkdir(parents=True, exist_ok=True)
    report = run_scenario(sc, seed=args.seed)
    report.write(out / "report.json")
    for check in report.grids:
        emit_plotdata(report, check, out)
    for name, result in report.checks.items():
        mark = {True: "ok", False: "UNEXPECTED", None: "-"}[result["as_expected"]]
        print(f"{name:15s} {result['verdict']:30s} [{mark}]")
    print(f"overall: {report.overall['verdict']}  (report: {out / 'report.json'})")
    return report.overall["exit_status"]


def cmd_plot(args):
    from .plots import render_grid

    report_path = Path(args.report)
    doc = json.loads(report_path.read_text())
    if args.check not in doc["checks"]:
        print(f"error: check '{args.check}' not present in the report", file=sys.stderr)
        return 2
    out_dir = Path(args.out) if args.out else report_path.parent
    out_dir.mkdir(parents=True, exist_ok=True)
    csvs = sorted(report_path.parent.glob(f"{args.check}_*.csv"))
    if not csvs:
        print(f"error: no grid CSV files for check '{args.check}' next to the report",
              file=sys.stderr)
        return 2
    made = []
    for csv in csvs:
        try:
            made.append(render_grid(csv, out_dir / f"{csv.stem}.png"))
        except ValueError:
            continue  # point tables are not rendered
    for p in made:
        print(p)
    return 0


def cmd_list(args):
    for entry in sorted(p.name for p in _bundled_dir().iterdir() if p.name.endswith(".scn")):
        print(entry[:-4])
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="skewlab",
        description="Numerical laboratory for skew-products over hyperbolic "
        "toral automorphisms: coboundary, foliation, integrability and "
        "contact checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario file and write the report")
    p_run.add_argument("scenario", help="scenario file path or bundled scenario name")
    p_run.add_argument("--out", help="output directory (default: out/<name>)")
    p_run.add_argument("--seed", type=int, default=None,
                       help="override the scenario seed for randomized sweeps")
    p_run.set_defaults(func=cmd_run)

    p_plot = sub.add_parser("plot", help="render figures from a report's grid CSVs")
    p_plot.add_argument("report", help="path to report.json")
    p_plot.add_argument("check", help="check name to plot")
    p_plot.add_argument("--out", help="directory for the PNG files")
    p_plot.set_defaults(func=cmd_plot)

    p_list = sub.add_parser("list-scenarios", help="list bundled scenarios")
    p_list.set_defaults(func=cmd_list)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
