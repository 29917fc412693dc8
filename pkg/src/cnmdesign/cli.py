"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 infeasible instance or violated
constraints, 3 node budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .documents import DocumentError, fraction_text, parse_design, parse_instance, serialize_design
from .evaluation import render_report, rows_from_csv, simulate, sweep
from .fixtures import fixture_text
from .model import Instance, Objective, StructuralError, check_feasibility
from .solver import BudgetExhausted, Infeasible, SolverConfig, SolverLimitError, export_lp, solve
from .solver.lp import InconsistentSolution, import_solution

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc.strerror}") from exc


def _load_instance(path: str) -> Instance:
    return parse_instance(_read(path))


def parse_count(text: str) -> int | tuple[int, int]:
    """``"3"`` -> 3, ``"2..6"`` -> (2, 6)."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            if lo > hi or lo < 1:
                raise ValueError
            return (lo, hi)
        value = int(text)
        if value < 1:
            raise ValueError
        return value
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None


def _objectives(text: str) -> list[Objective]:
    try:
        return [Objective(x.strip()) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"unknown objective in {text!r}") from None


def cmd_solve(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    config = SolverConfig(Objective(args.objective), args.controllers, args.budget, args.workers)
    try:
        outcome = solve(instance, config)
    except Infeasible as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExhausted as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except SolverLimitError as exc:
        raise InputError(str(exc)) from exc
    extra = {
        "objective_value": fraction_text(outcome.objective_value),
        "proof": outcome.proof.value,
        "stats": {
            "nodes_explored": outcome.stats.nodes_explored,
            "subsets_enumerated": outcome.stats.subsets_enumerated,
        },
    }
    _emit(serialize_design(instance, outcome.design, config.objective, extra), args.out)
    print(
        f"{outcome.proof.value}: {len(outcome.design.controllers)} controllers, "
        f"{config.objective.value} = {fraction_text(outcome.objective_value)} "
        f"({outcome.stats.wall_time:.2f}s)",
        file=sys.stderr,
    )
    return EXIT_OK if outcome.optimal else EXIT_BUDGET


def cmd_check(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    design = parse_design(_read(args.design), instance)
    report = check_feasibility(instance, design)
    _emit(json.dumps(report.to_dict(), indent=2) + "\n", args.out)
    for v in report.violations:
        print(f"{v.constraint}: {v.detail}", file=sys.stderr)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def cmd_simulate(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    design = parse_design(_read(args.design), instance)
    if args.disaster == "all":
        zones = list(instance.zones)
    else:
        try:
            zones = [instance.disasters.zone(args.disaster)]
        except KeyError:
            raise InputError(f"unknown disaster id {args.disaster!r}") from None
    reports = []
    for zone in zones:
        r = simulate(instance, design, zone)
        reports.append(
            {
                "disaster_id": r.disaster_id,
                "failed_controllers": list(r.failed_controllers),
                "failed_c2c_channels": r.failed_c2c_channels,
                "failed_s2c_channels": r.failed_s2c_channels,
                "disconnected_switches_raw": r.disconnected_switches_raw,
                "disconnected_switches_after_reassign": r.disconnected_switches_after_reassign,
                "islanded": r.islanded,
            }
        )
    _emit(json.dumps(reports, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    counts = args.controllers
    lo, hi = (counts, counts) if isinstance(counts, int) else counts
    result = sweep(instance, args.objectives, range(lo, hi + 1), args.workers, args.budget)
    for absent in result.absent:
        print(f"absent: {absent.objective} with {absent.controllers} controllers: {absent.reason}", file=sys.stderr)
    if not result.rows:
        print("no feasible (objective, count) pair", file=sys.stderr)
        return EXIT_INFEASIBLE
    _emit(render_report(result.rows, "csv"), args.out)
    if args.figure:
        _emit(render_report(result.rows, "svg"), args.figure)
    return EXIT_OK


def cmd_export_lp(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    config = SolverConfig(Objective(args.objective), args.controllers)
    _emit(export_lp(instance, config), args.out)
    return EXIT_OK


def cmd_import_solution(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    try:
        design = import_solution(instance, _read(args.solution))
    except InconsistentSolution as exc:
        raise InputError(str(exc)) from exc
    _emit(serialize_design(instance, design, Objective(args.objective)), args.out)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace) -> int:
    try:
        rows = rows_from_csv(_read(args.csv))
    except (ValueError, KeyError) as exc:
        raise InputError(f"bad sweep CSV: {exc}") from exc
    if not rows:
        raise InputError("sweep CSV has no rows")
    _emit(render_report(rows, "svg"), args.out)
    return EXIT_OK


def cmd_fixture(args: argparse.Namespace) -> int:
    _emit(fixture_text(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cnm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    objective = dict(choices=[o.value for o in Objective], default=Objective.MIN_RISK.value)

    p = sub.add_parser("solve", help="compute an optimal design")
    p.add_argument("instance")
    p.add_argument("--objective", **objective)
    p.add_argument("--controllers", type=parse_count, default=None, help="N or A..B")
    p.add_argument("--out")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=2_000_000, help="branch-and-bound nodes per controller set")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="verify a design against every constraint")
    p.add_argument("instance")
    p.add_argument("design")
    p.add_argument("--out")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("simulate", help="apply disaster zones to a design")
    p.add_argument("instance")
    p.add_argument("design")
    p.add_argument("--disaster", default="all")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="solve and simulate over a controller-count range")
    p.add_argument("instance")
    p.add_argument("--objectives", type=_objectives, default=list(Objective))
    p.add_argument("--controllers", type=parse_count, required=True, help="N or A..B")
    p.add_argument("--out", help="CSV output path")
    p.add_argument("--figure", help="SVG chart output path")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("export-lp", help="write the integer program in LP format")
    p.add_argument("instance")
    p.add_argument("--objective", **objective)
    p.add_argument("--controllers", type=parse_count, default=None)
    p.add_argument("--out")
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("import-solution", help="turn 'name value' lines into a design document")
    p.add_argument("instance")
    p.add_argument("solution")
    p.add_argument("--objective", **objective)
    p.add_argument("--out")
    p.set_defaults(func=cmd_import_solution)

    p = sub.add_parser("plot", help="render a sweep CSV as SVG charts")
    p.add_argument("csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("fixture", help="print the bundled NSFNet/EMP instance")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fixture)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InputError, DocumentError, StructuralError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
