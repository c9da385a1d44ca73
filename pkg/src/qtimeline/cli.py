"""Command-line front end: run scenario files, emit probability tables.

Subcommands: ``simulate <file>``, ``wigner [param flags]``, ``validate <file>``,
``export <file>``.  Exit codes: 0 ok, 1 runtime query error, 2 validation
error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass

from .hilbert import DomainError
from .probability import (
    ConditioningOnNullEvent,
    OutcomeQuery,
    ProbabilityTable,
    clamp_probability,
    conditional,
    full_table,
    joint,
    marginal,
)
from .scenario import Query, ScenarioError, dump_scenario, load_scenario, parse_query_string
from .timeline import HistoryState, build_history
from .wigner import FRIEND, WIGNER, WignerScenario, tables

PRETTY_DIGITS = 6
CSV_DIGITS = 12


@dataclass(frozen=True)
class ResultRow:
    t: float
    assignment: str
    kind: str
    value: float


def _fmt(value: float, digits: int) -> str:
    return f"{clamp_probability(value):.{digits}g}"


def _assignment_str(assignment, schedule) -> str:
    order = [d for d in schedule.detector_labels if d in assignment]
    return ",".join(f"{d}={assignment[d]}" for d in order)


def _evaluate_query(history: HistoryState, query: Query) -> list[ResultRow]:
    schedule = history.schedule
    if query.mode == "table":
        table = full_table(history, query.t)
        return [
            ResultRow(query.t, _assignment_str(dict(zip(table.detectors, key)), schedule), "joint", value)
            for key, value in table.rows
        ]
    if query.mode == "conditional":
        value = conditional(history, query.target, query.given, query.t)
        text = f"{_assignment_str(query.target, schedule)}|{_assignment_str(query.given, schedule)}"
        return [ResultRow(query.t, text, "conditional", value)]
    covered = set(query.assignment) == set(schedule.detector_labels)
    q = OutcomeQuery(query.assignment, query.t)
    if covered:
        return [ResultRow(query.t, _assignment_str(query.assignment, schedule), "joint", joint(history, q))]
    return [ResultRow(query.t, _assignment_str(query.assignment, schedule), "marginal", marginal(history, q))]


def _write_csv(path: str, rows: list[ResultRow]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "assignment", "kind", "value"])
        for row in rows:
            writer.writerow([f"{row.t:g}", row.assignment, row.kind, _fmt(row.value, CSV_DIGITS)])


def _print_rows(rows: list[ResultRow]) -> None:
    if not rows:
        return
    width = max(len(r.assignment) for r in rows)
    for row in rows:
        print(f"  {row.kind:<12} t={row.t:<8g} {row.assignment:<{width}}  {_fmt(row.value, PRETTY_DIGITS)}")


def _cmd_simulate(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except (ScenarioError, OSError) as err:
        print(f"{args.file}: {err}", file=sys.stderr)
        return 2

    history = build_history(scenario.psi0, scenario.t0, scenario.h_system, scenario.schedule)

    if args.query:
        try:
            queries = [parse_query_string(text, scenario.schedule) for text in args.query]
        except ScenarioError as err:
            print(f"{err}", file=sys.stderr)
            return 2
    else:
        queries = list(scenario.queries)

    all_rows: list[ResultRow] = []
    failed = False
    for index, query in enumerate(queries):
        try:
            rows = _evaluate_query(history, query)
        except (ConditioningOnNullEvent, KeyError) as err:
            message = err.args[0] if err.args else str(err)
            print(f"query {index}: {message}", file=sys.stderr)
            failed = True
            continue
        if query.mode == "table":
            print(f"full table at t={query.t:g}")
            _print_rows(rows)
            print(f"  {'total':<12} {'':<10} {'':<{max(len(r.assignment) for r in rows)}}  "
                  f"{_fmt(sum(r.value for r in rows), PRETTY_DIGITS)}")
        else:
            _print_rows(rows)
        all_rows.extend(rows)

    if args.csv:
        _write_csv(args.csv, all_rows)
    return 1 if failed else 0


def _parse_complex(text: str) -> complex:
    parts = text.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse complex value {text!r}; use 're' or 're,im'")


def _normalized_pair(x: complex, y: complex, name: str) -> tuple[complex, complex]:
    norm = math.sqrt(abs(x) ** 2 + abs(y) ** 2)
    if norm == 0.0:
        raise ValueError(f"{name} amplitudes cannot both be zero")
    return x / norm, y / norm


def _grid(table: ProbabilityTable, row_labels, col_labels, corner: str) -> str:
    width = max(
        PRETTY_DIGITS + 6,
        *(len(str(c)) for c in col_labels),
        *(len(str(r)) for r in row_labels),
        len(corner),
    )
    lines = ["  " + f"{corner:<{width}}" + "".join(f"{c:>{width}}" for c in col_labels)]
    for r in row_labels:
        cells = "".join(f"{_fmt(table.value({FRIEND: r, WIGNER: c}), PRETTY_DIGITS):>{width}}" for c in col_labels)
        lines.append("  " + f"{r:<{width}}" + cells)
    return "\n".join(lines)


def _single_column(table: ProbabilityTable) -> str:
    width = max(len(key[0]) for key, _ in table.rows)
    return "\n".join(
        f"  {key[0]:<{width}}  {_fmt(value, PRETTY_DIGITS)}" for key, value in table.rows
    )


def _cmd_wigner(args) -> int:
    try:
        a, b = _normalized_pair(_parse_complex(args.a), _parse_complex(args.b), "(a, b)")
        alpha, beta = _normalized_pair(
            _parse_complex(args.alpha), _parse_complex(args.beta), "(alpha, beta)"
        )
        scenario = WignerScenario(a=a, b=b, alpha=alpha, beta=beta, t_m=args.tm, t_n=args.tn)
    except (ValueError, DomainError) as err:
        print(f"invalid parameters: {err}", file=sys.stderr)
        return 2

    t = args.t if args.t is not None else scenario.t_n + 1.0
    try:
        result = tables(scenario, t)
    except ConditioningOnNullEvent as err:
        print(f"conditional tables undefined at these parameters: {err}", file=sys.stderr)
        return 1
    f_labels = [key[0] for key, _ in result.marginal_f.rows]
    w_labels = [key[0] for key, _ in result.marginal_w.rows]

    print(f"joint p(f,w) at t={t:g}")
    print(_grid(result.joint, f_labels, w_labels, "f\\w"))
    print(f"\nmarginal p(w) at t={t:g}")
    print(_single_column(result.marginal_w))
    print(f"\nmarginal p(f) at t={t:g}")
    print(_single_column(result.marginal_f))
    print(f"\nconditional p(w|f) at t={t:g}")
    print(_grid(result.cond_w_given_f, f_labels, w_labels, "f\\w"))
    print(f"\nconditional p(f|w) at t={t:g}")
    print(_grid(result.cond_f_given_w, f_labels, w_labels, "f\\w"))

    if args.csv:
        rows = []
        for key, value in result.joint.rows:
            rows.append(ResultRow(t, f"{FRIEND}={key[0]},{WIGNER}={key[1]}", "joint", value))
        for key, value in result.marginal_w.rows:
            rows.append(ResultRow(t, f"{WIGNER}={key[0]}", "marginal", value))
        for key, value in result.marginal_f.rows:
            rows.append(ResultRow(t, f"{FRIEND}={key[0]}", "marginal", value))
        for key, value in result.cond_w_given_f.rows:
            rows.append(ResultRow(t, f"{WIGNER}={key[1]}|{FRIEND}={key[0]}", "conditional", value))
        for key, value in result.cond_f_given_w.rows:
            rows.append(ResultRow(t, f"{FRIEND}={key[0]}|{WIGNER}={key[1]}", "conditional", value))
        _write_csv(args.csv, rows)
    return 0


def _cmd_validate(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except (ScenarioError, OSError) as err:
        print(f"{args.file}: {err}", file=sys.stderr)
        return 2
    n_events = len(scenario.schedule)
    print(f"{args.file}: ok ({n_events} event{'s' if n_events != 1 else ''}, "
          f"{len(scenario.queries)} quer{'ies' if len(scenario.queries) != 1 else 'y'})")
    return 0


def _cmd_export(args) -> int:
    try:
        scenario = load_scenario(args.file)
    except (ScenarioError, OSError) as err:
        print(f"{args.file}: {err}", file=sys.stderr)
        return 2
    text = dump_scenario(scenario)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qtimeline",
        description="Probabilities of scheduled quantum measurements at a fixed clock reading.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the queries of a scenario file")
    p_sim.add_argument("file")
    p_sim.add_argument(
        "--query",
        action="append",
        metavar="SPEC",
        help="run SPEC instead of the file's queries, e.g. 'F=up,W=yes@t=3.0' "
             "or 'F=up|W=yes@t=3.0' or 'full-table@t=3.0' (repeatable)",
    )
    p_sim.add_argument("--csv", metavar="PATH", help="also write rows as CSV")
    p_sim.set_defaults(func=_cmd_simulate)

    p_wig = sub.add_parser("wigner", help="friend/Wigner scenario tables from parameters")
    p_wig.add_argument("--a", default="0.7071067811865476", help="system up amplitude, 're' or 're,im'")
    p_wig.add_argument("--b", default="0.7071067811865476", help="system down amplitude")
    p_wig.add_argument("--alpha", default="1", help="yes-state up,up amplitude")
    p_wig.add_argument("--beta", default="0", help="yes-state down,down amplitude")
    p_wig.add_argument("--tm", type=float, default=1.0, help="friend measurement time")
    p_wig.add_argument("--tn", type=float, default=2.0, help="Wigner measurement time")
    p_wig.add_argument("--t", type=float, default=None, help="clock reading (default tn + 1)")
    p_wig.add_argument("--csv", metavar="PATH", help="also write all table entries as CSV")
    p_wig.set_defaults(func=_cmd_wigner)

    p_val = sub.add_parser("validate", help="check a scenario file without running it")
    p_val.add_argument("file")
    p_val.set_defaults(func=_cmd_validate)

    p_exp = sub.add_parser("export", help="re-emit a scenario file in canonical form")
    p_exp.add_argument("file")
    p_exp.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    p_exp.set_defaults(func=_cmd_export)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
