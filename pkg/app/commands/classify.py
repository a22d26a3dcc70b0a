import argparse
import csv

from app.schemas.report import Budgets
from app.services.report_service import ReportService
from app.commands.common import output_stream


def register(subparsers) -> None:
    parser = subparsers.add_parser("classify", help="minimal-symmetry classes of all 5832 automata")
    parser.add_argument("--out", help="write the class table CSV here")
    parser.add_argument("--jobs", type=int, help="worker processes (default AUTOMGRP_JOBS)")
    parser.add_argument("--cap", type=int, help="enumeration cap for the finite-group summary")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    summary = ReportService().run_classification(Budgets.from_settings(finite_check_cap=args.cap), args.jobs)
    table = summary.table

    if args.out:
        with output_stream(args.out) as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["number", "representative", "reduced_states", "small_group"])
            for n in sorted(table.class_rep):
                rep = table.class_rep[n]
                writer.writerow([n, rep, table.reduced_state_count[rep], table.small_group.get(rep, "")])

    print(f"classes: {summary.class_count}")
    print(f"classes below 3 states: {summary.small_class_count}")
    orders = ", ".join(f"{rep}:{order}" for rep, order in sorted(summary.finite_orders.items()))
    print(f"finite groups: {len(summary.finite_orders)} ({orders})")
    for span in summary.ranges:
        shared = span.representative if span.representative is not None else "split"
        print(f"range {span.first}..{span.last}: {shared}")
    return 0
