import argparse
from collections import Counter

from app.core.config import settings
from app.schemas.fixtures import FixtureStatus
from app.schemas.report import Budgets
from app.services.report_service import ReportService


def register(subparsers) -> None:
    parser = subparsers.add_parser("fixtures", help="transcribed fixture checks")
    actions = parser.add_subparsers(dest="action", required=True)
    verify = actions.add_parser("verify", help="recompute every fixture fact")
    verify.add_argument("path", nargs="?", default=settings.fixtures_path)
    verify.add_argument("--statuses", action="store_true",
                        help="also recompute contraction and self-replication statuses")
    verify.add_argument("--skip-classification", action="store_true",
                        help="skip the full 5832-automaton class table")
    verify.add_argument("--level", type=int, help="deepest SF level checked")
    verify.add_argument("--radius", type=int, help="deepest growth radius checked")
    verify.add_argument("--jobs", type=int)
    verify.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    budgets = Budgets.from_settings(sf_level=args.level, growth_radius=args.radius)
    verdicts = ReportService().verify_fixtures(
        args.path, budgets, statuses=args.statuses, jobs=args.jobs,
        classification=not args.skip_classification,
    )
    for verdict in verdicts:
        print(verdict.line())
    tally = Counter(v.status for v in verdicts)
    print(
        f"{tally[FixtureStatus.PASS]} passed, {tally[FixtureStatus.FAIL]} failed, "
        f"{tally[FixtureStatus.SKIPPED]} skipped"
    )
    return 1 if tally[FixtureStatus.FAIL] else 0
