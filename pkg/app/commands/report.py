import argparse
import logging

from app.repositories.json_repository import JsonRepository
from app.schemas.report import AnalysisReport, Budgets
from app.services.report_service import ReportService
from app.commands.common import add_automaton_arguments, resolve_automaton

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("report", help="per-automaton analysis report as JSON")
    add_automaton_arguments(parser)
    parser.add_argument("--level", type=int, help="deepest level for SF exponents")
    parser.add_argument("--radius", type=int, help="growth radius")
    parser.add_argument("--relator-radius", type=int)
    parser.add_argument("--spectrum-level", type=int, help="include a spectrum histogram at this level")
    parser.add_argument("--no-contraction", action="store_true", help="skip the nucleus and witness searches")
    parser.add_argument("--json", dest="json_path", help="write the report here instead of stdout")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    automaton, number = resolve_automaton(args)
    budgets = Budgets.from_settings(
        sf_level=args.level,
        growth_radius=args.radius,
        relator_radius=args.relator_radius,
        spectrum_level=args.spectrum_level,
        include_contraction=False if args.no_contraction else None,
    )
    service = ReportService()
    if number is not None:
        report = service.report(number, budgets)
    else:
        report = service.report_for(automaton, budgets)

    if args.json_path:
        JsonRepository(AnalysisReport).save(report, args.json_path)
    else:
        print(report.model_dump_json(indent=2))
    return 0
