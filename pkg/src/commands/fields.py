"""Enumeration commands: ``enumerate``, ``counts`` and ``wright``."""
import argparse
import logging

from src.commands.common import add_group, add_jobs, add_output, bound, clock_for, parse_grid
from src.database.db import get_db, init_db
from src.errors import EnumerationBudgetExceeded
from src.repository import runs as repository_runs
from src.schemas import CountPoint, FieldRecordModel, WrightReport
from src.services.manifest import write_artifact, write_report
from src.services.qfields import ORDERINGS, count_extensions, enumerate_extensions, wright_fit

logger = logging.getLogger(__name__)


def store_run(clock, max_disc: int, models: list[FieldRecordModel]) -> int:
    init_db()
    with get_db() as db:
        run = repository_runs.create_run(clock.manifest(), max_disc, db)
        repository_runs.add_fields(run, models, db)
        logger.info('archived %d records as run %d', len(models), run.id)
        return run.id


def cmd_enumerate(args: argparse.Namespace) -> int:
    clock = clock_for(args, max_disc=args.max_disc, ordering=args.ordering)
    status = 0
    try:
        records = list(enumerate_extensions(args.group, args.max_disc, ordering=args.ordering,
                                            include_etale=args.include_etale, jobs=args.jobs, budget=args.budget))
    except EnumerationBudgetExceeded as err:
        logger.warning('%s; writing the complete prefix of %d records', err, len(err.prefix))
        records = err.prefix
        clock.bounds['complete_below'] = str(err.frontier)
        status = err.exit_code
    models = [FieldRecordModel.from_record(record) for record in records]
    write_artifact((model.model_dump_json() for model in models), args.out, clock)
    if args.store:
        store_run(clock, args.max_disc, models)
    return status


def cmd_counts(args: argparse.Namespace) -> int:
    grid = parse_grid(args.grid, args.max_disc)
    counts = count_extensions(args.group, grid, ordering=args.ordering, jobs=args.jobs)
    lines = ['X,N(X)'] + [f'{X},{N}' for X, N in counts]
    write_artifact(lines, args.out, clock_for(args, max_disc=grid[-1], grid=args.grid or 'geometric:10'))
    return 0


def cmd_wright(args: argparse.Namespace) -> int:
    grid = parse_grid(args.grid, args.max_disc)
    counts = count_extensions(args.group, grid, jobs=args.jobs)
    fit = wright_fit(args.group, counts)
    exponents = fit.exponents
    report = WrightReport(group=str(args.group), power=str(exponents.power), logpower=str(exponents.logpower),
                          power_est=fit.power_est, c_est=fit.c_est,
                          counts=[CountPoint(X=X, N=N) for X, N in counts],
                          summary=f'N(X) ~ c X^a (log X)^{exponents.logpower}: predicted a = {exponents.power}, '
                                  f'fitted a = {fit.power_est:.4f}, c = {fit.c_est:.4g} '
                                  f'(counts are epimorphisms, not fields)')
    write_report(report, args.out, clock_for(args, max_disc=grid[-1]))
    return 0


def register(subparsers):
    parser = subparsers.add_parser('enumerate', help='A-extensions of Q up to a discriminant bound, as JSONL')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--ordering', choices=ORDERINGS, default='discriminant')
    parser.add_argument('--include-etale', action='store_true', help='also emit non-surjective characters')
    parser.add_argument('--budget', type=int, default=None, help='maximal number of search nodes')
    parser.add_argument('--store', action='store_true', help='archive the run in the field database')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_enumerate)

    parser = subparsers.add_parser('counts', help='counting function N(X) on a grid, as CSV')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--grid', help='geometric:R or a comma separated list of bounds')
    parser.add_argument('--ordering', choices=ORDERINGS, default='discriminant')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_counts)

    parser = subparsers.add_parser('wright', help='fit the counting function against its predicted growth')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--grid', help='geometric:R or a comma separated list of bounds')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_wright)
