"""Field archive commands: ``runs`` and ``export``."""
import argparse

from src.commands.common import add_output, clock_for
from src.database.db import get_db, init_db
from src.errors import InvalidInputError
from src.repository import runs as repository_runs
from src.schemas import RunSummary
from src.services.manifest import write_artifact


def cmd_runs(args: argparse.Namespace) -> int:
    init_db()
    with get_db() as db:
        runs = repository_runs.list_runs(args.limit, args.offset, db)
        lines = [RunSummary.model_validate(run).model_dump_json() for run in runs]
    for line in lines:
        print(line)
    return 0


def cmd_export(args: argparse.Namespace) -> int:
    """Re-emit an archived run exactly as it was written."""
    init_db()
    with get_db() as db:
        run = repository_runs.get_run(args.run_id, db)
        if run is None:
            raise InvalidInputError(f'no archived run with id {args.run_id}')
        payloads = [field.payload for field in repository_runs.get_fields(run.id, db)]
    write_artifact(payloads, args.out, clock_for(args, run_id=args.run_id))
    return 0


def register(subparsers):
    parser = subparsers.add_parser('runs', help='list archived enumeration runs')
    parser.add_argument('--limit', type=int, default=20)
    parser.add_argument('--offset', type=int, default=0)
    parser.set_defaults(handler=cmd_runs)

    parser = subparsers.add_parser('export', help='re-emit the JSONL of an archived run')
    parser.add_argument('run_id', type=int)
    add_output(parser)
    parser.set_defaults(handler=cmd_export)
