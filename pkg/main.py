import argparse
import logging
import sys

from src.commands import density, fields, groups, runs
from src.conf.config import settings
from src.errors import HnpError

logger = logging.getLogger('hnp')

LOG_FORMAT = '%(levelname)-5.5s [%(name)s] %(message)s'


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='hnp-density',
        description='Hasse norm principle decisions and density experiments for abelian extensions of Q.')
    parser.add_argument('--log-level', default=settings.log_level,
                        choices=('DEBUG', 'INFO', 'WARNING', 'ERROR'), type=str.upper)
    parser.add_argument('--version', action='version', version=f'%(prog)s {settings.tool_version}')
    subparsers = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')
    for module in (groups, fields, density, runs):
        module.register(subparsers)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=args.log_level, format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger().setLevel(args.log_level)
    try:
        return args.handler(args)
    except HnpError as err:
        logger.debug('command %s failed', args.command, exc_info=True)
        print(f'error: {err}', file=sys.stderr)
        return err.exit_code


if __name__ == '__main__':
    sys.exit(main())
