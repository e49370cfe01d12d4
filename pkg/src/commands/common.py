import argparse
import re

from src.conf.config import settings
from src.errors import InvalidInputError
from src.services.abgroup import FinAbGroup
from src.services.density import geometric_grid
from src.services.manifest import RunClock

_POWER = re.compile(r'^(\d+)\s*(?:\^|\*\*)\s*(\d+)$')
_SCIENTIFIC = re.compile(r'^(\d+)[eE](\d+)$')


def parse_bound(text: str) -> int:
    """Integers as ``48841``, ``10^6``, ``10**6`` or ``1e6`` (exact, no floats)."""
    text = text.strip().replace('_', '')
    if text.isdigit():
        return int(text)
    match = _POWER.match(text)
    if match:
        return int(match[1]) ** int(match[2])
    match = _SCIENTIFIC.match(text)
    if match:
        return int(match[1]) * 10 ** int(match[2])
    raise InvalidInputError(f'cannot parse bound {text!r}')


def parse_grid(text: str | None, X: int) -> list[int]:
    """``geometric:R`` (10, 10R, ... then X) or an explicit comma separated list."""
    if not text:
        return geometric_grid(X)
    if text.startswith('geometric:'):
        ratio = parse_bound(text.split(':', 1)[1])
        if ratio < 2:
            raise InvalidInputError('the grid ratio must be at least 2')
        return geometric_grid(X, start=10, ratio=ratio)
    return [parse_bound(part) for part in text.split(',') if part.strip()]


def bound(text: str) -> int:
    try:
        return parse_bound(text)
    except InvalidInputError as err:
        raise argparse.ArgumentTypeError(str(err))


def group_spec(text: str) -> FinAbGroup:
    try:
        return FinAbGroup.parse(text)
    except InvalidInputError as err:
        raise argparse.ArgumentTypeError(str(err))


def add_group(parser: argparse.ArgumentParser, required: bool = True):
    parser.add_argument('--group', type=group_spec, required=required, help='invariant factors, e.g. 2,2')


def add_output(parser: argparse.ArgumentParser):
    parser.add_argument('--out', help='write the artifact to this file (manifest next to it)')


def add_jobs(parser: argparse.ArgumentParser):
    parser.add_argument('--jobs', type=int, default=settings.default_jobs, help='enumeration worker processes')


def clock_for(args: argparse.Namespace, **bounds) -> RunClock:
    group = getattr(args, 'group', None)
    return RunClock(command=args.command, argv=list(getattr(args, 'argv', [])),
                    group=None if group is None else str(group),
                    bounds={key: value for key, value in bounds.items() if value is not None})
