"""Density commands: ``density``, ``wood-check``, ``dichotomy`` and ``trichotomy``."""
import argparse
import logging

from src.commands.common import add_group, add_jobs, add_output, bound, clock_for, parse_grid
from src.errors import InvalidInputError, PreconditionError
from src.schemas import CurvePoint, DichotomyReport, TrichotomyReport, WoodReport
from src.services.density import (ARCHIMEDEAN, density_curve, dichotomy_check, fixed_base_contexts, forcing_twist,
                                  parse_local_spec, trichotomy_report, wood_check)
from src.services.manifest import write_artifact, write_report
from src.services.qfields import ORDERINGS

logger = logging.getLogger(__name__)


def place(text: str) -> int:
    if text.strip().lower() in ('inf', 'infinity', 'oo', '0'):
        return ARCHIMEDEAN
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f'{text!r} is not a place')


def parse_conditions(A, pairs: list[str]) -> list:
    """``PLACE=SPEC`` items, e.g. ``3=ramified:1`` or ``inf=conj:0``."""
    specs = []
    for item in pairs:
        where, sep, text = item.partition('=')
        if not sep:
            raise InvalidInputError(f'condition {item!r} must read PLACE=SPEC')
        try:
            specs.append(parse_local_spec(A, place(where), text))
        except argparse.ArgumentTypeError as err:
            raise InvalidInputError(str(err))
    return specs


def cmd_density(args: argparse.Namespace) -> int:
    grid = parse_grid(args.grid, args.max_disc)
    if args.predicate == 'local':
        if not args.condition:
            raise InvalidInputError('--predicate local needs at least one --condition')
        predicate = parse_conditions(args.group, args.condition)
    else:
        predicate = args.predicate
    curve = density_curve(args.group, grid, predicate, jobs=args.jobs)
    lines = curve.to_csv().splitlines()
    write_artifact(lines, args.out, clock_for(args, max_disc=grid[-1], predicate=args.predicate))
    return 0


def cmd_wood(args: argparse.Namespace) -> int:
    if len(args.place) != len(args.spec):
        raise InvalidInputError('give one --spec per --place')
    specs = [parse_local_spec(args.group, v, text) for v, text in zip(args.place, args.spec)]
    result = wood_check(args.group, specs, args.max_radical, ordering=args.ordering, jobs=args.jobs)
    labels = [f'{"inf" if v == ARCHIMEDEAN else v}={text}' for v, text in zip(args.place, args.spec)]
    secondary = '' if args.ordering == 'radical' else ' (discriminant ordering: secondary check)'
    report = WoodReport(group=str(args.group), ordering=args.ordering, max_bound=args.max_radical, specs=labels,
                        model=str(result.model), empirical=str(result.empirical), hits=result.hits,
                        total=result.total, band=result.band, within_band=result.within_band,
                        summary=f'model {float(result.model):.4f}, empirical {float(result.empirical):.4f} '
                                f'over {result.total} extensions, band {result.band:.4f}: '
                                f'{"within" if result.within_band else "outside"} band{secondary}')
    write_report(report, args.out, clock_for(args, max_radical=args.max_radical, ordering=args.ordering))
    return 0


def cmd_dichotomy(args: argparse.Namespace) -> int:
    contexts = fixed_base_contexts(args.group, args.max_disc, jobs=args.jobs)
    if not contexts:
        raise PreconditionError(f'no {args.group}-extension with discriminant at most {args.max_disc}')
    if args.base is None and args.force:
        index = next((i for i, ctx in enumerate(contexts) if forcing_twist(ctx) is not None), 0)
    elif args.base is None:
        index = next((i for i, ctx in enumerate(contexts) if ctx.split_in_family), 0)
    elif 0 <= args.base < len(contexts):
        index = args.base
    else:
        raise InvalidInputError(f'--base must lie in [0, {len(contexts)})')
    ctx = contexts[index]
    if not args.force and not ctx.split_in_family:
        logger.warning('no lift of base %d has all decomposition groups on S in the family C', index)
    twist = None
    if args.force:
        twist = forcing_twist(ctx)
        if twist is None:
            raise PreconditionError('no A[l]-twist on S forces a full decomposition group')
    result = dichotomy_check(ctx, twist, parse_grid(args.grid, args.max_disc))
    twist_text = None if twist is None else {
        str(p): f'tame={list(point.char.tame_image)} wild={list(point.char.wild_image)} frob={list(point.frobenius)}'
        for p, point in twist.items()}
    report = DichotomyReport(group=str(args.group), base_group=str(ctx.base_group),
                             base_ramified=list(ctx.base_char.primes), base_disc=ctx.base_discriminant,
                             lift_disc=ctx.lift.discriminant, places=list(ctx.places),
                             split_in_family=ctx.split_in_family, twist=twist_text,
                             predicted=result.predicted, curve=CurvePoint.rows(result.curve), trend=result.trend,
                             agrees=result.agrees,
                             summary=f'base {index} of {len(contexts)}, S = {list(ctx.places)}, '
                                     f'{"forced" if twist else "totally split"} conditions: predicted limit '
                                     f'{result.predicted}, observed trend {result.trend}')
    write_report(report, args.out, clock_for(args, max_disc=args.max_disc, base=index))
    return 0


def cmd_trichotomy(args: argparse.Namespace) -> int:
    grid = parse_grid(args.grid, args.max_disc)
    result = trichotomy_report(args.group, args.max_disc, grid, jobs=args.jobs)
    verdict = result.verdict
    report = TrichotomyReport(group=str(args.group), verdict=verdict.tag.value, ell=verdict.ell,
                              quotient=str(verdict.quotient), curve=CurvePoint.rows(result.curve),
                              consistency=result.consistency,
                              summary=f'A/A[{verdict.ell}] = {verdict.quotient}: limit {verdict.tag.value}; '
                                      f'HNP curve up to {grid[-1]} is {result.consistency}')
    write_report(report, args.out, clock_for(args, max_disc=grid[-1]))
    return 0


def register(subparsers):
    parser = subparsers.add_parser('density', help='HNP density curve over a discriminant grid, as CSV')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--grid', help='geometric:R or a comma separated list of bounds')
    parser.add_argument('--predicate', choices=('hnp', 'hnp-fail', 'local'), default='hnp')
    parser.add_argument('--condition', action='append', default=[], help='PLACE=SPEC, for --predicate local')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_density)

    parser = subparsers.add_parser('wood-check', help='compare a box probability with empirical frequencies')
    add_group(parser)
    parser.add_argument('--place', type=place, action='append', required=True, help='a prime, or inf')
    parser.add_argument('--spec', action='append', required=True,
                        help='split, unramified[:F|*], ramified:T[:F|*], local:T:W[:F|*] or conj:C|*')
    parser.add_argument('--max-radical', type=bound, required=True)
    parser.add_argument('--ordering', choices=ORDERINGS, default='radical')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_wood)

    parser = subparsers.add_parser('dichotomy', help='predicted 0/1 limit against lifts of one base extension')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--grid', help='geometric:R or a comma separated list of bounds')
    parser.add_argument('--base', type=int,
                        help='index of the base extension, by discriminant (default: the first with a lift split in C)')
    conditions = parser.add_mutually_exclusive_group()
    conditions.add_argument('--split', action='store_true', help='totally split conditions on S (default)')
    conditions.add_argument('--force', action='store_true', help='force a full decomposition group on S')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_dichotomy)

    parser = subparsers.add_parser('trichotomy', help='limit classification next to the HNP curve')
    add_group(parser)
    parser.add_argument('--max-disc', type=bound, required=True)
    parser.add_argument('--grid', help='geometric:R or a comma separated list of bounds')
    add_jobs(parser)
    add_output(parser)
    parser.set_defaults(handler=cmd_trichotomy)
