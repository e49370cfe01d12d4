"""Commands on groups alone: ``group``, ``hnp`` and ``verify``."""
import argparse
import logging
import sys
from pathlib import Path

from src.commands.common import add_output, clock_for, group_spec
from src.conf.config import settings
from src.errors import InvalidInputError
from src.schemas import GroupReport, VerifyEntry, VerifyReport, load_decomp_family
from src.services.abgroup import FinAbGroup, abelian_groups_up_to, is_cyclic, torsion, wedge_square
from src.services.hnp import (DecompFamily, LimitTag, classify_limit, construct_killing_pairing, enumerate_family_C,
                              hnp_holds, local_map_injective, verify_claim_twogen)
from src.services.manifest import write_report

logger = logging.getLogger(__name__)


def group_report(A: FinAbGroup) -> GroupReport:
    wedge = wedge_square(A).structure
    report = GroupReport(group=str(A), invariant_factors=list(A.invariant_factors), order=A.order,
                         cyclic=is_cyclic(A), wedge=str(wedge), summary='')
    if A.order == 1:
        report.summary = 'trivial group'
        return report
    verdict = classify_limit(A)
    report.ell = verdict.ell
    report.torsion = str(torsion(A, verdict.ell).structure)
    report.quotient = str(verdict.quotient)
    report.family_size = len(enumerate_family_C(A, verdict.ell).members)
    report.verdict = verdict.tag.value
    report.summary = (f'A = {A}, |A| = {A.order}, l = {verdict.ell}, A[l] = {report.torsion}, '
                      f'A/A[l] = {report.quotient}, wedge^2 A = {wedge}, |C| = {report.family_size}, '
                      f'limit: {verdict.tag.value}')
    return report


def cmd_group(args: argparse.Namespace) -> int:
    write_report(group_report(args.spec), args.out, clock_for(args))
    return 0


def cmd_hnp(args: argparse.Namespace) -> int:
    """Print HOLDS or FAILS; the exit status is 0 or 1 accordingly."""
    try:
        text = sys.stdin.read() if args.decomp == '-' else Path(args.decomp).read_text(encoding='utf-8')
    except OSError as err:
        raise InvalidInputError(f'cannot read {args.decomp}: {err.strerror}') from err
    A, family = load_decomp_family(text)
    if A != args.spec:
        raise InvalidInputError(f'decomposition family is for {A}, not {args.spec}')
    holds = hnp_holds(A, family)
    print('HOLDS' if holds else 'FAILS')
    return 0 if holds else 1


def verify_group(A: FinAbGroup) -> VerifyEntry:
    verdict = classify_limit(A)
    entry = VerifyEntry(group=str(A), verdict=verdict.tag.value, consistent=False, passed=False)
    if verdict.tag is LimitTag.ONE:
        entry.twogen = verify_claim_twogen(A)
        claim = entry.twogen
    else:
        pairing = construct_killing_pairing(A)
        members = enumerate_family_C(A, verdict.ell).members
        entry.killing_pairing = [str(value) for value in pairing.values]
        entry.killing_ok = not pairing.is_zero() and all(pairing.vanishes_on(H) for H in members)
        claim = entry.killing_ok
    injective = local_map_injective(A, DecompFamily(A), verdict.ell)
    entry.consistent = (verdict.tag is LimitTag.ONE) == injective
    entry.passed = bool(claim and entry.consistent)
    return entry


def cmd_verify(args: argparse.Namespace) -> int:
    limit = settings.verify_max_bound
    partial = args.bound > limit
    if partial:
        logger.warning('bound %d exceeds the configured maximum %d; checking up to %d', args.bound, limit, limit)
    checked_bound = min(args.bound, limit)
    entries = []
    order = None
    for A in abelian_groups_up_to(checked_bound):
        if A.order != order:
            order = A.order
            logger.info('verifying groups of order %d', order)
        entries.append(verify_group(A))
    failures = [entry.group for entry in entries if not entry.passed]
    passed = not failures
    summary = (f'{len(entries)} groups of order <= {checked_bound} checked, '
               f'{len(failures)} failure(s)' + (' (partial: resource cap)' if partial else ''))
    report = VerifyReport(bound=args.bound, checked=len(entries), passed=passed, partial=partial,
                          failures=failures, groups=entries, summary=summary)
    write_report(report, args.out, clock_for(args, bound=args.bound))
    if partial:
        return 3
    return 0 if passed else 1


def register(subparsers):
    parser = subparsers.add_parser('group', help='structure report of a finite abelian group')
    parser.add_argument('spec', type=group_spec, help='invariant factors, e.g. 4,4')
    add_output(parser)
    parser.set_defaults(handler=cmd_group)

    parser = subparsers.add_parser('hnp', help='decide the Hasse norm principle from decomposition groups')
    parser.add_argument('spec', type=group_spec)
    parser.add_argument('decomp', help='JSON file with the decomposition groups, - for stdin')
    parser.set_defaults(handler=cmd_hnp)

    parser = subparsers.add_parser('verify', help='check the structural claims on all groups up to an order')
    parser.add_argument('--bound', type=int, required=True)
    add_output(parser)
    parser.set_defaults(handler=cmd_verify)
