"""
The Hasse norm principle for abelian extensions, decided on exterior squares.

For an A-extension with decomposition groups D_v, the norm principle holds exactly
when the images of D_v ^ D_v generate A ^ A. The family C of subgroups <a, b> with
l * b = 0 (l the smallest prime dividing |A|) carries the limiting behaviour of the
local map for non-cyclic A.
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, isprime

from src.conf.config import settings
from src.errors import InvalidInputError, PreconditionError, ResourceLimitError
from src.services.abgroup import (AltPairing, FinAbGroup, Subgroup, all_pairings, is_cyclic, pullback_pairing,
                                  quotient_map, subgroup_from_generators, torsion, torsion_elements,
                                  wedge_image_join, wedge_square)

logger = logging.getLogger(__name__)


class LimitTag(str, Enum):
    ONE = 'One'
    OPEN_INTERVAL = 'OpenInterval'


@dataclass(frozen=True)
class DecompFamily:
    """The decomposition groups of one extension, as subgroups of its Galois group."""
    ambient: FinAbGroup
    groups: tuple[Subgroup, ...] = field(default=())

    def __post_init__(self):
        groups = tuple(self.groups)
        object.__setattr__(self, 'groups', groups)
        for H in groups:
            if H.ambient != self.ambient:
                raise InvalidInputError('decomposition group does not live in the Galois group')

    def with_group(self, H: Subgroup) -> 'DecompFamily':
        return DecompFamily(self.ambient, self.groups + (H,))


@dataclass(frozen=True)
class FamilyC:
    ambient: FinAbGroup
    ell: int
    members: tuple[Subgroup, ...]


@dataclass(frozen=True)
class LimitVerdict:
    tag: LimitTag
    ell: int
    quotient: FinAbGroup


def smallest_prime_divisor(A: FinAbGroup) -> int:
    if A.order == 1:
        raise InvalidInputError('the trivial group has no prime divisor')
    return int(min(factorint(A.order)))


def _check_ell(A: FinAbGroup, ell: int):
    if A.order == 1:
        raise InvalidInputError('the trivial group has no prime divisor')
    if not isprime(ell) or A.order % ell:
        raise InvalidInputError(f'{ell} is not a prime dividing {A.order}')
    if ell != smallest_prime_divisor(A):
        raise InvalidInputError(f'{ell} is not the smallest prime dividing {A.order}')


def hnp_holds(A: FinAbGroup, D: DecompFamily) -> bool:
    """
    Decide the Hasse norm principle from decomposition groups.

    :param A: FinAbGroup: the Galois group
    :param D: DecompFamily: decomposition groups at the places of interest
    :return: True when the images of H ^ H, H in D, generate A ^ A
    """
    if D.ambient != A:
        raise InvalidInputError('decomposition family belongs to another group')
    return wedge_image_join(A, D.groups).is_full()


@lru_cache(maxsize=256)
def enumerate_family_C(A: FinAbGroup, ell: int, exact_order: bool = False) -> FamilyC:
    """
    Every subgroup <a, b> of A with l * b = 0, deduplicated and sorted by Hermite form.

    With ``exact_order`` only b of order exactly l are used.
    """
    _check_ell(A, ell)
    members: dict[tuple, Subgroup] = {}
    for b in torsion_elements(A, ell):
        if exact_order and not any(b):
            continue
        for a in A.elements():
            H = subgroup_from_generators(A, (a, b))
            members.setdefault(H.hnf, H)
    logger.debug('family C of %s at %d has %d members', A, ell, len(members))
    return FamilyC(A, ell, tuple(members[key] for key in sorted(members)))


@lru_cache(maxsize=256)
def _family_wedge_join(A: FinAbGroup, ell: int, exact_order: bool) -> Subgroup:
    return wedge_image_join(A, enumerate_family_C(A, ell, exact_order).members)


def local_map_injective(A: FinAbGroup, fixed: DecompFamily, ell: int, exact_order: bool = False) -> bool:
    """Whether A ^ A is generated by the wedge images of the family C and of the fixed groups."""
    if fixed.ambient != A:
        raise InvalidInputError('fixed decomposition groups belong to another group')
    joined = _family_wedge_join(A, ell, exact_order).join(wedge_image_join(A, fixed.groups))
    return joined.is_full()


def zero_one_verdict(A: FinAbGroup, ell: int, fixed: DecompFamily) -> int:
    return int(local_map_injective(A, fixed, ell))


def classify_limit(A: FinAbGroup) -> LimitVerdict:
    """One when A / A[l] is cyclic, OpenInterval otherwise."""
    if A.order == 1:
        raise InvalidInputError('the limit is only defined for non-trivial groups')
    ell = smallest_prime_divisor(A)
    B, _ = quotient_map(A, torsion(A, ell))
    tag = LimitTag.ONE if is_cyclic(B) else LimitTag.OPEN_INTERVAL
    return LimitVerdict(tag, ell, B)


def verify_claim_twogen(A: FinAbGroup) -> bool:
    """Check that every two-generated subgroup of A is in the family C (A / A[l] cyclic)."""
    verdict = classify_limit(A)
    if verdict.tag is not LimitTag.ONE:
        raise PreconditionError(f'{A} / {A}[{verdict.ell}] is not cyclic')
    family = {H.hnf for H in enumerate_family_C(A, verdict.ell).members}
    elements = list(A.elements())
    for i, a in enumerate(elements):
        for b in elements[i:]:
            if subgroup_from_generators(A, (a, b)).hnf not in family:
                logger.warning('<%s, %s> in %s is not in the family C', a, b, A)
                return False
    return True


def construct_killing_pairing(A: FinAbGroup) -> AltPairing:
    """
    A non-zero alternating pairing on A that vanishes on every member of the family C.

    It is the pairing f(e_1, e_2) = 1 / d_1 on B = A / A[l], pulled back to A.
    """
    ell = smallest_prime_divisor(A)
    B, pi = quotient_map(A, torsion(A, ell))
    if is_cyclic(B):
        raise PreconditionError(f'{A} / {A}[{ell}] is cyclic; no pairing kills the family C')
    values = [Fraction(0)] * len(wedge_square(B).pairs)
    values[0] = Fraction(1, B.invariant_factors[0])
    return pullback_pairing(AltPairing(B, tuple(values)), pi)


def hnp_oracle_bruteforce(A: FinAbGroup, D: DecompFamily, bound: int | None = None) -> bool:
    """
    Decide the norm principle by searching for a non-zero alternating pairing that
    vanishes on every decomposition group.
    """
    bound = settings.oracle_bound if bound is None else bound
    if A.order > bound:
        raise ResourceLimitError(f'|A| = {A.order} exceeds the oracle bound {bound}')
    if D.ambient != A:
        raise InvalidInputError('decomposition family belongs to another group')
    for f in itertools.islice(all_pairings(A), 1, None):
        if all(f.vanishes_on(H) for H in D.groups):
            return False
    return True
