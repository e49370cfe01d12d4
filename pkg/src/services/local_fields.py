"""
Characters of the local unit groups Z_p^x with values in a finite abelian group A.

Z_p^x is mu_{p-1} x (1 + pZ_p) for odd p and {+-1} x (1 + 4Z_2) for p = 2. A local
character is fixed by the image of a generator of the first factor (the tame
image: the Teichmueller lift of a primitive root, or -1) and the image of a
topological generator of the second (the wild image: 1 + p, or 5).
"""
from dataclasses import dataclass
from functools import cached_property, lru_cache

from sympy import isprime, multiplicity, primitive_root
from sympy.ntheory.residue_ntheory import discrete_log as sympy_discrete_log, is_primitive_root

from src.errors import InvalidInputError
from src.services.abgroup import (Element, FinAbGroup, Homomorphism, Subgroup, subgroup_from_generators,
                                  torsion_elements)


@lru_cache(maxsize=None)
def tame_generator(p: int) -> int:
    """Least primitive root mod p that is still primitive mod p^2; -1 when p = 2."""
    if p == 2:
        return -1
    g = int(primitive_root(p))
    while not (is_primitive_root(g, p) and pow(g, p - 1, p * p) != 1):
        g += 1
    return g


def principal_generator(p: int) -> int:
    return 5 if p == 2 else 1 + p


@dataclass(frozen=True)
class DiscreteLog:
    """x = zeta^tame * u^wild in (Z/p^e)^x, zeta and u the fixed generators."""
    p: int
    e: int
    tame: int
    tame_modulus: int
    wild: int
    wild_modulus: int
    tame_base: int
    wild_base: int


@lru_cache(maxsize=1 << 18)
def discrete_log(p: int, e: int, x: int, tame_modulus: int | None = None) -> DiscreteLog:
    """
    Split x modulo p^e along the fixed generators.

    :param p: int: the prime
    :param e: int: precision, at least 1
    :param x: int: a unit modulo p
    :param tame_modulus: int | None: only return the tame part modulo this divisor of
        p - 1 (of 2 when p = 2); the wild part is unaffected
    :return: DiscreteLog with the tame part modulo p - 1 (or 2) and the wild part
        modulo p^(e-1) (or 2^(e-2))
    """
    if e < 1:
        raise InvalidInputError('precision must be at least 1')
    if x % p == 0:
        raise InvalidInputError(f'{x} is not a unit modulo {p}')
    if p == 2:
        return _discrete_log_two(e, x, tame_modulus)

    full = p - 1
    modulus = full if tame_modulus is None else tame_modulus
    if full % modulus:
        raise InvalidInputError(f'{modulus} does not divide {full}')
    g = tame_generator(p)
    if modulus == 1:
        tame = 0
    else:
        step = full // modulus
        tame = int(sympy_discrete_log(p, pow(x % p, step, p), pow(g, step, p), order=modulus))

    pe = p ** e
    wild_modulus = p ** (e - 1)
    if e == 1:
        wild = 0
    else:
        # u^(p-1) = x^(p-1) for the principal part u of x, and (p-1) is invertible mod p^(e-1)
        u = pow(pow(x % pe, full, pe), pow(full, -1, wild_modulus), pe)
        wild = int(sympy_discrete_log(pe, u, 1 + p, order=wild_modulus)) % wild_modulus
    return DiscreteLog(p, e, tame, modulus, wild, wild_modulus, g, 1 + p)


def _discrete_log_two(e: int, x: int, tame_modulus: int | None) -> DiscreteLog:
    modulus = 2 if tame_modulus is None else tame_modulus
    if modulus not in (1, 2):
        raise InvalidInputError('the tame part at 2 lives modulo 2')
    negative = e >= 2 and x % 4 == 3
    tame = int(negative) % modulus
    wild_modulus = 2 ** (e - 2) if e >= 2 else 1
    if e <= 2:
        wild = 0
    else:
        pe = 2 ** e
        u = (-x if negative else x) % pe
        wild = int(sympy_discrete_log(pe, u, 5, order=wild_modulus)) % wild_modulus
    return DiscreteLog(2, e, tame, modulus, wild, wild_modulus, -1, 5)


@dataclass(frozen=True, order=True)
class LocalChar:
    p: int
    group: FinAbGroup
    tame_image: Element
    wild_image: Element

    def __post_init__(self):
        A = self.group
        tame, wild = A.check(self.tame_image), A.check(self.wild_image)
        object.__setattr__(self, 'tame_image', tame)
        object.__setattr__(self, 'wild_image', wild)
        if any(A.scale(2 if self.p == 2 else self.p - 1, tame)):
            raise InvalidInputError(f'tame image {tame} at {self.p} has the wrong order')
        wild_order = A.element_order(wild)
        if wild_order != self.p ** multiplicity(self.p, wild_order):
            raise InvalidInputError(f'wild image {wild} at {self.p} is not of {self.p}-power order')

    @property
    def ramified(self) -> bool:
        return any(self.tame_image) or any(self.wild_image)

    @cached_property
    def wild_depth(self) -> int:
        """m with p^m the order of the wild image."""
        return int(multiplicity(self.p, self.group.element_order(self.wild_image)))

    @cached_property
    def inertia(self) -> Subgroup:
        return subgroup_from_generators(self.group, (self.tame_image, self.wild_image))

    @property
    def precision(self) -> int:
        """The exponent e such that the character factors through (Z/p^e)^x."""
        return self.wild_depth + (2 if self.p == 2 else 1)

    @cached_property
    def conductor_exponent(self) -> int:
        """Largest conductor exponent over all characters of the group composed with this one."""
        return self.precision if self.ramified else 0

    def key(self) -> tuple:
        return self.p, self.tame_image, self.wild_image

    def evaluate(self, x: int) -> Element:
        """The image of the unit x under this character."""
        if not self.ramified:
            return self.group.zero
        A = self.group
        log = discrete_log(self.p, self.precision, x % (self.p ** self.precision),
                           A.element_order(self.tame_image))
        return A.add(A.scale(log.tame, self.tame_image), A.scale(log.wild, self.wild_image))

    def push(self, pi: Homomorphism) -> 'LocalChar':
        return LocalChar(self.p, pi.target, pi(self.tame_image), pi(self.wild_image))


def unramified(p: int, A: FinAbGroup) -> LocalChar:
    return LocalChar(p, A, A.zero, A.zero)


def local_char_space(p: int, A: FinAbGroup) -> list[LocalChar]:
    """
    Every character Z_p^x -> A, the unramified one first.

    :param p: int: a prime
    :param A: FinAbGroup: the target group
    :return: pairs (tame image in A[p-1] or A[2], wild image in the p-primary part)
    """
    if not isprime(p):
        raise InvalidInputError(f'{p} is not prime')
    tames = list(torsion_elements(A, 2 if p == 2 else p - 1))
    wilds = list(torsion_elements(A, p ** multiplicity(p, A.exponent)))
    return [LocalChar(p, A, tame, wild) for tame in tames for wild in wilds]


def conductor_exponent(chi: Homomorphism, psi: LocalChar) -> int:
    """Conductor exponent at p of the character chi composed with psi."""
    if chi.source != psi.group:
        raise InvalidInputError('the character is not defined on the local target group')
    T = chi.target
    wild_order = T.element_order(chi(psi.wild_image))
    offset = 2 if psi.p == 2 else 1
    if wild_order > 1:
        return int(multiplicity(psi.p, wild_order)) + offset
    if T.element_order(chi(psi.tame_image)) > 1:
        return offset
    return 0


@lru_cache(maxsize=1 << 16)
def local_disc_exponent(psi: LocalChar) -> int:
    """
    Sum of conductor exponents over all characters of the group, counted through the
    filtration <p^j w> of the wild image w: a character kills <p^j w> for exactly
    |A| / p^(m-j) choices.
    """
    if not psi.ramified:
        return 0
    n = psi.group.order
    p, m = psi.p, psi.wild_depth
    offset = 2 if p == 2 else 1
    total = offset * (n // p ** m - n // psi.inertia.order)
    for j in range(1, m + 1):
        total += (j + offset) * (n // p ** (m - j) - n // p ** (m - j + 1))
    return total
