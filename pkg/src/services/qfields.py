"""
Abelian extensions of Q as surjections from the idele class group onto A.

A global character is a finite set of ramified local characters psi_p of Z_p^x;
the Frobenius at an unramified p is the sum of psi_q(p) over the ramified q, and
complex conjugation is the sum of psi_q(-1). Extensions are enumerated by
discriminant (or by radical) with a depth-first branch and bound over the primes.
"""
import bisect
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import prod
from typing import Iterable, Iterator, Sequence

import numpy as np
from sympy import integer_nthroot, primerange

from src.conf.config import settings
from src.errors import EnumerationBudgetExceeded, InvalidInputError
from src.services.abgroup import (Element, FinAbGroup, Homomorphism, Subgroup, characters, killed_by,
                                  subgroup_from_generators)
from src.services.hnp import DecompFamily, hnp_holds, smallest_prime_divisor
from src.services.local_fields import (LocalChar, conductor_exponent, local_char_space, local_disc_exponent,
                                       unramified)

logger = logging.getLogger(__name__)

ORDERINGS = ('discriminant', 'radical')


@dataclass(frozen=True)
class GlobalChar:
    """A continuous character of the ideles of Q, trivial on Q^x and R_{>0}, into A."""
    group: FinAbGroup
    locals: tuple[LocalChar, ...] = ()

    def __post_init__(self):
        chars = tuple(sorted(self.locals, key=lambda psi: psi.p))
        object.__setattr__(self, 'locals', chars)
        primes = [psi.p for psi in chars]
        if len(set(primes)) != len(primes):
            raise InvalidInputError('a global character has one local character per prime')
        for psi in chars:
            if psi.group != self.group:
                raise InvalidInputError(f'local character at {psi.p} has the wrong target')
            if not psi.ramified:
                raise InvalidInputError(f'local character at {psi.p} is unramified')

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(psi.p for psi in self.locals)

    def local(self, p: int) -> LocalChar:
        for psi in self.locals:
            if psi.p == p:
                return psi
        return unramified(p, self.group)

    def evaluate(self, x: int, skip: int | None = None) -> Element:
        """Sum of psi_q(x) over the ramified q other than ``skip``."""
        A = self.group
        total = A.zero
        for psi in self.locals:
            if psi.p != skip:
                total = A.add(total, psi.evaluate(x))
        return total

    @cached_property
    def image(self) -> Subgroup:
        gens = [g for psi in self.locals for g in (psi.tame_image, psi.wild_image)]
        return subgroup_from_generators(self.group, gens)

    def is_surjective(self) -> bool:
        return self.image.is_full()

    @cached_property
    def conductor(self) -> int:
        return prod(psi.p ** psi.conductor_exponent for psi in self.locals)

    @property
    def radical(self) -> int:
        return prod(self.primes)

    def key(self) -> tuple:
        return tuple(psi.key() for psi in self.locals)


@dataclass(frozen=True)
class RamifiedPlace:
    p: int
    inertia: Subgroup
    frobenius: Element
    decomposition: Subgroup
    disc_exponent: int
    local: LocalChar


def discriminant(phi: GlobalChar) -> int:
    """
    Absolute discriminant of the field cut out by phi, by the conductor-discriminant
    formula summed over every character of A.
    """
    chis = list(characters(phi.group))
    return prod(psi.p ** sum(conductor_exponent(chi, psi) for chi in chis) for psi in phi.locals)


def frobenius(phi: GlobalChar, p: int) -> Element:
    """
    Image of the uniformizer p at p: the sum of psi_q(p) over the other ramified q.
    At an unramified p this is the Frobenius class.
    """
    return phi.evaluate(p, skip=p)


def decomposition_group(phi: GlobalChar, p: int) -> Subgroup:
    psi = phi.local(p)
    return subgroup_from_generators(phi.group, (psi.tame_image, psi.wild_image, frobenius(phi, p)))


def project(phi: GlobalChar, pi: Homomorphism) -> GlobalChar:
    """The character pi o phi, dropping the places where it becomes unramified."""
    if pi.source != phi.group:
        raise InvalidInputError('projection does not start at the character target')
    pushed = (psi.push(pi) for psi in phi.locals)
    return GlobalChar(pi.target, tuple(psi for psi in pushed if psi.ramified))


@dataclass(frozen=True)
class FieldRecord:
    global_char: GlobalChar
    discriminant: int
    conductor: int

    @property
    def group(self) -> FinAbGroup:
        return self.global_char.group

    @cached_property
    def ramified(self) -> tuple[RamifiedPlace, ...]:
        phi = self.global_char
        return tuple(RamifiedPlace(psi.p, psi.inertia, frobenius(phi, psi.p), decomposition_group(phi, psi.p),
                                   local_disc_exponent(psi), psi)
                     for psi in phi.locals)

    @cached_property
    def hnp(self) -> bool:
        return hnp_verdict(self)

    @cached_property
    def infinite_place(self) -> Element:
        """Image of complex conjugation; zero exactly for totally real fields."""
        return self.global_char.evaluate(-1)

    def sort_key(self, ordering: str = 'discriminant') -> tuple:
        if ordering == 'radical':
            return self.global_char.radical, self.discriminant, self.conductor, self.global_char.key()
        return self.discriminant, self.conductor, self.global_char.key()


def make_record(phi: GlobalChar) -> FieldRecord:
    disc = prod(psi.p ** local_disc_exponent(psi) for psi in phi.locals)
    return FieldRecord(phi, disc, phi.conductor)


def hnp_verdict(record: FieldRecord) -> bool:
    """Decomposition groups at the ramified primes decide the norm principle."""
    A = record.group
    return hnp_holds(A, DecompFamily(A, tuple(place.decomposition for place in record.ramified)))


@dataclass(frozen=True)
class _PrimeOptions:
    p: int
    floor: int
    chars: tuple[tuple[LocalChar, int], ...]


def _prime_options(A: FinAbGroup, X: int, ordering: str) -> list[_PrimeOptions]:
    """Ramified local characters per prime with their weight (p^disc exponent, or p)."""
    if A.order == 1:
        return []
    if ordering == 'radical':
        bound, v_min = X, 1
    else:
        ell = smallest_prime_divisor(A)
        v_min = A.order * (ell - 1) // ell
        bound = int(integer_nthroot(X, v_min)[0])
    options = []
    for p in primerange(2, bound + 1):
        p = int(p)
        chars = []
        for psi in local_char_space(p, A):
            if not psi.ramified:
                continue
            weight = p if ordering == 'radical' else p ** local_disc_exponent(psi)
            if weight <= X:
                chars.append((psi, weight))
        if chars:
            chars.sort(key=lambda item: (item[1], item[0].key()))
            options.append(_PrimeOptions(p, p ** v_min, tuple(chars)))
    return options


@lru_cache(maxsize=1 << 16)
def _extend_image(image: Subgroup, psi: LocalChar) -> Subgroup:
    return subgroup_from_generators(image.ambient, image.generators + (psi.tame_image, psi.wild_image))


@dataclass
class _Search:
    """One depth-first search over a list of start frames (next index, weight, chosen, image)."""
    group: FinAbGroup
    X: int
    options: list[_PrimeOptions]
    include_etale: bool
    budget: int
    frames: list[tuple] = field(default_factory=list)

    def accepts(self, frame: tuple) -> bool:
        return self.include_etale or frame[3].is_full()

    def expand(self, frame: tuple) -> list[tuple]:
        index, weight, chosen, image = frame
        children = []
        for j in range(index, len(self.options)):
            option = self.options[j]
            if weight * option.floor > self.X:
                break
            for psi, w in option.chars:
                if weight * w > self.X:
                    break
                children.append((j + 1, weight * w, chosen + (psi,), _extend_image(image, psi)))
        return children

    def run(self) -> tuple[list[tuple[LocalChar, ...]], int | None, int]:
        found = []
        stack = list(reversed(self.frames))
        nodes = 0
        while stack:
            if nodes >= self.budget:
                return found, min(frame[1] for frame in stack), nodes
            frame = stack.pop()
            nodes += 1
            if self.accepts(frame):
                found.append(frame[2])
            stack.extend(self.expand(frame))
        return found, None, nodes


def _run_search(search: _Search):
    return search.run()


def enumerate_extensions(A: FinAbGroup, X: int, ordering: str = 'discriminant', include_etale: bool = False,
                         jobs: int = 1, budget: int | None = None) -> Iterator[FieldRecord]:
    """
    Every A-extension of Q with discriminant (or radical) at most X, sorted by
    (discriminant, conductor, local data), or by radical first.

    :param A: FinAbGroup: the Galois group
    :param X: int: the bound, at least 1
    :param ordering: str: 'discriminant' or 'radical'
    :param include_etale: bool: also yield non-surjective characters (etale algebras)
    :param jobs: int: worker processes for the top-level branches
    :param budget: int | None: maximal number of search nodes
    :return: an iterator over FieldRecord
    """
    if X < 1:
        raise InvalidInputError('the bound X must be at least 1')
    if ordering not in ORDERINGS:
        raise InvalidInputError(f'unknown ordering {ordering!r}')
    if jobs < 1:
        raise InvalidInputError('jobs must be at least 1')
    budget = settings.enumeration_node_budget if budget is None else budget
    yield from _collect(A, X, ordering, include_etale, jobs, budget)


def _collect(A, X, ordering, include_etale, jobs, budget) -> list[FieldRecord]:
    options = _prime_options(A, X, ordering)
    root = (0, 1, (), A.trivial())
    logger.info('enumerating %s up to %s by %s over %d primes', A, X, ordering, len(options))
    if jobs == 1 or not options:
        found, frontier, nodes = _Search(A, X, options, include_etale, budget, [root]).run()
    else:
        found, frontier, nodes = _parallel_search(A, X, options, include_etale, jobs, budget, root)

    key = ordering
    records = sorted((make_record(GlobalChar(A, chosen)) for chosen in found),
                     key=lambda record: record.sort_key(key))
    logger.info('%d search nodes, %d records', nodes, len(records))
    if frontier is not None:
        value = (lambda r: r.global_char.radical) if ordering == 'radical' else (lambda r: r.discriminant)
        prefix = [record for record in records if value(record) < frontier]
        raise EnumerationBudgetExceeded(prefix, frontier, nodes)
    return records


def _parallel_search(A, X, options, include_etale, jobs, budget, root):
    # expand the root here and hand its children round-robin to the workers
    top = _Search(A, X, options, include_etale, budget)
    found = [root[2]] if top.accepts(root) else []
    children = top.expand(root)
    share = max(1, budget // jobs)
    searches = [_Search(A, X, options, include_etale, share, children[k::jobs]) for k in range(jobs)]
    frontiers, nodes = [], 1
    with ProcessPoolExecutor(max_workers=jobs) as executor:
        for chunk, frontier, count in executor.map(_run_search, searches):
            found.extend(chunk)
            nodes += count
            if frontier is not None:
                frontiers.append(frontier)
    return found, min(frontiers, default=None), nodes


def count_extensions(A: FinAbGroup, grid: Sequence[int], ordering: str = 'discriminant',
                     include_etale: bool = False, jobs: int = 1) -> list[tuple[int, int]]:
    """Counts N(X) at each X of an increasing grid, from a single enumeration."""
    grid = check_grid(grid)
    records = list(enumerate_extensions(A, grid[-1], ordering, include_etale, jobs))
    values = [record.global_char.radical if ordering == 'radical' else record.discriminant for record in records]
    return [(X, bisect.bisect_right(values, X)) for X in grid]


def check_grid(grid: Iterable[int]) -> list[int]:
    grid = [int(X) for X in grid]
    if not grid:
        raise InvalidInputError('the grid of bounds is empty')
    if any(X < 1 for X in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError('the grid of bounds must be positive and strictly increasing')
    return grid


@dataclass(frozen=True)
class WrightExponents:
    """N(X) ~ c X^power (log X)^logpower for A-extensions ordered by discriminant."""
    power: Fraction
    logpower: Fraction


@dataclass(frozen=True)
class WrightFit:
    exponents: WrightExponents
    power_est: float
    c_est: float


def wright_exponents(A: FinAbGroup) -> WrightExponents:
    ell = smallest_prime_divisor(A)
    power = Fraction(ell, A.order * (ell - 1))
    logpower = Fraction(-1) + Fraction(killed_by(A, ell).order - 1, ell - 1)
    return WrightExponents(power, logpower)


def wright_fit(A: FinAbGroup, counts: Sequence[tuple[int, int]]) -> WrightFit:
    """
    Least-squares fit of log N(X) - logpower * log log X against log X.

    :param A: FinAbGroup: the Galois group
    :param counts: Sequence[tuple[int, int]]: at least three points (X, N(X)), N(X) > 0
    :return: the fitted power and constant next to the predicted exponents
    """
    points = [(int(X), int(N)) for X, N in counts]
    if len(points) < 3:
        raise InvalidInputError('at least three counts are needed for a fit')
    check_grid(X for X, _ in points)
    if any(N <= 0 or X < 3 for X, N in points):
        raise InvalidInputError('counts must be positive and bounds at least 3')
    exponents = wright_exponents(A)
    log_x = np.log(np.array([X for X, _ in points], dtype=float))
    log_n = np.log(np.array([N for _, N in points], dtype=float)) - float(exponents.logpower) * np.log(log_x)
    slope, intercept = np.polyfit(log_x, log_n, 1)
    return WrightFit(exponents, float(slope), float(np.exp(intercept)))
