"""
Finite abelian groups in invariant-factor form.

A group is Z/d_1 + ... + Z/d_n with d_1 | d_2 | ... | d_n and every d_i >= 2; the
trivial group has no factors. Elements are tuples of coordinates reduced into
[0, d_i). A subgroup is stored as the column Hermite normal form of the lattice
spanned by its generators together with the relations d_i * e_i, so two subgroups
are equal exactly when their matrices are.

Exterior squares use the basis e_i ^ e_j (i < j) of order gcd(d_i, d_j) = d_i, and
alternating pairings are stored by their values on that basis.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, lcm, prod
from typing import Iterable, Iterator

from sympy import Matrix, ZZ, factorint, isprime
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import hermite_normal_form
from sympy.utilities.iterables import partitions

from src.errors import InvalidInputError

Element = tuple[int, ...]


@dataclass(frozen=True, order=True)
class FinAbGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        factors = tuple(int(d) for d in self.invariant_factors)
        object.__setattr__(self, 'invariant_factors', factors)
        if any(d < 2 for d in factors):
            raise InvalidInputError(f'invariant factors must be >= 2, got {list(factors)}')
        if any(b % a for a, b in zip(factors, factors[1:])):
            raise InvalidInputError(f'{list(factors)} is not a divisibility chain')

    @classmethod
    def parse(cls, spec: str) -> 'FinAbGroup':
        """
        Parse a group spec such as ``"6,4"``; factors may come in any order and
        entries equal to 1 are dropped. The result is canonical (``"2,12"``).
        """
        text = spec.strip()
        if text in ('', '1'):
            return cls()
        try:
            factors = [int(part) for part in text.split(',')]
        except ValueError:
            raise InvalidInputError(f'cannot parse group spec {spec!r}')
        if any(d < 1 for d in factors):
            raise InvalidInputError(f'group spec {spec!r} has non-positive entries')
        return canonicalize([d for d in factors if d > 1])

    def __str__(self):
        return ','.join(map(str, self.invariant_factors)) or '1'

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @cached_property
    def order(self) -> int:
        return prod(self.invariant_factors)

    @cached_property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def zero(self) -> Element:
        return (0,) * self.rank

    def basis(self, i: int) -> Element:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def check(self, x: Iterable[int]) -> Element:
        """Validate the dimension of ``x`` and return it reduced."""
        x = tuple(int(c) for c in x)
        if len(x) != self.rank:
            raise InvalidInputError(f'element {x} does not live in a group of rank {self.rank}')
        return self.reduce(x)

    def reduce(self, x: Iterable[int]) -> Element:
        return tuple(c % d for c, d in zip(x, self.invariant_factors))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % d for a, b, d in zip(x, y, self.invariant_factors))

    def scale(self, k: int, x: Element) -> Element:
        return tuple((k * a) % d for a, d in zip(x, self.invariant_factors))

    def element_order(self, x: Element) -> int:
        return lcm(*(d // gcd(d, a) for a, d in zip(x, self.invariant_factors))) if x else 1

    def elements(self) -> Iterator[Element]:
        return itertools.product(*(range(d) for d in self.invariant_factors))

    def parse_element(self, text: str) -> Element:
        body = text.strip().strip('()[]')
        try:
            coords = [int(c) for c in body.split(',')] if body else []
        except ValueError:
            raise InvalidInputError(f'cannot parse element {text!r}')
        return self.check(coords)

    def full(self) -> 'Subgroup':
        return subgroup_from_generators(self, [self.basis(i) for i in range(self.rank)])

    def trivial(self) -> 'Subgroup':
        return subgroup_from_generators(self, [])


def canonicalize(factors: Iterable[int]) -> FinAbGroup:
    """Bring any list of cyclic factors to its invariant-factor chain, e.g. [6, 4] -> [2, 12]."""
    factors = [int(d) for d in factors]
    if any(d < 2 for d in factors):
        raise InvalidInputError(f'cyclic factors must be >= 2, got {factors}')
    exponents: dict[int, list[int]] = {}
    for d in factors:
        for p, e in factorint(d).items():
            exponents.setdefault(int(p), []).append(int(e))
    length = max((len(es) for es in exponents.values()), default=0)
    chain = [1] * length
    for p, es in exponents.items():
        for k, e in enumerate(sorted(es, reverse=True)):
            chain[length - 1 - k] *= p ** e
    return FinAbGroup(tuple(chain))


def is_cyclic(A: FinAbGroup) -> bool:
    return A.rank <= 1


def abelian_groups_of_order(n: int) -> Iterator[FinAbGroup]:
    if n == 1:
        yield FinAbGroup()
        return
    choices = []
    for p, e in sorted(factorint(n).items()):
        choices.append([[int(p) ** k for k, m in part.items() for _ in range(m)]
                        for part in partitions(int(e))])
    for combo in itertools.product(*choices):
        yield canonicalize([d for block in combo for d in block])


def abelian_groups_up_to(bound: int) -> Iterator[FinAbGroup]:
    """All non-trivial abelian groups of order <= bound: by order, then rank (cyclic first), then factors."""
    for n in range(2, bound + 1):
        yield from sorted(abelian_groups_of_order(n), key=lambda A: (A.rank, A.invariant_factors))


@lru_cache(maxsize=1 << 17)
def _hermite(factors: tuple[int, ...], gens: tuple[Element, ...]) -> tuple[tuple[int, ...], ...]:
    n = len(factors)
    if n == 0:
        return ()
    columns = [g for g in gens if any(g)]
    columns += [tuple(d if i == j else 0 for i in range(n)) for j, d in enumerate(factors)]
    rows = [[ZZ(column[i]) for column in columns] for i in range(n)]
    lattice = DomainMatrix(rows, (n, len(columns)), ZZ)
    # the lattice contains prod(factors) * Z^n, so the modular algorithm applies
    reduced = hermite_normal_form(lattice, D=ZZ(prod(factors)))
    return tuple(tuple(int(x) for x in row) for row in reduced.to_list())


@dataclass(frozen=True, order=True)
class Subgroup:
    ambient: FinAbGroup
    hnf: tuple[tuple[int, ...], ...]

    @cached_property
    def order(self) -> int:
        index = prod(self.hnf[i][i] for i in range(self.ambient.rank))
        return self.ambient.order // index

    def __contains__(self, x) -> bool:
        v = list(self.ambient.check(x))
        for i in reversed(range(self.ambient.rank)):
            pivot = self.hnf[i][i]
            if v[i] % pivot:
                return False
            q = v[i] // pivot
            for r in range(i + 1):
                v[r] -= q * self.hnf[r][i]
        return True

    @cached_property
    def generators(self) -> tuple[Element, ...]:
        """Non-zero reduced columns of the Hermite form; they generate the subgroup."""
        columns = []
        for j in range(self.ambient.rank):
            column = self.ambient.reduce(row[j] for row in self.hnf)
            if any(column) and column not in columns:
                columns.append(column)
        return tuple(columns)

    @cached_property
    def structure(self) -> FinAbGroup:
        """The isomorphism type of the subgroup: L / (d_i Z^n) for L the Hermite lattice."""
        n = self.ambient.rank
        if n == 0:
            return FinAbGroup()
        relations = []
        for j, d in enumerate(self.ambient.invariant_factors):
            # solve hnf * y = d e_j by back-substitution; exact since d e_j lies in the lattice
            v = [d if i == j else 0 for i in range(n)]
            y = [0] * n
            for i in reversed(range(n)):
                y[i] = v[i] // self.hnf[i][i]
                for r in range(i + 1):
                    v[r] -= y[i] * self.hnf[r][i]
            relations.append(y)
        factors = invariant_factors(Matrix(relations).T, domain=ZZ)
        return canonicalize([abs(int(f)) for f in factors if abs(int(f)) > 1])

    def is_cyclic(self) -> bool:
        return self.structure.rank <= 1

    def is_full(self) -> bool:
        return self.order == self.ambient.order

    def join(self, other: 'Subgroup') -> 'Subgroup':
        return subgroup_from_generators(self.ambient, self.generators + other.generators)

    def elements(self) -> list[Element]:
        return [x for x in self.ambient.elements() if x in self]


def subgroup_from_generators(A: FinAbGroup, gens: Iterable[Iterable[int]]) -> Subgroup:
    reduced = tuple(A.check(g) for g in gens)
    return Subgroup(A, _hermite(A.invariant_factors, reduced))


def killed_by(A: FinAbGroup, n: int) -> Subgroup:
    """The subgroup A[n] = {a : n a = 0}."""
    return subgroup_from_generators(
        A, [A.scale(d // gcd(d, n), A.basis(i)) for i, d in enumerate(A.invariant_factors)])


def torsion_elements(A: FinAbGroup, n: int) -> Iterator[Element]:
    steps = [d // gcd(d, n) for d in A.invariant_factors]
    return itertools.product(*(range(0, d, s) for d, s in zip(A.invariant_factors, steps)))


def torsion(A: FinAbGroup, ell: int) -> Subgroup:
    if not isprime(ell):
        raise InvalidInputError(f'{ell} is not prime')
    return killed_by(A, ell)


def p_primary_part(A: FinAbGroup, p: int) -> Subgroup:
    power = p ** factorint(A.exponent).get(p, 0)
    return killed_by(A, power)


@dataclass(frozen=True)
class Homomorphism:
    """A map of groups given by the images of the source generators (matrix columns)."""
    source: FinAbGroup
    target: FinAbGroup
    images: tuple[Element, ...]

    def __post_init__(self):
        if len(self.images) != self.source.rank:
            raise InvalidInputError('a homomorphism needs one image per source generator')
        images = tuple(self.target.check(x) for x in self.images)
        object.__setattr__(self, 'images', images)
        for d, image in zip(self.source.invariant_factors, images):
            if any(self.target.scale(d, image)):
                raise InvalidInputError(f'image {image} is not killed by {d}')

    @classmethod
    def identity(cls, A: FinAbGroup) -> 'Homomorphism':
        return cls(A, A, tuple(A.basis(i) for i in range(A.rank)))

    @classmethod
    def zero(cls, A: FinAbGroup, B: FinAbGroup) -> 'Homomorphism':
        return cls(A, B, (B.zero,) * A.rank)

    def __call__(self, x: Element) -> Element:
        total = [0] * self.target.rank
        for coefficient, image in zip(x, self.images):
            if coefficient:
                for i, c in enumerate(image):
                    total[i] += coefficient * c
        return self.target.reduce(total)

    def compose(self, inner: 'Homomorphism') -> 'Homomorphism':
        """``self o inner``."""
        if inner.target != self.source:
            raise InvalidInputError('cannot compose: target and source differ')
        return Homomorphism(inner.source, self.target, tuple(self(x) for x in inner.images))

    def image(self, H: Subgroup | None = None) -> Subgroup:
        gens = self.images if H is None else tuple(self(g) for g in H.generators)
        return subgroup_from_generators(self.target, gens)

    def is_surjective(self) -> bool:
        return self.image().is_full()

    def is_automorphism(self) -> bool:
        return self.source == self.target and self.is_surjective()

    def wedge(self) -> 'Homomorphism':
        """The induced map on exterior squares, acting on e_i ^ e_j by 2x2 minors."""
        source = wedge_square(self.source)
        target = wedge_square(self.target)
        images = tuple(wedge_pair(self.target, self.images[i], self.images[j])
                       for i, j in source.pairs)
        return Homomorphism(source.structure, target.structure, images)


def characters(A: FinAbGroup) -> Iterator[Homomorphism]:
    """
    All |A| characters of A as maps into Z/N, N the exponent; the value k stands
    for k/N in Q/Z.
    """
    N = A.exponent
    T = FinAbGroup((N,)) if N > 1 else FinAbGroup()
    for ks in itertools.product(*(range(d) for d in A.invariant_factors)):
        images = tuple(T.reduce((k * (N // d),)) for k, d in zip(ks, A.invariant_factors))
        yield Homomorphism(A, T, images)


def quotient_map(A: FinAbGroup, H: Subgroup) -> tuple[FinAbGroup, Homomorphism]:
    if H.ambient != A:
        raise InvalidInputError('the subgroup does not live in this group')
    if A.rank == 0:
        return A, Homomorphism.identity(A)
    # S * hnf * T is diagonal, so x -> S x identifies Z^n / lattice with the diagonal quotient
    diagonal, left, _ = smith_normal_decomp(Matrix(H.hnf), domain=ZZ)
    kept = [i for i in range(A.rank) if abs(int(diagonal[i, i])) > 1]
    B = FinAbGroup(tuple(abs(int(diagonal[i, i])) for i in kept))
    images = tuple(B.reduce(int(left[i, j]) for i in kept) for j in range(A.rank))
    return B, Homomorphism(A, B, images)


@dataclass(frozen=True)
class WedgeSquare:
    base: FinAbGroup

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(itertools.combinations(range(self.base.rank), 2))

    @cached_property
    def structure(self) -> FinAbGroup:
        # lexicographic pairs list d_1 (n-1 times), d_2 (n-2 times), ...: already a chain
        return FinAbGroup(tuple(self.base.invariant_factors[i] for i, _ in self.pairs))

    @property
    def order(self) -> int:
        return self.structure.order


@lru_cache(maxsize=None)
def wedge_square(A: FinAbGroup) -> WedgeSquare:
    return WedgeSquare(A)


def wedge_pair(A: FinAbGroup, a: Element, b: Element) -> Element:
    if len(a) != A.rank or len(b) != A.rank:
        raise InvalidInputError('wedge_pair: dimension mismatch')
    d = A.invariant_factors
    return tuple((a[i] * b[j] - a[j] * b[i]) % d[i] for i, j in wedge_square(A).pairs)


def wedge_image_join(A: FinAbGroup, families: Iterable[Subgroup]) -> Subgroup:
    """The subgroup of the exterior square generated by the images of all H ^ H."""
    gens = []
    for H in families:
        if H.ambient != A:
            raise InvalidInputError('family member is not a subgroup of the given group')
        gens.extend(wedge_pair(A, g, h) for g, h in itertools.combinations(H.generators, 2))
    return subgroup_from_generators(wedge_square(A).structure, gens)


@dataclass(frozen=True)
class AltPairing:
    """
    An alternating Q/Z-valued pairing; ``values[k]`` is b(e_i, e_j) for the k-th
    pair (i, j) of the exterior-square basis, stored in [0, 1).
    """
    base: FinAbGroup
    values: tuple[Fraction, ...]

    def __post_init__(self):
        pairs = wedge_square(self.base).pairs
        if len(self.values) != len(pairs):
            raise InvalidInputError('one value per basis pair is required')
        values = tuple(Fraction(v) % 1 for v in self.values)
        for (i, _), v in zip(pairs, values):
            if (v * self.base.invariant_factors[i]).denominator != 1:
                raise InvalidInputError(f'value {v} is not killed by {self.base.invariant_factors[i]}')
        object.__setattr__(self, 'values', values)

    @classmethod
    def zero(cls, A: FinAbGroup) -> 'AltPairing':
        return cls(A, (Fraction(0),) * len(wedge_square(A).pairs))

    def value(self, i: int, j: int) -> Fraction:
        if i == j:
            return Fraction(0)
        if i > j:
            return -self.value(j, i) % 1
        return self.values[wedge_square(self.base).pairs.index((i, j))]

    def __call__(self, x: Element, y: Element) -> Fraction:
        total = sum((v * (x[i] * y[j] - x[j] * y[i])
                     for (i, j), v in zip(wedge_square(self.base).pairs, self.values) if v),
                    Fraction(0))
        return total % 1

    def is_zero(self) -> bool:
        return not any(self.values)

    def vanishes_on(self, H: Subgroup) -> bool:
        return all(self(g, h) == 0 for g, h in itertools.combinations(H.generators, 2))


def all_pairings(A: FinAbGroup) -> Iterator[AltPairing]:
    """Every alternating pairing on A; there are |wedge^2 A| of them."""
    moduli = wedge_square(A).structure.invariant_factors
    for ks in itertools.product(*(range(d) for d in moduli)):
        yield AltPairing(A, tuple(Fraction(k, d) for k, d in zip(ks, moduli)))


def pullback_pairing(f: AltPairing, pi: Homomorphism) -> AltPairing:
    if pi.target != f.base:
        raise InvalidInputError('the pairing does not live on the target of the map')
    images = pi.images
    return AltPairing(pi.source, tuple(f(images[i], images[j])
                                       for i, j in wedge_square(pi.source).pairs))
