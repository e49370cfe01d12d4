"""
Wood's local probability model, empirical frequencies from the enumerator, HNP
density curves and the fixed-base dichotomy.

Places are primes; the archimedean place is labelled 0. A local point at a prime p
is a unit character together with the image of the uniformizer, weighted 1 when
unramified and 1/p when ramified; at the archimedean place it is the image of
complex conjugation, weighted 1.
"""
import csv
import io
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, sqrt
from typing import Callable, Iterable, Mapping, Sequence

from sympy import isprime, primefactors

from src.conf.config import settings
from src.errors import InvalidInputError, UndefinedRatioError
from src.services.abgroup import (Element, FinAbGroup, Homomorphism, Subgroup, quotient_map,
                                  subgroup_from_generators, torsion, torsion_elements)
from src.services.hnp import (DecompFamily, LimitTag, LimitVerdict, classify_limit, enumerate_family_C,
                              smallest_prime_divisor, zero_one_verdict)
from src.services.local_fields import LocalChar, local_char_space
from src.services.qfields import (FieldRecord, GlobalChar, check_grid, enumerate_extensions, frobenius,
                                  make_record, project)

logger = logging.getLogger(__name__)

ARCHIMEDEAN = 0


@dataclass(frozen=True, order=True)
class LocalPoint:
    place: int
    char: LocalChar | None
    frobenius: Element

    @property
    def ramified(self) -> bool:
        return self.char is not None and self.char.ramified

    def decomposition(self, A: FinAbGroup) -> Subgroup:
        gens = [self.frobenius]
        if self.char is not None:
            gens += [self.char.tame_image, self.char.wild_image]
        return subgroup_from_generators(A, gens)


@dataclass(frozen=True)
class LocalSpec:
    """
    A condition at one place. ``char`` fixes the unit character at a prime and
    ``frobenius`` the uniformizer image (complex conjugation at the archimedean
    place); None leaves that part free.
    """
    place: int
    char: LocalChar | None = None
    frobenius: Element | None = None

    def __post_init__(self):
        if self.place != ARCHIMEDEAN and not isprime(self.place):
            raise InvalidInputError(f'{self.place} is neither a prime nor the archimedean place')
        if self.char is not None and self.char.p != self.place:
            raise InvalidInputError(f'character at {self.char.p} given for the place {self.place}')

    def matches(self, point: LocalPoint) -> bool:
        if point.place != self.place:
            return False
        if self.char is not None and point.char != self.char:
            return False
        return self.frobenius is None or point.frobenius == self.frobenius


def _check_place(place: int):
    if place != ARCHIMEDEAN and not isprime(place):
        raise InvalidInputError(f'{place} is neither a prime nor the archimedean place')


@lru_cache(maxsize=1024)
def local_space(A: FinAbGroup, place: int) -> tuple[tuple[LocalPoint, Fraction], ...]:
    """Every local point at ``place`` with its weight."""
    _check_place(place)
    if place == ARCHIMEDEAN:
        return tuple((LocalPoint(place, None, c), Fraction(1)) for c in torsion_elements(A, 2))
    points = []
    for psi in local_char_space(place, A):
        weight = Fraction(1, place) if psi.ramified else Fraction(1)
        points.extend((LocalPoint(place, psi, F), weight) for F in A.elements())
    return tuple(points)


@dataclass(frozen=True)
class BoxMeasure:
    """
    Independent local measures at finitely many places, optionally conditioned on a
    list of disjoint admissible restrictions at 2.
    """
    group: FinAbGroup
    places: tuple[int, ...]
    gw_classes: tuple[tuple[LocalSpec, ...], ...] | None = None

    def __post_init__(self):
        places = tuple(sorted(set(int(v) for v in self.places)))
        for v in places:
            _check_place(v)
        object.__setattr__(self, 'places', places)
        if self.gw_classes is None:
            return
        classes = tuple(tuple(specs) for specs in self.gw_classes)
        object.__setattr__(self, 'gw_classes', classes)
        if not classes:
            raise InvalidInputError('the list of admissible classes at 2 is empty')
        if 2 not in places:
            raise InvalidInputError('conditioning at 2 needs 2 among the places')
        if any(spec.place != 2 for specs in classes for spec in specs):
            raise InvalidInputError('admissible classes only constrain the place 2')
        for i, first in enumerate(classes):
            for second in classes[i + 1:]:
                if self.mass(2, first + second):
                    raise InvalidInputError('admissible classes at 2 overlap')

    def mass(self, place: int, specs: Sequence[LocalSpec]) -> Fraction:
        """Probability at one place of the points matching every spec."""
        space = local_space(self.group, place)
        total = sum(weight for _, weight in space)
        hit = sum(weight for point, weight in space if all(spec.matches(point) for spec in specs))
        return hit / total


def _group_specs(m: BoxMeasure, specs: Iterable[LocalSpec]) -> dict[int, list[LocalSpec]]:
    grouped: dict[int, list[LocalSpec]] = {}
    for spec in specs:
        if spec.place not in m.places:
            raise InvalidInputError(f'place {spec.place} is not part of the measure')
        if spec.char is not None and spec.char.group != m.group:
            raise InvalidInputError(f'spec at {spec.place} has values outside {m.group}')
        grouped.setdefault(spec.place, []).append(spec)
    return grouped


def _box_mass(m: BoxMeasure, grouped: Mapping[int, list[LocalSpec]]) -> Fraction:
    result = Fraction(1)
    for place, specs in grouped.items():
        result *= m.mass(place, specs)
    return result


def box_probability(m: BoxMeasure, specs: Sequence[LocalSpec]) -> Fraction:
    """
    The model probability of the box cut out by ``specs``.

    :param m: BoxMeasure: the local measures
    :param specs: Sequence[LocalSpec]: conditions, all at places of the measure
    :return: an exact rational in [0, 1]
    """
    grouped = _group_specs(m, specs)
    if m.gw_classes is None:
        return _box_mass(m, grouped)
    joint = admissible = Fraction(0)
    for specs_at_two in m.gw_classes:
        admissible += m.mass(2, specs_at_two)
        merged = {place: list(values) for place, values in grouped.items()}
        merged.setdefault(2, []).extend(specs_at_two)
        joint += _box_mass(m, merged)
    if not admissible:
        raise UndefinedRatioError('no admissible class at 2 has positive mass')
    return joint / admissible


def record_point(record: FieldRecord, place: int) -> LocalPoint:
    if place == ARCHIMEDEAN:
        return LocalPoint(place, None, record.infinite_place)
    phi = record.global_char
    return LocalPoint(place, phi.local(place), frobenius(phi, place))


def record_matches(record: FieldRecord, specs: Iterable[LocalSpec]) -> bool:
    return all(spec.matches(record_point(record, spec.place)) for spec in specs)


def empirical_pr(A: FinAbGroup, specs: Sequence[LocalSpec], X: int, ordering: str = 'radical',
                 jobs: int = 1) -> Fraction:
    """Share of A-extensions with radical (or discriminant) at most X that satisfy ``specs``."""
    hits, total = _empirical_counts(A, specs, X, ordering, jobs)
    return Fraction(hits, total)


def _empirical_counts(A, specs, X, ordering, jobs) -> tuple[int, int]:
    specs = tuple(specs)
    total = hits = 0
    for record in enumerate_extensions(A, X, ordering=ordering, jobs=jobs):
        total += 1
        hits += record_matches(record, specs)
    if not total:
        raise UndefinedRatioError(f'no {A}-extension with {ordering} at most {X}')
    return hits, total


def statistical_band(p_hat: float, n: int) -> float:
    """sigmas * max(binomial standard error, floor / sqrt(n))."""
    if n <= 0:
        raise UndefinedRatioError('a band needs at least one sample')
    return settings.band_sigmas * max(sqrt(p_hat * (1 - p_hat) / n), settings.band_floor / sqrt(n))


@dataclass(frozen=True)
class WoodComparison:
    model: Fraction
    empirical: Fraction
    hits: int
    total: int
    band: float

    @property
    def within_band(self) -> bool:
        return abs(float(self.empirical) - float(self.model)) <= self.band


def wood_check(A: FinAbGroup, specs: Sequence[LocalSpec], X: int, ordering: str = 'radical',
               jobs: int = 1) -> WoodComparison:
    specs = tuple(specs)
    model = box_probability(BoxMeasure(A, tuple(spec.place for spec in specs)), specs)
    hits, total = _empirical_counts(A, specs, X, ordering, jobs)
    empirical = Fraction(hits, total)
    band = statistical_band(float(empirical), total)
    logger.info('model %s, empirical %d/%d, band %.4f', model, hits, total, band)
    return WoodComparison(model, empirical, hits, total, band)


def parse_local_spec(A: FinAbGroup, place: int, text: str) -> LocalSpec:
    """
    Parse a local condition.

    At a prime: ``split``, ``unramified[:F|*]``, ``ramified:T[:F|*]`` (wild image 0)
    or ``local:T:W[:F|*]``; an omitted Frobenius means 0 and ``*`` leaves it free.
    At the archimedean place: ``conj:C`` or ``conj:*``. Elements are comma separated.
    """
    parts = [part.strip() for part in text.strip().split(':')]
    kind, args = parts[0], parts[1:]

    def frob(values: list[str]) -> Element | None:
        if not values:
            return A.zero
        if len(values) > 1:
            raise InvalidInputError(f'too many fields in local spec {text!r}')
        return None if values[0] == '*' else A.parse_element(values[0])

    if place == ARCHIMEDEAN:
        if kind != 'conj' or len(args) != 1:
            raise InvalidInputError(f'archimedean spec must read conj:C or conj:*, got {text!r}')
        value = None if args[0] == '*' else A.parse_element(args[0])
        if value is not None and any(A.scale(2, value)):
            raise InvalidInputError(f'complex conjugation cannot map to {value}')
        return LocalSpec(place, None, value)
    _check_place(place)
    if kind == 'split' and not args:
        return LocalSpec(place, LocalChar(place, A, A.zero, A.zero), A.zero)
    if kind == 'unramified':
        return LocalSpec(place, LocalChar(place, A, A.zero, A.zero), frob(args))
    if kind == 'ramified' and args:
        char = LocalChar(place, A, A.parse_element(args[0]), A.zero)
        if not char.ramified:
            raise InvalidInputError(f'{text!r} describes an unramified character')
        return LocalSpec(place, char, frob(args[1:]))
    if kind == 'local' and len(args) >= 2:
        char = LocalChar(place, A, A.parse_element(args[0]), A.parse_element(args[1]))
        return LocalSpec(place, char, frob(args[2:]))
    raise InvalidInputError(f'cannot parse local spec {text!r}')


PREDICATES: dict[str, Callable[[FieldRecord], bool]] = {
    'hnp': lambda record: record.hnp,
    'hnp-fail': lambda record: not record.hnp,
}


def resolve_predicate(predicate) -> Callable[[FieldRecord], bool]:
    """A predicate name, a callable on records, or a sequence of local specs."""
    if callable(predicate):
        return predicate
    if isinstance(predicate, str):
        try:
            return PREDICATES[predicate]
        except KeyError:
            raise InvalidInputError(f'unknown predicate {predicate!r}')
    specs = tuple(predicate)
    return lambda record: record_matches(record, specs)


@dataclass(frozen=True)
class DensityCurve:
    thresholds: tuple[int, ...]
    totals: tuple[int, ...]
    hits: tuple[int, ...]

    @property
    def ratios(self) -> tuple[Fraction | None, ...]:
        return tuple(Fraction(h, t) if t else None for h, t in zip(self.hits, self.totals))

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator='\n')
        writer.writerow(('X', 'total', 'hits', 'ratio'))
        for X, total, hits, ratio in zip(self.thresholds, self.totals, self.hits, self.ratios):
            writer.writerow((X, total, hits, '' if ratio is None else f'{float(ratio):.6f}'))
        return buffer.getvalue()


def fold_curve(records: Iterable[FieldRecord], grid: Sequence[int], predicate: Callable[[FieldRecord], bool],
               value: Callable[[FieldRecord], int] = lambda record: record.discriminant) -> DensityCurve:
    """Running totals over a stream sorted by ``value``."""
    grid = check_grid(grid)
    totals, hits = [], []
    total = hit = 0
    stream = iter(records)
    pending = next(stream, None)
    for X in grid:
        while pending is not None and value(pending) <= X:
            total += 1
            hit += bool(predicate(pending))
            pending = next(stream, None)
        totals.append(total)
        hits.append(hit)
    return DensityCurve(tuple(grid), tuple(totals), tuple(hits))


def density_curve(A: FinAbGroup, grid: Sequence[int], predicate='hnp', jobs: int = 1) -> DensityCurve:
    """
    The share of A-extensions satisfying ``predicate`` among those with discriminant
    at most X, for each X of the grid.
    """
    grid = check_grid(grid)
    test = resolve_predicate(predicate)
    return fold_curve(enumerate_extensions(A, grid[-1], jobs=jobs), grid, test)


def geometric_grid(X: int, start: int = 10, ratio: int = 10) -> list[int]:
    """start, start * ratio, ... below X, then X itself."""
    if X < 1:
        raise InvalidInputError('the bound X must be at least 1')
    grid = []
    value = start
    while value < X:
        grid.append(value)
        value *= ratio
    return grid + [X]


def curve_trend(curve: DensityCurve) -> str:
    defined = [ratio for ratio in curve.ratios if ratio is not None]
    if len(defined) < 2:
        return 'insufficient-data'
    if defined[-1] > defined[0]:
        return 'increasing'
    if defined[-1] < defined[0]:
        return 'decreasing'
    return 'flat'


@dataclass(frozen=True)
class FixedBaseContext:
    """
    The lifts of one B-extension, B = A / A[l], with the places S where they are compared.

    ``lift`` is the first lift whose decomposition groups on S all lie in the family C,
    so totally split conditions fix nothing beyond C; ``split_in_family`` is False when
    no lift in range has that property and ``lift`` falls back to the first one.
    """
    group: FinAbGroup
    ell: int
    base_group: FinAbGroup
    projection: Homomorphism
    base_char: GlobalChar
    base_discriminant: int
    lift: FieldRecord
    places: tuple[int, ...]
    lifts: tuple[FieldRecord, ...] = field(repr=False)
    split_in_family: bool = True


def _decompositions_in_family(record: FieldRecord, places: Sequence[int], members: set) -> bool:
    return all(record_point(record, p).decomposition(record.group).hnf in members for p in places)


def fixed_base_contexts(A: FinAbGroup, X: int, jobs: int = 1) -> list[FixedBaseContext]:
    """Group the A-extensions of discriminant at most X by their image in B, ordered by base."""
    ell = smallest_prime_divisor(A)
    B, pi = quotient_map(A, torsion(A, ell))
    members = {H.hnf for H in enumerate_family_C(A, ell).members}
    lifts: dict[GlobalChar, list[FieldRecord]] = {}
    for record in enumerate_extensions(A, X, jobs=jobs):
        lifts.setdefault(project(record.global_char, pi), []).append(record)
    contexts = []
    for base, records in lifts.items():
        base_record = make_record(base)
        places = tuple(int(p) for p in primefactors(2 * A.order * base.conductor))
        lift = next((record for record in records if _decompositions_in_family(record, places, members)), None)
        contexts.append(FixedBaseContext(A, ell, B, pi, base, base_record.discriminant, lift or records[0],
                                         places, tuple(records), split_in_family=lift is not None))
    contexts.sort(key=lambda ctx: (ctx.base_discriminant, ctx.base_char.key()))
    return contexts


def shift_point(A: FinAbGroup, point: LocalPoint, twist: LocalPoint | None) -> LocalPoint:
    if twist is None:
        return point
    if twist.place != point.place:
        raise InvalidInputError('twist and point live at different places')
    char = LocalChar(point.place, A, A.add(point.char.tame_image, twist.char.tame_image),
                     A.add(point.char.wild_image, twist.char.wild_image))
    return LocalPoint(point.place, char, A.add(point.frobenius, twist.frobenius))


def twist_points(A: FinAbGroup, ell: int, p: int) -> list[LocalPoint]:
    """Local points at p with values in A[l]; the zero twist first."""
    tames = list(torsion_elements(A, gcd(ell, 2 if p == 2 else p - 1)))
    wilds = list(torsion_elements(A, ell if p == ell else 1))
    return [LocalPoint(p, LocalChar(p, A, tame, wild), F)
            for tame in tames for wild in wilds for F in torsion_elements(A, ell)]


def _targets(ctx: FixedBaseContext, twist: Mapping[int, LocalPoint] | None) -> dict[int, LocalPoint]:
    twist = twist or {}
    unknown = set(twist) - set(ctx.places)
    if unknown:
        raise InvalidInputError(f'twist at places {sorted(unknown)} outside {list(ctx.places)}')
    return {p: shift_point(ctx.group, record_point(ctx.lift, p), twist.get(p)) for p in ctx.places}


def forcing_twist(ctx: FixedBaseContext) -> dict[int, LocalPoint] | None:
    """An A[l]-twist at one place of S making the decomposition group there all of A."""
    A = ctx.group
    for p in ctx.places:
        base = record_point(ctx.lift, p)
        for twist in twist_points(A, ctx.ell, p):
            if shift_point(A, base, twist).decomposition(A).is_full():
                return {p: twist}
    return None


@dataclass(frozen=True)
class DichotomyResult:
    context: FixedBaseContext
    predicted: int
    curve: DensityCurve
    trend: str

    @property
    def agrees(self) -> bool:
        if self.predicted == 1:
            return self.trend != 'decreasing'
        return self.trend != 'increasing'


def _verdict_for_targets(ctx: FixedBaseContext, targets: Mapping[int, LocalPoint]) -> int:
    A = ctx.group
    fixed = DecompFamily(A, tuple(point.decomposition(A) for point in targets.values()))
    return zero_one_verdict(A, ctx.ell, fixed)


def predicted_verdict(ctx: FixedBaseContext, twist: Mapping[int, LocalPoint] | None = None) -> int:
    """The 0/1 limit for lifts agreeing with lift + twist on S, whether or not any is in range."""
    return _verdict_for_targets(ctx, _targets(ctx, twist))


def dichotomy_check(ctx: FixedBaseContext, twist: Mapping[int, LocalPoint] | None,
                    grid: Sequence[int]) -> DichotomyResult:
    """
    Compare the predicted limit for lifts agreeing with lift + twist on S (no twist:
    totally split conditions) with the HNP share among such lifts.
    """
    targets = _targets(ctx, twist)
    predicted = _verdict_for_targets(ctx, targets)
    matching = [record for record in ctx.lifts
                if all(record_point(record, p) == point for p, point in targets.items())]
    if not matching:
        raise UndefinedRatioError('no lift matches the local conditions in range')
    curve = fold_curve(matching, grid, PREDICATES['hnp'])
    return DichotomyResult(ctx, predicted, curve, curve_trend(curve))


@dataclass(frozen=True)
class TrichotomyResult:
    verdict: LimitVerdict
    curve: DensityCurve
    consistency: str


def trichotomy_report(A: FinAbGroup, X: int, grid: Sequence[int] | None = None, jobs: int = 1) -> TrichotomyResult:
    """
    The limit classification next to the HNP curve up to X. For One the curve must
    not fall; for OpenInterval the last defined ratio lies inside the margin, since
    small populations at the start of the grid often sit at 1.
    """
    verdict = classify_limit(A)
    curve = density_curve(A, geometric_grid(X) if grid is None else grid, 'hnp', jobs)
    defined = [ratio for ratio in curve.ratios if ratio is not None]
    if not defined:
        consistent = False
    elif verdict.tag is LimitTag.ONE:
        consistent = defined[-1] >= defined[0]
    else:
        margin = Fraction(settings.interior_margin).limit_denominator(10 ** 6)
        consistent = margin <= defined[-1] <= 1 - margin
    return TrichotomyResult(verdict, curve, 'consistent' if consistent else 'inconsistent-at-this-range')
