from datetime import datetime
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src.errors import InvalidInputError
from src.services.abgroup import FinAbGroup, Subgroup, subgroup_from_generators
from src.services.density import DensityCurve
from src.services.hnp import DecompFamily
from src.services.qfields import FieldRecord

GENERATOR_CONVENTION = ('odd p: least primitive root mod p that is primitive mod p^2, and 1+p; '
                        'p = 2: -1 and 5')


def subgroup_generators(H: Subgroup) -> list[list[int]]:
    return [list(g) for g in H.generators]


class RunManifest(BaseModel):
    command: str
    argv: list[str]
    group: str | None = None
    bounds: dict[str, int | str] = Field(default_factory=dict)
    deterministic: bool = True
    tool_version: str
    generators: str = GENERATOR_CONVENTION
    settings: dict[str, Any] = Field(default_factory=dict)
    started_at: datetime
    elapsed_seconds: float | None = None


class DecompFamilyModel(BaseModel):
    group: str
    decomposition_groups: list[list[str | list[int]]] = Field(default_factory=list)

    def to_family(self) -> tuple[FinAbGroup, DecompFamily]:
        A = FinAbGroup.parse(self.group)
        groups = []
        for gens in self.decomposition_groups:
            elements = [A.parse_element(g) if isinstance(g, str) else A.check(g) for g in gens]
            groups.append(subgroup_from_generators(A, elements))
        return A, DecompFamily(A, tuple(groups))


class RamifiedPlaceModel(BaseModel):
    p: int
    inertia: list[list[int]]
    frob: list[int]
    decomp: list[list[int]]
    e: int
    tame: list[int]
    wild: list[int]


class FieldRecordModel(BaseModel):
    group: str
    disc: int
    conductor: int
    ramified: list[RamifiedPlaceModel]
    hnp: bool
    conj: list[int]

    @classmethod
    def from_record(cls, record: FieldRecord) -> 'FieldRecordModel':
        places = [RamifiedPlaceModel(p=place.p, inertia=subgroup_generators(place.inertia),
                                     frob=list(place.frobenius), decomp=subgroup_generators(place.decomposition),
                                     e=place.disc_exponent, tame=list(place.local.tame_image),
                                     wild=list(place.local.wild_image))
                  for place in record.ramified]
        return cls(group=str(record.group), disc=record.discriminant, conductor=record.conductor,
                   ramified=places, hnp=record.hnp, conj=list(record.infinite_place))


class GroupReport(BaseModel):
    group: str
    invariant_factors: list[int]
    order: int
    cyclic: bool
    wedge: str
    ell: int | None = None
    torsion: str | None = None
    quotient: str | None = None
    family_size: int | None = None
    verdict: str | None = None
    summary: str
    manifest: RunManifest | None = None


class VerifyEntry(BaseModel):
    group: str
    verdict: str
    twogen: bool | None = None
    killing_pairing: list[str] | None = None
    killing_ok: bool | None = None
    consistent: bool
    passed: bool


class VerifyReport(BaseModel):
    bound: int
    checked: int
    passed: bool
    partial: bool = False
    failures: list[str] = Field(default_factory=list)
    groups: list[VerifyEntry] = Field(default_factory=list)
    summary: str
    manifest: RunManifest | None = None


class CurvePoint(BaseModel):
    X: int
    total: int
    hits: int
    ratio: str | None = None

    @classmethod
    def rows(cls, curve: DensityCurve) -> list['CurvePoint']:
        return [cls(X=X, total=total, hits=hits, ratio=None if ratio is None else str(ratio))
                for X, total, hits, ratio in zip(curve.thresholds, curve.totals, curve.hits, curve.ratios)]


class WoodReport(BaseModel):
    group: str
    ordering: str
    max_bound: int
    specs: list[str]
    model: str
    empirical: str
    hits: int
    total: int
    band: float
    within_band: bool
    summary: str
    manifest: RunManifest | None = None


class DichotomyReport(BaseModel):
    group: str
    base_group: str
    base_ramified: list[int]
    base_disc: int
    lift_disc: int
    places: list[int]
    split_in_family: bool = True
    twist: dict[str, str] | None = None
    predicted: int
    curve: list[CurvePoint]
    trend: str
    agrees: bool
    summary: str
    manifest: RunManifest | None = None


class TrichotomyReport(BaseModel):
    group: str
    verdict: str
    ell: int
    quotient: str
    curve: list[CurvePoint]
    consistency: str
    summary: str
    manifest: RunManifest | None = None


class CountPoint(BaseModel):
    X: int
    N: int


class WrightReport(BaseModel):
    group: str
    power: str
    logpower: str
    power_est: float
    c_est: float
    counts: list[CountPoint]
    summary: str
    manifest: RunManifest | None = None


class RunSummary(BaseModel):
    id: int
    command: str
    group: str
    max_disc: str
    field_count: int
    created_at: datetime

    model_config = ConfigDict(from_attributes=True)


def load_decomp_family(text: str) -> tuple[FinAbGroup, DecompFamily]:
    """Parse the JSON input of the hnp command; malformed input becomes InvalidInputError."""
    try:
        model = DecompFamilyModel.model_validate_json(text)
    except ValidationError as err:
        raise InvalidInputError(f'malformed decomposition family: {err.error_count()} error(s)') from err
    return model.to_family()
