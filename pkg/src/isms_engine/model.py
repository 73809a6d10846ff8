"""Core domain vocabulary: assets, CIA profiles, threats, controls, roles.

Every type here is an immutable value validated at construction. Out-of-range
ordinals and malformed references are rejected before they can reach any
register or store.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .errors import OutOfRange, UnknownAssetRef, ValidationError


class CiaLevel(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


class AssetGroup(str, Enum):
    PEOPLE = "People"
    PROCEDURE = "Procedure"
    DATA_INFORMATION = "DataInformation"
    SOFTWARE = "Software"
    HARDWARE = "Hardware"
    NETWORKING = "Networking"


class ThreatCategory(str, Enum):
    NATURAL = "Natural"
    HUMAN = "Human"
    ENVIRONMENTAL = "Environmental"


class VulnerabilitySource(str, Enum):
    PROCEDURE_REVIEW = "ProcedureReview"
    VA_REPORT = "VAReport"
    OTHER = "Other"


class ControlStatus(str, Enum):
    EXISTING = "Existing"
    PLANNED = "Planned"


class Role(str, Enum):
    ASSESSOR = "Assessor"
    RISK_OWNER = "RiskOwner"
    INFOSEC_OFFICIAL = "InfoSecOfficial"
    HEAD_OF_IT = "HeadOfIT"
    IT_OPERATIONS = "ITOperations"
    IT_AUDIT = "ITAudit"
    CISO = "CISO"
    TOP_MANAGEMENT = "TopManagement"
    DBA = "DBA"
    CORRECTIVE_ACTIONS_ADMIN = "CorrectiveActionsAdmin"


#: Roles that must all be present on a risk assessment team.
REQUIRED_TEAM_ROLES = (
    Role.INFOSEC_OFFICIAL,
    Role.HEAD_OF_IT,
    Role.IT_OPERATIONS,
    Role.IT_AUDIT,
)


def check_range(name: str, value: int, low: int, high: int) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or not low <= value <= high:
        raise OutOfRange(f"{name} must be an integer in {low}..{high}, got {value!r}")
    return value


def check_text(name: str, value: str) -> str:
    if not isinstance(value, str) or not value.strip():
        raise ValidationError(f"{name} must be non-empty text")
    return value


def coerce_enum(enum_cls, value, name: str):
    if isinstance(value, enum_cls):
        return value
    try:
        return enum_cls(value)
    except ValueError as exc:
        allowed = ", ".join(m.value for m in enum_cls)
        raise ValidationError(f"{name} must be one of: {allowed}; got {value!r}") from exc


@dataclass(frozen=True)
class CiaProfile:
    """Confidentiality / integrity / availability levels; all three required."""

    confidentiality: CiaLevel
    integrity: CiaLevel
    availability: CiaLevel

    def __post_init__(self) -> None:
        for dim in ("confidentiality", "integrity", "availability"):
            object.__setattr__(self, dim, coerce_enum(CiaLevel, getattr(self, dim), dim))

    def to_doc(self) -> dict:
        return {
            "confidentiality": self.confidentiality.value,
            "integrity": self.integrity.value,
            "availability": self.availability.value,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "CiaProfile":
        return cls(doc["confidentiality"], doc["integrity"], doc["availability"])


@dataclass(frozen=True)
class Actor:
    id: str
    name: str
    role: Role

    def __post_init__(self) -> None:
        check_text("actor id", self.id)
        check_text("actor name", self.name)
        object.__setattr__(self, "role", coerce_enum(Role, self.role, "role"))

    def to_doc(self) -> dict:
        return {"id": self.id, "name": self.name, "role": self.role.value}

    @classmethod
    def from_doc(cls, doc: dict) -> "Actor":
        return cls(doc["id"], doc.get("name", doc["id"]), doc["role"])


@dataclass(frozen=True)
class Asset:
    id: str
    name: str
    group: AssetGroup
    owner: str
    custodian: str
    criticality: int
    cia: CiaProfile
    dependencies: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        check_text("asset id", self.id)
        check_text("asset name", self.name)
        check_text("owner", self.owner)
        check_text("custodian", self.custodian)
        object.__setattr__(self, "group", coerce_enum(AssetGroup, self.group, "group"))
        check_range("criticality", self.criticality, 1, 5)
        if not isinstance(self.cia, CiaProfile):
            object.__setattr__(self, "cia", CiaProfile.from_doc(self.cia))
        object.__setattr__(self, "dependencies", tuple(self.dependencies))
        if self.id in self.dependencies:
            raise ValidationError(f"asset {self.id} may not depend on itself")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "group": self.group.value,
            "owner": self.owner,
            "custodian": self.custodian,
            "criticality": self.criticality,
            "cia": self.cia.to_doc(),
            "dependencies": list(self.dependencies),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Asset":
        return cls(
            id=doc["id"],
            name=doc["name"],
            group=doc["group"],
            owner=doc["owner"],
            custodian=doc["custodian"],
            criticality=doc["criticality"],
            cia=CiaProfile.from_doc(doc["cia"]),
            dependencies=tuple(doc.get("dependencies", ())),
        )


@dataclass(frozen=True)
class Threat:
    id: str
    name: str
    category: ThreatCategory
    frequency: int  # 1 = rare .. 5 = frequent

    def __post_init__(self) -> None:
        check_text("threat id", self.id)
        check_text("threat name", self.name)
        object.__setattr__(self, "category", coerce_enum(ThreatCategory, self.category, "category"))
        check_range("frequency", self.frequency, 1, 5)

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "category": self.category.value,
            "frequency": self.frequency,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Threat":
        return cls(doc["id"], doc["name"], doc["category"], doc["frequency"])


@dataclass(frozen=True)
class Vulnerability:
    id: str
    description: str
    source: VulnerabilitySource
    affected_assets: tuple[str, ...]

    def __post_init__(self) -> None:
        check_text("vulnerability id", self.id)
        check_text("description", self.description)
        object.__setattr__(self, "source", coerce_enum(VulnerabilitySource, self.source, "source"))
        object.__setattr__(self, "affected_assets", tuple(self.affected_assets))
        if not self.affected_assets:
            raise ValidationError("vulnerability must name at least one affected asset")

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "source": self.source.value,
            "affectedAssets": list(self.affected_assets),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Vulnerability":
        return cls(doc["id"], doc["description"], doc["source"], tuple(doc["affectedAssets"]))


@dataclass(frozen=True)
class Control:
    """A safeguard, existing or planned, applied to zero or more assets.

    Only Existing controls offset likelihood; Planned ones are catalogued for
    treatment but do not mitigate anything today.
    """

    id: str
    description: str
    status: ControlStatus
    effectiveness: int  # 0 = none .. 4 = strong
    applies_to: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        check_text("control id", self.id)
        check_text("description", self.description)
        object.__setattr__(self, "status", coerce_enum(ControlStatus, self.status, "status"))
        check_range("effectiveness", self.effectiveness, 0, 4)
        object.__setattr__(self, "applies_to", tuple(self.applies_to))

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "status": self.status.value,
            "effectiveness": self.effectiveness,
            "appliesTo": list(self.applies_to),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Control":
        return cls(
            doc["id"],
            doc["description"],
            doc["status"],
            doc["effectiveness"],
            tuple(doc.get("appliesTo", ())),
        )


@dataclass(frozen=True)
class TeamValidation:
    valid: bool
    missing: tuple[Role, ...]


def validate_assessment_team(members: Iterable[Actor]) -> TeamValidation:
    """Check that a team carries every required assessment role.

    Valid iff the member set contains at least one InfoSecOfficial, HeadOfIT,
    ITOperations and ITAudit; extra members never invalidate a team.
    """
    present = {m.role for m in members}
    missing = tuple(r for r in REQUIRED_TEAM_ROLES if r not in present)
    return TeamValidation(valid=not missing, missing=missing)


def check_dependency_cycle(assets: Sequence[Asset]) -> list[list[str]]:
    """Enumerate every directed cycle in the asset dependency graph.

    Cycles are reported as warnings, not rejected: real infrastructures can
    have mutual dependencies. Each cycle is listed once, rotated so its
    lexicographically smallest asset id comes first; the result is sorted.
    Raises UnknownAssetRef if a dependency points outside the collection.
    """
    graph: dict[str, tuple[str, ...]] = {}
    for asset in assets:
        graph[asset.id] = asset.dependencies
    for asset in assets:
        for dep in asset.dependencies:
            if dep not in graph:
                raise UnknownAssetRef(dep)

    cycles: set[tuple[str, ...]] = set()

    def canonical(path: tuple[str, ...]) -> tuple[str, ...]:
        pivot = path.index(min(path))
        return path[pivot:] + path[:pivot]

    def walk(node: str, path: list[str], on_path: set[str]) -> None:
        for nxt in graph[node]:
            if nxt in on_path:
                if nxt == path[0]:
                    cycles.add(canonical(tuple(path)))
                continue
            path.append(nxt)
            on_path.add(nxt)
            walk(nxt, path, on_path)
            on_path.discard(nxt)
            path.pop()

    for start in graph:
        walk(start, [start], {start})

    return [list(c) for c in sorted(cycles)]
