import re
import datetime
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

class FieldKind(str, Enum):
    PERSON_NAME = "PERSON_NAME"
    IDENTIFIER = "IDENTIFIER"
    DATE = "DATE"
    ADDRESS = "ADDRESS"
    FREE_TEXT = "FREE_TEXT"

class FieldState(str, Enum):
    RAW = "RAW"
    VALID = "VALID"
    CORRECTED = "CORRECTED"
    MISSING = "MISSING"
    REJECTED = "REJECTED"

class DefectCode(str, Enum):
    """Typical causes of data quality defects, by the process that introduces them."""
    # data collection
    TYPO = "TYPO"
    MISSING_INFO = "MISSING_INFO"
    CONTRADICTORY = "CONTRADICTORY"
    REDUNDANT = "REDUNDANT"
    OBSOLETE = "OBSOLETE"
    INCOMPLETE = "INCOMPLETE"
    IRRELEVANT = "IRRELEVANT"
    # data transfer
    TRANSFER_FAULT = "TRANSFER_FAULT"
    # data integration
    TRANSFORM_FAULT = "TRANSFORM_FAULT"

class TokenClass(str, Enum):
    WORD = "WORD"
    INITIAL = "INITIAL"
    TITLE = "TITLE"
    NUMBER = "NUMBER"
    ORDINAL_SUFFIX = "ORDINAL_SUFFIX"
    DATE_PART = "DATE_PART"
    ZIP = "ZIP"
    STATE_CODE = "STATE_CODE"
    STREET_TYPE = "STREET_TYPE"
    COUNTRY = "COUNTRY"
    SEPARATOR = "SEPARATOR"
    UNKNOWN = "UNKNOWN"

# CleansedRecord slots filled by the first schema field of each kind
SLOT_BY_KIND = {
    FieldKind.FREE_TEXT: "author_id",
    FieldKind.PERSON_NAME: "name",
    FieldKind.IDENTIFIER: "identifier",
    FieldKind.DATE: "birth_date",
    FieldKind.ADDRESS: "address",
}

class FieldSchema(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1)
    kind: FieldKind
    required: bool = False

def validate_schema(schema: List[FieldSchema]) -> List[FieldSchema]:
    """Check the schema invariants: at least one field, unique names (case-insensitive)."""
    if not schema:
        raise ValueError("schema has no fields")
    seen = set()
    for field in schema:
        key = field.name.lower()
        if key in seen:
            raise ValueError(f"duplicate schema field: {field.name}")
        seen.add(key)
    return schema

def default_author_schema(required: Tuple[str, ...] = ()) -> List[FieldSchema]:
    """The author schema of the bundled research-information fixture."""
    fields = [
        ("Author ID", FieldKind.FREE_TEXT),
        ("Name", FieldKind.PERSON_NAME),
        ("ORCID", FieldKind.IDENTIFIER),
        ("Birth Date", FieldKind.DATE),
        ("Address", FieldKind.ADDRESS),
    ]
    return [FieldSchema(name=name, kind=kind, required=name in required) for name, kind in fields]

class RecordRef(BaseModel):
    model_config = ConfigDict(frozen=True)

    source_id: str
    row_number: int = Field(ge=1)

    @property
    def sort_key(self) -> Tuple[str, int]:
        return (self.source_id, self.row_number)

    def __lt__(self, other: "RecordRef") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self):
        return f"{self.source_id}#{self.row_number}"

class RawRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    source_id: str
    row_number: int = Field(ge=1)
    values: Dict[str, Optional[str]]
    annotations: Dict[str, str] = Field(default_factory=dict)

    @field_validator("values")
    @classmethod
    def blank_is_missing(cls, values: Dict[str, Optional[str]]) -> Dict[str, Optional[str]]:
        cleaned = {}
        for name, value in values.items():
            if value is None:
                cleaned[name] = None
                continue
            value = value.strip()
            cleaned[name] = value if value else None
        return cleaned

    @property
    def ref(self) -> RecordRef:
        return RecordRef(source_id=self.source_id, row_number=self.row_number)

    def jsonify(self) -> dict:
        return {
            "source_id": self.source_id,
            "row_number": self.row_number,
            "values": dict(self.values),
            "annotations": dict(self.annotations),
        }

class FieldStatus(BaseModel):
    model_config = ConfigDict(frozen=True)

    state: FieldState
    violation_codes: Tuple[DefectCode, ...] = ()

    @model_validator(mode="after")
    def codes_required(self) -> "FieldStatus":
        if self.state in (FieldState.REJECTED, FieldState.CORRECTED) and not self.violation_codes:
            raise ValueError(f"{self.state.value} status needs at least one violation code")
        return self

    def with_code(self, state: FieldState, code: DefectCode) -> "FieldStatus":
        codes = self.violation_codes if code in self.violation_codes else self.violation_codes + (code,)
        return FieldStatus(state=state, violation_codes=codes)

    def __str__(self):
        codes = ",".join(code.value for code in self.violation_codes)
        return f"{self.state.value}[{codes}]" if codes else self.state.value

class StageIssue(BaseModel):
    """A non-fatal data problem reported by a stage (MALFORMED_ROW, GAZETTEER_MISS, ...)."""
    model_config = ConfigDict(frozen=True)

    code: str
    message: str
    source_id: Optional[str] = None
    row_number: Optional[int] = None
    field: Optional[str] = None

    def __str__(self):
        where = f" at {self.source_id}#{self.row_number}" if self.row_number is not None else ""
        return f"{self.code}{where}: {self.message}"

class Token(BaseModel):
    model_config = ConfigDict(frozen=True)

    text: str
    token_class: TokenClass
    span: Tuple[int, int]

    def __str__(self):
        return f"{self.token_class.value} {self.text!r}"

class FieldProfile(BaseModel):
    field: str
    pattern_histogram: Dict[str, int]
    distinct_count: int
    missing_count: int

    @property
    def total(self) -> int:
        return sum(self.pattern_histogram.values()) + self.missing_count

    def jsonify(self) -> dict:
        return {
            "field": self.field,
            "pattern_histogram": dict(sorted(self.pattern_histogram.items())),
            "distinct_count": self.distinct_count,
            "missing_count": self.missing_count,
        }

class PersonName(BaseModel):
    model_config = ConfigDict(frozen=True)

    first: Optional[str] = None
    middle: Optional[str] = None
    last: str = Field(min_length=1)
    first_is_initial: bool = False
    title: Optional[str] = None

    @model_validator(mode="after")
    def initial_is_one_letter(self) -> "PersonName":
        if self.first_is_initial and (self.first is None or len(self.first) != 1 or not self.first.isalpha()):
            raise ValueError("an initial first name must be a single letter")
        return self

CANONICAL_ID_PATTERN = re.compile(r"^[0-9A-F]{4}-[0-9A-F]{4}-[0-9A-F]{4}-[0-9A-F]{4}$")

class CanonicalId(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: str

    @field_validator("value")
    @classmethod
    def check_pattern(cls, value: str) -> str:
        if not CANONICAL_ID_PATTERN.match(value):
            raise ValueError(f"not a canonical identifier: {value}")
        if set(value) <= {"0", "-"}:
            raise ValueError("the all-zero identifier is a placeholder")
        return value

    def __str__(self):
        return self.value

class CanonicalDate(BaseModel):
    model_config = ConfigDict(frozen=True)

    year: int
    month: int = Field(ge=1, le=12)
    day: int = Field(ge=1, le=31)

    @model_validator(mode="after")
    def calendar_valid(self) -> "CanonicalDate":
        datetime.date(self.year, self.month, self.day)
        return self

    def iso(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day:02d}"

    def __str__(self):
        return self.iso()

class StructuredAddress(BaseModel):
    model_config = ConfigDict(frozen=True)

    street: Optional[str] = None
    city: Optional[str] = None
    state: Optional[str] = None
    zip_code: Optional[str] = None
    # comparison tokens of the street, ordinals fused ("6 th" -> "6th")
    street_key: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def not_empty(self) -> "StructuredAddress":
        if not any((self.street, self.city, self.state, self.zip_code)):
            raise ValueError("address has no component")
        if self.state is not None and not re.match(r"^[A-Z]{2}$", self.state):
            raise ValueError(f"state must be a 2-letter code: {self.state}")
        if self.zip_code is not None and not re.match(r"^\d{5}$", self.zip_code):
            raise ValueError(f"zip must be 5 digits: {self.zip_code}")
        return self

    @property
    def completeness(self) -> int:
        return sum(1 for part in (self.street, self.city, self.state, self.zip_code) if part)

    @property
    def street_core(self) -> Tuple[str, ...]:
        """Street key without plain house numbers, order-independent."""
        return tuple(sorted(set(tok for tok in self.street_key if not tok.isdigit())))

class CleansedRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    ref: RecordRef
    author_id: Optional[str] = None
    name: Optional[PersonName] = None
    identifier: Optional[CanonicalId] = None
    birth_date: Optional[CanonicalDate] = None
    address: Optional[StructuredAddress] = None
    field_status: Dict[str, FieldStatus]
    # slot name -> schema field name, e.g. "name" -> "Name"
    slot_fields: Dict[str, str] = Field(default_factory=dict)
    extras: Dict[str, Optional[str]] = Field(default_factory=dict)
    annotations: Dict[str, str] = Field(default_factory=dict)
    issues: Tuple[str, ...] = ()

    def field_for(self, slot: str) -> Optional[str]:
        return self.slot_fields.get(slot)

    def status_of(self, slot: str) -> Optional[FieldStatus]:
        field = self.field_for(slot)
        return self.field_status.get(field) if field else None

class MatchPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    left: RecordRef
    right: RecordRef
    score: float = Field(ge=0.0, le=1.0)
    evidence: Dict[str, float] = Field(default_factory=dict)

    def jsonify(self) -> dict:
        return {
            "left": str(self.left),
            "right": str(self.right),
            "score": round(self.score, 6),
            "evidence": {name: round(value, 6) for name, value in sorted(self.evidence.items())},
        }

class MatchCluster(BaseModel):
    members: List[RecordRef] = Field(min_length=1)
    pairs: List[MatchPair] = Field(default_factory=list)

    def jsonify(self) -> dict:
        return {
            "members": [str(ref) for ref in self.members],
            "pairs": [pair.jsonify() for pair in self.pairs],
        }

class GoldenRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    entity_ref: RecordRef
    author_id: Optional[str] = None
    name: Optional[PersonName] = None
    identifier: Optional[CanonicalId] = None
    birth_date: Optional[CanonicalDate] = None
    address: Optional[StructuredAddress] = None
    lineage: Dict[str, Tuple[RecordRef, ...]] = Field(default_factory=dict)
    members: Tuple[RecordRef, ...] = ()

    def jsonify(self) -> dict:
        return {
            "entity": str(self.entity_ref),
            "members": [str(ref) for ref in self.members],
            "lineage": {field: [str(ref) for ref in refs] for field, refs in sorted(self.lineage.items())},
        }

class Dimension(str, Enum):
    COMPLETENESS = "COMPLETENESS"
    CORRECTNESS = "CORRECTNESS"
    TIMELINESS = "TIMELINESS"
    CONSISTENCY = "CONSISTENCY"

class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    ref: RecordRef
    field: str
    defect: DefectCode
    rule: str

    def jsonify(self) -> dict:
        return {"record": str(self.ref), "field": self.field, "defect": self.defect.value, "rule": self.rule}

class QualityReport(BaseModel):
    dataset_id: str
    per_dimension: Dict[Dimension, float]
    weights: Dict[Dimension, float]
    aggregate: float
    threshold: float
    acceptable: bool
    violations: List[Violation] = Field(default_factory=list)
    run_timestamp: datetime.datetime

    def jsonify(self) -> dict:
        return {
            "metadata": {"dataset_id": self.dataset_id, "run_timestamp": self.run_timestamp.isoformat()},
            "per_dimension": {dim.value: round(score, 9) for dim, score in self.per_dimension.items()},
            "weights": {dim.value: weight for dim, weight in self.weights.items()},
            "aggregate": round(self.aggregate, 9),
            "threshold": self.threshold,
            "acceptable": self.acceptable,
            "violations": [violation.jsonify() for violation in self.violations],
        }

class TrendPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    run_timestamp: datetime.datetime
    aggregate: float
    per_dimension: Dict[Dimension, float]

class TrendSeries(BaseModel):
    dataset_id: str
    points: List[TrendPoint] = Field(default_factory=list)

    @model_validator(mode="after")
    def strictly_increasing(self) -> "TrendSeries":
        for before, after in zip(self.points, self.points[1:]):
            if after.run_timestamp <= before.run_timestamp:
                raise ValueError("trend timestamps must be strictly increasing")
        return self

class Strategy(str, Enum):
    LAISSEZ_FAIRE = "LAISSEZ_FAIRE"
    REACTIVE = "REACTIVE"
    PROACTIVE = "PROACTIVE"

class StrategyInput(BaseModel):
    model_config = ConfigDict(frozen=True)

    # externally quantified cost of possible quality deficiencies, normalized
    importance: float = Field(ge=0.0, le=1.0)
    change_frequency: float = Field(ge=0.0, le=1.0)
