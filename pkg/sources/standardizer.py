"""
Correction and standardization stage.

Tokenized raw values become canonical typed values. Dirty data never raises
out of `cleanse_record`: every field ends up VALID, CORRECTED, MISSING or
REJECTED with the defect codes explaining the change.
"""

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

from pydantic import ValidationError

from sources.enricher import Gazetteer
from sources.errors import CleansingError, InvalidIdError, UnparseableAddressError, UnparseableNameError
from sources.lexicons import Lexicons, normalize_entry
from sources.logger import Logger
from sources.parser_profiler import street_key, tokenize
from sources.render import render_slot
from sources.schemas import (SLOT_BY_KIND, CanonicalDate, CanonicalId, CleansedRecord, DefectCode, FieldKind,
                             FieldSchema, FieldState, FieldStatus, PersonName, RawRecord, StructuredAddress,
                             Token, TokenClass, default_author_schema)

logger = Logger("standardizer.log")

@dataclass(frozen=True)
class StandardizerSettings:
    two_digit_year_pivot: int = 30
    enable_yymmdd_heuristics: bool = False
    id_placeholders: Tuple[str, ...] = ("0000-0000-0000-0000",)

DEFAULT_SETTINGS = StandardizerSettings()

@dataclass
class NameEvidence:
    """How often each token opens or closes a raw name in the dataset."""
    first_position: Counter = field(default_factory=Counter)
    last_position: Counter = field(default_factory=Counter)

    def add(self, tokens: List[Token]) -> None:
        parts = _name_parts(tokens)
        if len(parts) < 2:
            return
        self.first_position[normalize_entry(parts[0].text)] += 1
        self.last_position[normalize_entry(parts[-1].text)] += 1

    def looks_like_surname(self, text: str) -> bool:
        key = normalize_entry(text)
        return self.last_position[key] > self.first_position[key]

    def looks_like_given_name(self, text: str) -> bool:
        key = normalize_entry(text)
        return self.first_position[key] > self.last_position[key]

def collect_name_evidence(records: List[RawRecord], schema: List[FieldSchema],
                          lexicons: Lexicons) -> NameEvidence:
    evidence = NameEvidence()
    name_fields = [f.name for f in schema if f.kind == FieldKind.PERSON_NAME]
    if not name_fields:
        return evidence
    for record in records:
        value = record.values.get(name_fields[0])
        if value is not None:
            evidence.add(tokenize(value, FieldKind.PERSON_NAME, lexicons))
    return evidence

# --- names ---------------------------------------------------------------

def _name_parts(tokens: List[Token]) -> List[Token]:
    return [t for t in tokens if t.token_class in (TokenClass.WORD, TokenClass.INITIAL)]

def _comma_after_first(tokens: List[Token], parts: List[Token]) -> bool:
    if len(parts) < 2:
        return False
    start, end = tokens.index(parts[0]), tokens.index(parts[1])
    return any(t.token_class == TokenClass.SEPARATOR and t.text == "," for t in tokens[start:end])

def _should_flip(first: Token, second: Token, lexicons: Lexicons, evidence: Optional[NameEvidence]) -> bool:
    if first.token_class == TokenClass.INITIAL:
        return False
    if second.token_class == TokenClass.INITIAL:
        return True
    first_known = lexicons.is_given_name(first.text)
    second_known = lexicons.is_given_name(second.text)
    if second_known and not first_known:
        return True
    if not first_known and not second_known and evidence is not None:
        return evidence.looks_like_surname(first.text) and evidence.looks_like_given_name(second.text)
    return False

def _order_name(tokens: List[Token], lexicons: Lexicons,
                evidence: Optional[NameEvidence]) -> Tuple[PersonName, bool]:
    parts = _name_parts(tokens)
    if not parts:
        raise UnparseableNameError("no name token found")
    reordered = False
    if _comma_after_first(tokens, parts):
        parts = parts[1:] + parts[:1]
        reordered = True
    elif len(parts) == 2 and _should_flip(parts[0], parts[1], lexicons, evidence):
        parts = [parts[1], parts[0]]
        reordered = True
    titles = [t.text for t in tokens if t.token_class == TokenClass.TITLE]
    title = " ".join(titles) or None
    if len(parts) == 1:
        return PersonName(last=parts[0].text, title=title), reordered
    first = parts[0]
    is_initial = first.token_class == TokenClass.INITIAL
    middle = " ".join(t.text for t in parts[1:-1]) or None
    name = PersonName(first=first.text.rstrip('.') if is_initial else first.text,
                      middle=middle, last=parts[-1].text,
                      first_is_initial=is_initial, title=title)
    return name, reordered

def standardize_name(tokens: List[Token], lexicons: Optional[Lexicons] = None,
                     evidence: Optional[NameEvidence] = None) -> PersonName:
    """
    Build a PersonName from name tokens, title stripped and order corrected.
    exceptions:
        UnparseableNameError: no WORD or INITIAL token
    """
    name, _ = _order_name(tokens, lexicons or Lexicons(), evidence)
    return name

# --- identifiers ---------------------------------------------------------

def _compact_id(raw: str) -> str:
    return re.sub(r"[\s\-]", "", raw).upper()

def standardize_id(raw: str, settings: StandardizerSettings = DEFAULT_SETTINGS) -> Optional[CanonicalId]:
    """
    Canonical XXXX-XXXX-XXXX-XXXX identifier, or None for a placeholder.
    exceptions:
        InvalidIdError: not 16 significant characters in [0-9A-F]
    """
    compact = _compact_id(raw)
    if not re.fullmatch(r"[0-9A-F]{16}", compact):
        raise InvalidIdError(f"'{raw}' is not a 16-character identifier")
    placeholders = {_compact_id(p) for p in settings.id_placeholders}
    if compact in placeholders or set(compact) == {"0"}:
        return None
    return CanonicalId(value="-".join(compact[i:i + 4] for i in range(0, 16, 4)))

# --- dates ---------------------------------------------------------------

DATE_FORMATS: List[Tuple[re.Pattern, Tuple[str, str, str]]] = [
    (re.compile(r"([0-9]{4})-([0-9]{1,2})-([0-9]{1,2})"), ("year", "month", "day")),
    (re.compile(r"([0-9]{1,2})/([0-9]{1,2})/([0-9]{4})"), ("month", "day", "year")),
    (re.compile(r"([0-9]{1,2})/([0-9]{1,2})/([0-9]{2})"), ("month", "day", "yy")),
    (re.compile(r"([0-9]{1,2})\.([0-9]{1,2})\.([0-9]{4})"), ("day", "month", "year")),
    (re.compile(r"([0-9]{1,2})-([0-9]{1,2})-([0-9]{4})"), ("day", "month", "year")),
]

def expand_two_digit_year(yy: int, pivot: int) -> int:
    return 2000 + yy if yy < pivot else 1900 + yy

def _build_date(year: int, month: int, day: int) -> Optional[CanonicalDate]:
    try:
        return CanonicalDate(year=year, month=month, day=day)
    except (ValidationError, ValueError):
        return None

def _yymmdd(text: str, pivot: int) -> Optional[CanonicalDate]:
    yy, a, b = int(text[:2]), int(text[2:4]), int(text[4:])
    year = expand_two_digit_year(yy, pivot)
    return _build_date(year, a, b) or _build_date(year, b, a)

def standardize_date(raw: str, settings: StandardizerSettings = DEFAULT_SETTINGS) -> Optional[CanonicalDate]:
    """
    Calendar-valid date from the accepted formats, None when unrecognized or ambiguous.
    Whitespace around separators is ignored ("23.12. 1987").
    """
    text = re.sub(r"\s*([./\-])\s*", r"\1", raw.strip())
    for pattern, order in DATE_FORMATS:
        match = pattern.fullmatch(text)
        if match is None:
            continue
        parts = dict(zip(order, (int(group) for group in match.groups())))
        if "yy" in parts:
            parts["year"] = expand_two_digit_year(parts.pop("yy"), settings.two_digit_year_pivot)
        return _build_date(parts["year"], parts["month"], parts["day"])
    if settings.enable_yymmdd_heuristics and re.fullmatch(r"[0-9]{6}", text):
        return _yymmdd(text, settings.two_digit_year_pivot)
    return None

def date_defect(raw: str) -> DefectCode:
    """INCOMPLETE for year-only or too short values, TYPO otherwise."""
    groups = re.findall(r"[0-9]+", raw)
    if len(groups) < 3 and not (len(groups) == 1 and len(groups[0]) >= 6):
        return DefectCode.INCOMPLETE
    return DefectCode.TYPO

# --- addresses -----------------------------------------------------------

def _explicit_city(words: List[Token]) -> Optional[str]:
    return " ".join(t.text for t in words) or None

def standardize_address(tokens: List[Token], gazetteer: Optional[Gazetteer] = None,
                        lexicons: Optional[Lexicons] = None) -> StructuredAddress:
    """
    Structured US address from address tokens.
    The street ends at the last street type before the zip; the WORD run after it
    is the city. Numbers displaced behind the zip go back to the street: a plain
    house number to its head, a number with ordinal suffix in front of the street type.
    exceptions:
        UnparseableAddressError: no zip, no street type and no known city
    """
    gazetteer = gazetteer or Gazetteer()
    lexicons = lexicons or Lexicons()
    content = [t for t in tokens if t.token_class not in (TokenClass.SEPARATOR, TokenClass.COUNTRY)]
    zip_index = next((i for i, t in enumerate(content) if t.token_class == TokenClass.ZIP), None)
    before = content if zip_index is None else content[:zip_index]
    after = [] if zip_index is None else content[zip_index + 1:]

    type_index = max((i for i, t in enumerate(before) if t.token_class == TokenClass.STREET_TYPE), default=None)
    street_tokens = [] if type_index is None else before[:type_index + 1]
    rest = before if type_index is None else before[type_index + 1:]
    city_words = [t for t in rest if t.token_class == TokenClass.WORD]
    explicit_state = next((t.text.upper() for t in rest if t.token_class == TokenClass.STATE_CODE), None)

    house = []
    ordinals = []
    index = 0
    while index < len(after):
        token = after[index]
        following = after[index + 1] if index + 1 < len(after) else None
        if token.token_class == TokenClass.NUMBER and following is not None \
                and following.token_class == TokenClass.ORDINAL_SUFFIX:
            ordinals += [token, following]
            index += 2
            continue
        if token.token_class == TokenClass.NUMBER:
            house.append(token)
        elif token.token_class == TokenClass.WORD and not street_tokens and not city_words:
            city_words.append(token)
        elif token.token_class == TokenClass.STATE_CODE and explicit_state is None:
            explicit_state = token.text.upper()
        index += 1

    if street_tokens:
        street_list = house + street_tokens[:-1] + ordinals + street_tokens[-1:]
    else:
        street_list = house + ordinals
    street = " ".join(t.text for t in street_list) or None
    city = _explicit_city(city_words)
    zip_code = content[zip_index].text if zip_index is not None else None

    if zip_code is None and not street_tokens and not (gazetteer.has_city(city) or lexicons.is_known_city(city or "")):
        raise UnparseableAddressError("no zip, street type or known city")
    entry = gazetteer.lookup(zip_code)
    state = entry.state if entry is not None else explicit_state
    if city is None and entry is not None:
        city = entry.city
    try:
        return StructuredAddress(street=street, city=city, state=state, zip_code=zip_code,
                                 street_key=street_key(street_list, lexicons))
    except ValidationError as e:
        raise UnparseableAddressError(f"no usable address component: {e.errors()[0]['msg']}")

# --- records -------------------------------------------------------------

@dataclass
class Standardizer:
    """Shared read-only context of one cleansing run."""
    schema: List[FieldSchema]
    lexicons: Lexicons = field(default_factory=Lexicons)
    gazetteer: Gazetteer = field(default_factory=Gazetteer)
    settings: StandardizerSettings = DEFAULT_SETTINGS
    evidence: Optional[NameEvidence] = None

    def _name(self, raw: str) -> Tuple[PersonName, DefectCode]:
        tokens = tokenize(raw, FieldKind.PERSON_NAME, self.lexicons)
        name, reordered = _order_name(tokens, self.lexicons, self.evidence)
        return name, DefectCode.TYPO if reordered else DefectCode.TRANSFORM_FAULT

    def _identifier(self, raw: str) -> Tuple[Optional[CanonicalId], DefectCode]:
        value = standardize_id(raw, self.settings)
        return value, DefectCode.INCOMPLETE if value is None else DefectCode.TRANSFORM_FAULT

    def _date(self, raw: str) -> Tuple[Optional[CanonicalDate], DefectCode]:
        value = standardize_date(raw, self.settings)
        return value, date_defect(raw) if value is None else DefectCode.TRANSFORM_FAULT

    def _address(self, raw: str) -> Tuple[StructuredAddress, DefectCode]:
        tokens = tokenize(raw, FieldKind.ADDRESS, self.lexicons)
        return standardize_address(tokens, self.gazetteer, self.lexicons), DefectCode.TRANSFORM_FAULT

    def _text(self, raw: str) -> Tuple[str, DefectCode]:
        return raw, DefectCode.TRANSFORM_FAULT

    def handler(self, slot: str) -> Callable[[str], tuple]:
        return {
            "author_id": self._text,
            "name": self._name,
            "identifier": self._identifier,
            "birth_date": self._date,
            "address": self._address,
        }[slot]

    def cleanse(self, record: RawRecord) -> CleansedRecord:
        slots: Dict[str, object] = {}
        slot_fields: Dict[str, str] = {}
        status: Dict[str, FieldStatus] = {}
        extras: Dict[str, Optional[str]] = {}
        issues: List[str] = []
        for schema_field in self.schema:
            raw = record.values.get(schema_field.name)
            slot = SLOT_BY_KIND[schema_field.kind]
            if slot in slot_fields:
                extras[schema_field.name] = raw
                status[schema_field.name] = FieldStatus(state=FieldState.MISSING if raw is None else FieldState.VALID)
                continue
            slot_fields[slot] = schema_field.name
            if raw is None:
                status[schema_field.name] = FieldStatus(state=FieldState.MISSING)
                continue
            try:
                value, code = self.handler(slot)(raw)
            except CleansingError as e:
                logger.info(f"{record.ref} {schema_field.name} rejected: {e}")
                issues.append(f"{schema_field.name}: {e}")
                status[schema_field.name] = FieldStatus(state=FieldState.REJECTED, violation_codes=(DefectCode.TYPO,))
                continue
            if value is None:
                issues.append(f"{schema_field.name}: '{raw}' maps to MISSING ({code.value})")
                status[schema_field.name] = FieldStatus(state=FieldState.REJECTED, violation_codes=(code,))
                continue
            slots[slot] = value
            if render_slot(slot, value) == raw:
                status[schema_field.name] = FieldStatus(state=FieldState.VALID)
            else:
                status[schema_field.name] = FieldStatus(state=FieldState.CORRECTED, violation_codes=(code,))
        return CleansedRecord(ref=record.ref, field_status=status, slot_fields=slot_fields, extras=extras,
                              annotations=dict(record.annotations), issues=tuple(issues), **slots)

def cleanse_record(record: RawRecord, lexicons: Optional[Lexicons] = None,
                   gazetteer: Optional[Gazetteer] = None, schema: Optional[List[FieldSchema]] = None,
                   settings: StandardizerSettings = DEFAULT_SETTINGS,
                   evidence: Optional[NameEvidence] = None) -> CleansedRecord:
    """
    Apply the standardizers to every schema field of a raw record.
    Args:
        record (RawRecord): An ingested record
        lexicons (Lexicons, optional): Parser metadata, gazetteer postal codes included
        gazetteer (Gazetteer, optional): Zip -> (city, state) reference data
        schema (list, optional): Defaults to the record's own field order read as the author schema
        settings (StandardizerSettings): Pivot, heuristics and placeholders
        evidence (NameEvidence, optional): Dataset-wide name order evidence
    Returns:
        CleansedRecord: never raises on dirty data
    """
    if schema is None:
        schema = default_author_schema()
    standardizer = Standardizer(schema=schema, lexicons=lexicons or Lexicons(),
                                gazetteer=gazetteer or Gazetteer(), settings=settings, evidence=evidence)
    return standardizer.cleanse(record)

def cleanse_dataset(records: List[RawRecord], schema: List[FieldSchema], lexicons: Lexicons,
                    gazetteer: Gazetteer, settings: StandardizerSettings = DEFAULT_SETTINGS) -> List[CleansedRecord]:
    """Cleanse every record with name evidence gathered once over the dataset."""
    evidence = collect_name_evidence(records, schema, lexicons)
    standardizer = Standardizer(schema=schema, lexicons=lexicons, gazetteer=gazetteer,
                                settings=settings, evidence=evidence)
    cleansed = [standardizer.cleanse(record) for record in records]
    corrected = sum(1 for r in cleansed for s in r.field_status.values() if s.state == FieldState.CORRECTED)
    rejected = sum(1 for r in cleansed for s in r.field_status.values() if s.state == FieldState.REJECTED)
    logger.info(f"Cleansed {len(cleansed)} records: {corrected} fields corrected, {rejected} rejected")
    return cleansed
