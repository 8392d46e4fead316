"""
Enhancement stage: expand cleansed records with geographic reference data.
"""

import csv
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from sources.errors import ConfigInvalidError, DuplicateZipError, IOFailureError
from sources.logger import Logger
from sources.schemas import CleansedRecord, DefectCode, FieldState, StageIssue

logger = Logger("enricher.log")

GAZETTEER_COLUMNS = ("zip", "city", "state")

class GazetteerEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    city: str = Field(min_length=1)
    state: str = Field(pattern=r"^[A-Z]{2}$")

class Gazetteer(BaseModel):
    model_config = ConfigDict(frozen=True)

    entries: Dict[str, GazetteerEntry] = Field(default_factory=dict)

    @field_validator("entries")
    @classmethod
    def zip_keys(cls, entries: Dict[str, GazetteerEntry]) -> Dict[str, GazetteerEntry]:
        for zip_code in entries:
            if len(zip_code) != 5 or not zip_code.isdigit():
                raise ValueError(f"gazetteer zip must be 5 digits: {zip_code}")
        return entries

    def lookup(self, zip_code: Optional[str]) -> Optional[GazetteerEntry]:
        if zip_code is None:
            return None
        return self.entries.get(zip_code)

    def reverse(self, city: str, state: Optional[str] = None) -> Optional[str]:
        """Zip for (city, state), only when exactly one entry matches."""
        matches = [zip_code for zip_code, entry in self.entries.items()
                   if entry.city.lower() == city.lower() and (state is None or entry.state == state)]
        return matches[0] if len(matches) == 1 else None

    def has_city(self, city: Optional[str]) -> bool:
        if not city:
            return False
        return any(entry.city.lower() == city.lower() for entry in self.entries.values())

    def __len__(self):
        return len(self.entries)

def load_gazetteer(path: str) -> Gazetteer:
    """
    Load a "zip,city,state" file with header.
    Args:
        path (str): The gazetteer path
    Returns:
        Gazetteer: validated entries, empty for an empty file
    exceptions:
        DuplicateZipError: one zip mapped to two different (city, state) pairs
        IOFailureError: the file cannot be read
    """
    try:
        with open(path, 'r', encoding='utf-8-sig', newline='') as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise IOFailureError(f"cannot read gazetteer {path}: {e}")
    rows = [row for row in rows if any(cell.strip() for cell in row)]
    if not rows:
        logger.warning(f"Gazetteer {path} is empty")
        return Gazetteer()
    header = [cell.strip().lower() for cell in rows[0]]
    if any(column not in header for column in GAZETTEER_COLUMNS):
        raise ConfigInvalidError(f"gazetteer {path} needs columns {', '.join(GAZETTEER_COLUMNS)}")
    index = {column: header.index(column) for column in GAZETTEER_COLUMNS}
    entries = {}
    for line, row in enumerate(rows[1:], start=2):
        try:
            zip_code = row[index["zip"]].strip()
            entry = GazetteerEntry(city=row[index["city"]].strip(), state=row[index["state"]].strip())
        except (IndexError, ValidationError) as e:
            raise ConfigInvalidError(f"gazetteer {path} line {line} is invalid: {e}")
        known = entries.get(zip_code)
        if known is not None and known != entry:
            raise DuplicateZipError(f"zip {zip_code} maps to {known.city}/{known.state} and {entry.city}/{entry.state}")
        entries[zip_code] = entry
    try:
        gazetteer = Gazetteer(entries=entries)
    except ValidationError as e:
        raise ConfigInvalidError(f"gazetteer {path} is invalid: {e}")
    logger.info(f"Loaded gazetteer {path} with {len(gazetteer)} entries")
    return gazetteer

def _miss(record: CleansedRecord, message: str, issues: Optional[List[StageIssue]]) -> StageIssue:
    issue = StageIssue(code="GAZETTEER_MISS", message=message, source_id=record.ref.source_id,
                       row_number=record.ref.row_number, field=record.field_for("address"))
    logger.warning(str(issue))
    if issues is not None:
        issues.append(issue)
    return issue

def enrich_record(record: CleansedRecord, gazetteer: Gazetteer,
                  issues: Optional[List[StageIssue]] = None) -> CleansedRecord:
    """
    Fill MISSING city, state and zip of the record's address from the gazetteer.
    Existing values are never overwritten; a disagreement between the record
    and the gazetteer keeps the record's value and adds CONTRADICTORY.
    Args:
        record (CleansedRecord): A cleansed record
        gazetteer (Gazetteer): The reference data
        issues (list, optional): Receives GAZETTEER_MISS issues
    Returns:
        CleansedRecord: the enriched record (the same object when nothing changed)
    """
    address = record.address
    if address is None:
        return record
    updates = {}
    codes = []
    zip_code = address.zip_code
    if zip_code is None and address.city:
        zip_code = gazetteer.reverse(address.city, address.state)
        if zip_code is None:
            issue = _miss(record, f"no unique zip for {address.city}/{address.state or '?'}", issues)
            return record.model_copy(update={"issues": record.issues + (str(issue),)})
        updates["zip_code"] = zip_code
    entry = gazetteer.lookup(zip_code)
    if entry is None:
        issue = _miss(record, f"zip {zip_code} not in gazetteer" if zip_code else "address has no zip or city", issues)
        return record.model_copy(update={"issues": record.issues + (str(issue),)})
    for component in ("city", "state"):
        own = getattr(address, component)
        reference = getattr(entry, component)
        if own is None:
            updates[component] = reference
        elif own.lower() != reference.lower():
            codes.append(DefectCode.CONTRADICTORY)
            logger.info(f"{record.ref}: {component} '{own}' disagrees with gazetteer '{reference}'")
    if updates:
        codes.insert(0, DefectCode.MISSING_INFO)
    if not codes:
        return record
    field = record.field_for("address")
    status = record.field_status[field]
    for code in codes:
        state = FieldState.CORRECTED if code == DefectCode.MISSING_INFO else status.state
        status = status.with_code(state, code)
    enriched_address = address.model_copy(update=updates) if updates else address
    return record.model_copy(update={
        "address": enriched_address,
        "field_status": {**record.field_status, field: status},
    })

def enrich_dataset(records: List[CleansedRecord], gazetteer: Gazetteer,
                   issues: Optional[List[StageIssue]] = None) -> List[CleansedRecord]:
    return [enrich_record(record, gazetteer, issues) for record in records]
