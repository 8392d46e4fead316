"""
Canonical renderings of cleansed values.

Two forms exist: the input form, which the standardizer parses back to the
same value (used for idempotence and for assessing cleansed data), and the
table form used in the output files.
"""

from typing import Dict, List, Optional

from sources.schemas import CleansedRecord, FieldSchema, GoldenRecord, PersonName, RawRecord, StructuredAddress

TABLE_COLUMNS = ["Author ID", "First", "Last", "ORCID", "Birth Date", "Address"]
ENRICHED_COLUMNS = TABLE_COLUMNS + ["Zip"]

def render_first(name: PersonName) -> Optional[str]:
    if name.first is None:
        return None
    return f"{name.first}." if name.first_is_initial else name.first

def render_name(name: PersonName) -> str:
    """Input form, title included: "Dr. John Smit"."""
    parts = [name.title, render_first(name), name.middle, name.last]
    return " ".join(part for part in parts if part)

def render_address_input(address: StructuredAddress) -> str:
    """Input form: "123 6 th Street, Melbourne, FL 32904"."""
    state_zip = " ".join(part for part in (address.state, address.zip_code) if part)
    return ", ".join(part for part in (address.street, address.city, state_zip) if part)

def render_address_table(address: Optional[StructuredAddress], include_zip: bool = True) -> str:
    """Table form: "32904; FL; Melbourne; 123 6 th Street", components that are MISSING are skipped."""
    if address is None:
        return ""
    parts = [address.zip_code if include_zip else None, address.state, address.city, address.street]
    return "; ".join(part for part in parts if part)

def render_slot(slot: str, value) -> Optional[str]:
    """Input form of one slot value."""
    if value is None:
        return None
    if slot == "name":
        return render_name(value)
    if slot == "address":
        return render_address_input(value)
    return str(value)

def record_values(record: CleansedRecord) -> Dict[str, Optional[str]]:
    """Field name -> input-form string of a cleansed record."""
    values = dict(record.extras)
    for slot, field in record.slot_fields.items():
        values[field] = render_slot(slot, getattr(record, slot))
    return values

def render_record(record: CleansedRecord, schema: List[FieldSchema]) -> RawRecord:
    """Render a cleansed record back into a raw record in canonical input form."""
    values = record_values(record)
    return RawRecord(source_id=record.ref.source_id, row_number=record.ref.row_number,
                     values={field.name: values.get(field.name) for field in schema},
                     annotations=dict(record.annotations))

def _table_row(author_id, name, identifier, birth_date, address, include_zip=True) -> List[str]:
    return [
        author_id or "",
        (render_first(name) or "") if name else "",
        name.last if name else "",
        str(identifier) if identifier else "",
        str(birth_date) if birth_date else "",
        render_address_table(address, include_zip=include_zip),
    ]

def cleansed_row(record: CleansedRecord) -> List[str]:
    return _table_row(record.author_id, record.name, record.identifier, record.birth_date, record.address)

def render_enriched_row(record: CleansedRecord) -> List[str]:
    """Enrichment layout: address without the zip, zip in its own column."""
    row = _table_row(record.author_id, record.name, record.identifier, record.birth_date,
                     record.address, include_zip=False)
    zip_code = record.address.zip_code if record.address and record.address.zip_code else ""
    return row + [zip_code]

def golden_row(golden: GoldenRecord) -> List[str]:
    return _table_row(golden.author_id, golden.name, golden.identifier, golden.birth_date, golden.address)
