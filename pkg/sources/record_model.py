"""
Ingestion of raw research-information datasets.

Two transport formats are read: delimited text with a header line (comma or
semicolon, detected from the header) and one JSON object per line.
"""

import io
import os
import csv
import json
from enum import Enum
from typing import Dict, List, Optional, Tuple

from sources.errors import IOFailureError, UnknownFieldError
from sources.logger import Logger
from sources.schemas import DefectCode, FieldSchema, RawRecord, StageIssue, validate_schema

logger = Logger("record_model.log")

ANNOTATION_SUFFIX = ".updated"
OBJECT_ANNOTATION_KEY = "_updated"

class DatasetFormat(str, Enum):
    DELIMITED = "DELIMITED"
    OBJECT = "OBJECT"

def detect_delimiter(header_line: str) -> str:
    return ';' if header_line.count(';') > header_line.count(',') else ','

def _schema_lookup(schema: List[FieldSchema]) -> Dict[str, str]:
    return {field.name.lower(): field.name for field in schema}

def _map_header(header: List[str], schema: List[FieldSchema]) -> List[Tuple[str, str]]:
    """
    Map header cells onto schema field names.
    Returns one (role, field name) pair per column, role being "value" or "annotation".
    """
    lookup = _schema_lookup(schema)
    mapping = []
    seen = set()
    for cell in header:
        name = cell.strip()
        role = "value"
        if name.lower().endswith(ANNOTATION_SUFFIX):
            name = name[:-len(ANNOTATION_SUFFIX)]
            role = "annotation"
        field = lookup.get(name.lower())
        if field is None:
            raise UnknownFieldError(f"header '{cell.strip()}' is not a schema field")
        if (role, field) in seen:
            raise UnknownFieldError(f"header '{cell.strip()}' appears twice")
        seen.add((role, field))
        mapping.append((role, field))
    absent = [field.name for field in schema if ("value", field.name) not in seen]
    if absent:
        logger.warning(f"Schema fields absent from file, loaded as MISSING: {absent}")
    return mapping

def _report_malformed(issues: Optional[List[StageIssue]], source_id: str, row_number: int, message: str) -> None:
    logger.warning(f"MALFORMED_ROW {source_id}#{row_number}: {message}")
    if issues is not None:
        issues.append(StageIssue(code="MALFORMED_ROW", message=message,
                                 source_id=source_id, row_number=row_number))

def _build_record(source_id: str, row_number: int, schema: List[FieldSchema],
                  values: Dict[str, Optional[str]], annotations: Dict[str, str]) -> RawRecord:
    full = {field.name: values.get(field.name) for field in schema}
    return RawRecord(source_id=source_id, row_number=row_number, values=full, annotations=annotations)

def _load_delimited(text: str, source_id: str, schema: List[FieldSchema],
                    issues: Optional[List[StageIssue]]) -> List[RawRecord]:
    if not text.strip():
        return []
    delimiter = detect_delimiter(text.splitlines()[0])
    # quoted cells may span lines
    reader = csv.reader(io.StringIO(text, newline=''), delimiter=delimiter)
    header = next(reader)
    mapping = _map_header(header, schema)
    records = []
    row_number = 0
    for row in reader:
        if not row:
            continue
        row_number += 1
        if len(row) != len(mapping):
            _report_malformed(issues, source_id, row_number,
                              f"expected {len(mapping)} columns, found {len(row)}")
            continue
        values = {}
        annotations = {}
        for (role, field), cell in zip(mapping, row):
            if role == "value":
                values[field] = cell
            elif cell.strip():
                annotations[field] = cell.strip()
        records.append(_build_record(source_id, row_number, schema, values, annotations))
    return records

def _load_objects(text: str, source_id: str, schema: List[FieldSchema],
                  issues: Optional[List[StageIssue]]) -> List[RawRecord]:
    lookup = _schema_lookup(schema)
    records = []
    row_number = 0
    for line in text.splitlines():
        if not line.strip():
            continue
        row_number += 1
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            _report_malformed(issues, source_id, row_number, f"invalid JSON: {e.msg}")
            continue
        if not isinstance(obj, dict):
            _report_malformed(issues, source_id, row_number, "line is not an object")
            continue
        values = {}
        annotations = {}
        for key, value in obj.items():
            if key == OBJECT_ANNOTATION_KEY and isinstance(value, dict):
                for annotated, stamp in value.items():
                    field = lookup.get(str(annotated).lower())
                    if field is None:
                        raise UnknownFieldError(f"annotation for unknown field '{annotated}'")
                    annotations[field] = str(stamp)
                continue
            field = lookup.get(str(key).lower())
            if field is None:
                raise UnknownFieldError(f"key '{key}' is not a schema field")
            values[field] = None if value is None else str(value)
        records.append(_build_record(source_id, row_number, schema, values, annotations))
    return records

def load_dataset(path: str, schema: List[FieldSchema],
                 fmt: DatasetFormat = DatasetFormat.DELIMITED,
                 source_id: Optional[str] = None,
                 issues: Optional[List[StageIssue]] = None) -> List[RawRecord]:
    """
    Load a dataset file into RawRecords.
    Args:
        path (str): The file to read (UTF-8)
        schema (List[FieldSchema]): The record schema; headers map onto it case-insensitively
        fmt (DatasetFormat): DELIMITED or OBJECT
        source_id (str, optional): Provenance id, defaults to the file name without extension
        issues (list, optional): Receives one MALFORMED_ROW StageIssue per skipped row
    Returns:
        List[RawRecord]: one record per well-formed data row, in file order
    exceptions:
        UnknownFieldError: a header or key is not in the schema
        IOFailureError: the file cannot be read
    """
    validate_schema(schema)
    if source_id is None:
        source_id = os.path.splitext(os.path.basename(path))[0]
    try:
        with open(path, 'r', encoding='utf-8-sig', newline='') as f:
            text = f.read()
    except OSError as e:
        raise IOFailureError(f"cannot read dataset {path}: {e}")
    if DatasetFormat(fmt) == DatasetFormat.OBJECT:
        records = _load_objects(text, source_id, schema, issues)
    else:
        records = _load_delimited(text, source_id, schema, issues)
    logger.info(f"Loaded {len(records)} records from {path}")
    return records

def serialize_dataset(records: List[RawRecord], schema: List[FieldSchema], path: str,
                      fmt: DatasetFormat = DatasetFormat.DELIMITED) -> None:
    """Write records back; MISSING is written as the empty string."""
    annotated = [field.name for field in schema
                 if any(field.name in record.annotations for record in records)]
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            if DatasetFormat(fmt) == DatasetFormat.OBJECT:
                for record in records:
                    obj = {field.name: record.values.get(field.name) or "" for field in schema}
                    if record.annotations:
                        obj[OBJECT_ANNOTATION_KEY] = dict(record.annotations)
                    f.write(json.dumps(obj, ensure_ascii=False) + "\n")
                return
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow([field.name for field in schema] + [name + ANNOTATION_SUFFIX for name in annotated])
            for record in records:
                row = [record.values.get(field.name) or "" for field in schema]
                row += [record.annotations.get(name, "") for name in annotated]
                writer.writerow(row)
    except OSError as e:
        raise IOFailureError(f"cannot write dataset {path}: {e}")

def validate_against_schema(record: RawRecord, schema: List[FieldSchema]) -> List[Tuple[str, DefectCode]]:
    """Report MISSING_INFO for every required field that is MISSING."""
    return [(field.name, DefectCode.MISSING_INFO)
            for field in schema
            if field.required and record.values.get(field.name) is None]
