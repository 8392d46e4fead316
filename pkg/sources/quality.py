"""
Data quality assessment: weighted dimension scores, an acceptability
verdict, trend tracking and the measure-strategy portfolio.
"""

import datetime
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from sources.errors import (CleansingError, ConfigInvalidError, EmptyDatasetError,
                            NonMonotoneTimestampError)
from sources.logger import Logger
from sources.render import render_record, render_slot
from sources.schemas import (SLOT_BY_KIND, CleansedRecord, DefectCode, Dimension, FieldKind, FieldSchema,
                             GoldenRecord, QualityReport, RawRecord, Strategy, StrategyInput, TrendPoint,
                             TrendSeries, Violation)
from sources.standardizer import Standardizer

logger = Logger("quality.log")

WEIGHT_TOLERANCE = 1e-9

class RuleKind(str, Enum):
    USABLE = "usable"
    VALID = "valid"
    CANONICAL = "canonical"
    FRESH = "fresh"

DIMENSION_OF_RULE = {
    RuleKind.USABLE: Dimension.COMPLETENESS,
    RuleKind.VALID: Dimension.CORRECTNESS,
    RuleKind.CANONICAL: Dimension.CONSISTENCY,
    RuleKind.FRESH: Dimension.TIMELINESS,
}

class TrendDirection(str, Enum):
    IMPROVING = "IMPROVING"
    DECLINING = "DECLINING"
    STABLE = "STABLE"

class Exemplar(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: Optional[str] = None
    updated: Optional[str] = None

class QualityRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: RuleKind
    field: str
    field_kind: FieldKind
    good: Tuple[Exemplar, ...] = Field(min_length=1)
    bad: Tuple[Exemplar, ...] = Field(min_length=1)

    @property
    def name(self) -> str:
        return f"{self.kind.value}:{self.field}"

class DimensionSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    dimension: Dimension
    weight: float = Field(ge=0.0, le=1.0)
    rules: Tuple[QualityRule, ...] = ()

class Outcome(NamedTuple):
    applicable: bool
    defect: Optional[DefectCode] = None

    @property
    def passed(self) -> bool:
        return self.applicable and self.defect is None

NOT_APPLICABLE = Outcome(applicable=False)
PASS = Outcome(applicable=True)

def _utc_naive(stamp: datetime.datetime) -> datetime.datetime:
    if stamp.tzinfo is not None:
        return stamp.astimezone(datetime.timezone.utc).replace(tzinfo=None)
    return stamp

@dataclass
class QualityContext:
    """What the rules need to judge a value: the standardizers and the freshness clock."""
    standardizer: Standardizer
    timeliness_horizon_days: int = 365
    now: datetime.datetime = field(default_factory=lambda: datetime.datetime.now(datetime.timezone.utc))

    def standardize(self, field_kind: FieldKind, raw: str):
        """(value or None, defect code) of a raw value; unparseable values give (None, TYPO)."""
        try:
            return self.standardizer.handler(SLOT_BY_KIND[field_kind])(raw)
        except CleansingError:
            return None, DefectCode.TYPO

    def age_days(self, updated: str) -> Optional[float]:
        try:
            stamp = _utc_naive(datetime.datetime.fromisoformat(updated))
        except ValueError:
            return None
        return (_utc_naive(self.now) - stamp).total_seconds() / 86400.0

def evaluate(rule: QualityRule, value: Optional[str], updated: Optional[str], context: QualityContext) -> Outcome:
    """Apply one rule to one (record, field) cell."""
    if rule.kind == RuleKind.FRESH:
        if updated is None:
            return NOT_APPLICABLE
        age = context.age_days(updated)
        if age is None or age > context.timeliness_horizon_days:
            return Outcome(True, DefectCode.OBSOLETE)
        return PASS
    if rule.kind == RuleKind.USABLE:
        if value is None:
            return Outcome(True, DefectCode.MISSING_INFO)
        standardized, _ = context.standardize(rule.field_kind, value)
        return PASS if standardized is not None else Outcome(True, DefectCode.INCOMPLETE)
    if value is None:
        return NOT_APPLICABLE
    standardized, code = context.standardize(rule.field_kind, value)
    if rule.kind == RuleKind.VALID:
        if standardized is not None:
            return PASS
        return Outcome(True, DefectCode.INCOMPLETE if code == DefectCode.INCOMPLETE else DefectCode.TYPO)
    if standardized is not None and render_slot(SLOT_BY_KIND[rule.field_kind], standardized) == value:
        return PASS
    return Outcome(True, DefectCode.TRANSFORM_FAULT)

# --- exemplars -----------------------------------------------------------

GOOD_VALUES = {
    FieldKind.PERSON_NAME: "John Smit",
    FieldKind.IDENTIFIER: "0000-0123-1345-3487",
    FieldKind.DATE: "1987-12-23",
    FieldKind.ADDRESS: "1 Main Street",
    FieldKind.FREE_TEXT: "12345",
}

# values that standardize but are not written canonically
NON_CANONICAL_VALUES = {
    FieldKind.PERSON_NAME: "Smit, John",
    FieldKind.IDENTIFIER: "0000012313453487",
    FieldKind.DATE: "12/23/1987",
    FieldKind.ADDRESS: "1 Main Street;",
}

INVALID_VALUES = {
    FieldKind.PERSON_NAME: "1234",
    FieldKind.IDENTIFIER: "12345",
    FieldKind.DATE: "1984",
    FieldKind.ADDRESS: "nowhere",
}

def default_exemplars(kind: RuleKind, field_kind: FieldKind,
                      context: QualityContext) -> Tuple[Tuple[Exemplar, ...], Tuple[Exemplar, ...]]:
    """
    Built-in good and bad exemplars of a rule kind for a field kind.
    exceptions:
        ConfigInvalidError: the rule kind cannot fail for this field kind
    """
    good_value = GOOD_VALUES[field_kind]
    if kind == RuleKind.FRESH:
        recent = _utc_naive(context.now) - datetime.timedelta(days=1)
        stale = _utc_naive(context.now) - datetime.timedelta(days=context.timeliness_horizon_days + 1)
        return (Exemplar(value=good_value, updated=recent.isoformat()),), \
               (Exemplar(value=good_value, updated=stale.isoformat()),)
    if kind == RuleKind.USABLE:
        bad = [Exemplar(value=None)]
        if field_kind == FieldKind.IDENTIFIER:
            bad.append(Exemplar(value="0000-0000-0000-0000"))
        return (Exemplar(value=good_value),), tuple(bad)
    if field_kind == FieldKind.FREE_TEXT:
        raise ConfigInvalidError(f"rule '{kind.value}' has no failing value for free text fields")
    if kind == RuleKind.VALID:
        return (Exemplar(value=good_value),), (Exemplar(value=INVALID_VALUES[field_kind]),)
    return (Exemplar(value=good_value),), \
           (Exemplar(value=NON_CANONICAL_VALUES[field_kind]), Exemplar(value=INVALID_VALUES[field_kind]))

def build_rule(kind: RuleKind, schema_field: FieldSchema, context: QualityContext) -> QualityRule:
    good, bad = default_exemplars(kind, schema_field.kind, context)
    return QualityRule(kind=kind, field=schema_field.name, field_kind=schema_field.kind, good=good, bad=bad)

def check_exemplars(specs: Sequence[DimensionSpec], context: QualityContext) -> None:
    """
    Every rule must pass its good exemplars and fail its bad ones.
    exceptions:
        ConfigInvalidError: a rule misclassifies one of its exemplars
    """
    for spec in specs:
        for rule in spec.rules:
            for exemplar in rule.good:
                if not evaluate(rule, exemplar.value, exemplar.updated, context).passed:
                    raise ConfigInvalidError(f"rule {rule.name} rejects its good exemplar {exemplar.value!r}")
            for exemplar in rule.bad:
                outcome = evaluate(rule, exemplar.value, exemplar.updated, context)
                if not outcome.applicable or outcome.passed:
                    raise ConfigInvalidError(f"rule {rule.name} accepts its bad exemplar {exemplar.value!r}")

def validate_specs(specs: Sequence[DimensionSpec]) -> None:
    if not specs:
        raise ConfigInvalidError("no quality dimension configured")
    dimensions = [spec.dimension for spec in specs]
    if len(set(dimensions)) != len(dimensions):
        raise ConfigInvalidError("a quality dimension is configured twice")
    total = sum(spec.weight for spec in specs)
    if abs(total - 1.0) > WEIGHT_TOLERANCE:
        raise ConfigInvalidError(f"quality weights sum to {total}, expected 1")
    for spec in specs:
        for rule in spec.rules:
            if DIMENSION_OF_RULE[rule.kind] != spec.dimension:
                raise ConfigInvalidError(f"rule {rule.name} does not measure {spec.dimension.value}")

def parse_rule_entries(entries: List[str], schema: List[FieldSchema],
                       context: QualityContext) -> Tuple[QualityRule, ...]:
    """Rules from "kind:field" entries."""
    by_name = {f.name.lower(): f for f in schema}
    rules = []
    for entry in entries:
        kind_text, _, field_name = entry.partition(":")
        try:
            kind = RuleKind(kind_text.strip().lower())
        except ValueError:
            raise ConfigInvalidError(f"unknown quality rule '{kind_text.strip()}'")
        schema_field = by_name.get(field_name.strip().lower())
        if schema_field is None:
            raise ConfigInvalidError(f"quality rule '{entry}' names an unknown field")
        rules.append(build_rule(kind, schema_field, context))
    return tuple(rules)

def default_dimension_specs(schema: List[FieldSchema], context: QualityContext,
                            weights: Optional[Dict[Dimension, float]] = None) -> List[DimensionSpec]:
    """Equal weights, every field checked by every rule kind that can fail for it."""
    weights = weights or {dimension: 0.25 for dimension in Dimension}
    typed = [f for f in schema if f.kind != FieldKind.FREE_TEXT]
    fields_of = {
        RuleKind.USABLE: schema,
        RuleKind.VALID: typed,
        RuleKind.CANONICAL: typed,
        RuleKind.FRESH: schema,
    }
    specs = []
    for kind, dimension in DIMENSION_OF_RULE.items():
        if dimension not in weights:
            continue
        rules = tuple(build_rule(kind, f, context) for f in fields_of[kind])
        specs.append(DimensionSpec(dimension=dimension, weight=weights[dimension], rules=rules))
    order = list(Dimension)
    return sorted(specs, key=lambda spec: order.index(spec.dimension))

# --- assessment ----------------------------------------------------------

AssessableRecord = Union[RawRecord, CleansedRecord, GoldenRecord]

def as_raw(record: AssessableRecord, schema: List[FieldSchema]) -> RawRecord:
    """Canonical input form of any record the pipeline produces."""
    if isinstance(record, RawRecord):
        return record
    if isinstance(record, CleansedRecord):
        return render_record(record, schema)
    values = {}
    seen = set()
    for schema_field in schema:
        slot = SLOT_BY_KIND[schema_field.kind]
        values[schema_field.name] = None if slot in seen else render_slot(slot, getattr(record, slot))
        seen.add(slot)
    return RawRecord(source_id=record.entity_ref.source_id, row_number=record.entity_ref.row_number, values=values)

def assess(records: Sequence[AssessableRecord], specs: Sequence[DimensionSpec], threshold: float,
           context: QualityContext, dataset_id: str = "dataset",
           run_timestamp: Optional[datetime.datetime] = None) -> QualityReport:
    """
    Score a dataset on the configured dimensions.
    Args:
        records: Raw, cleansed or golden records
        specs: Dimension specs with weights summing to 1
        threshold (float): Minimum aggregate for an acceptable verdict
        context (QualityContext): Standardizers and freshness clock
        dataset_id (str): Reported in the metadata block
        run_timestamp (datetime, optional): Defaults to now (UTC)
    Returns:
        QualityReport: a dimension without applicable checks scores 1.0
    exceptions:
        EmptyDatasetError: no records
        ConfigInvalidError: weights invalid or a rule misclassifies its exemplars
    """
    if not records:
        raise EmptyDatasetError(f"dataset {dataset_id} has no records")
    validate_specs(specs)
    check_exemplars(specs, context)
    raw_records = [as_raw(record, context.standardizer.schema) for record in records]
    per_dimension = {}
    violations = []
    for spec in specs:
        applicable = 0
        passed = 0
        for record in raw_records:
            for rule in spec.rules:
                outcome = evaluate(rule, record.values.get(rule.field), record.annotations.get(rule.field), context)
                if not outcome.applicable:
                    continue
                applicable += 1
                if outcome.passed:
                    passed += 1
                else:
                    violations.append(Violation(ref=record.ref, field=rule.field, defect=outcome.defect, rule=rule.name))
        per_dimension[spec.dimension] = passed / applicable if applicable else 1.0
    weights = {spec.dimension: spec.weight for spec in specs}
    aggregate = float(np.dot([weights[d] for d in per_dimension], [per_dimension[d] for d in per_dimension]))
    violations.sort(key=lambda v: (v.ref.sort_key, v.field, v.rule))
    report = QualityReport(
        dataset_id=dataset_id,
        per_dimension=per_dimension,
        weights=weights,
        aggregate=aggregate,
        threshold=threshold,
        acceptable=aggregate >= threshold,
        violations=violations,
        run_timestamp=run_timestamp or datetime.datetime.now(datetime.timezone.utc),
    )
    logger.info(f"Assessed {dataset_id}: aggregate {aggregate:.4f}, "
                f"{'acceptable' if report.acceptable else 'not acceptable'}, {len(violations)} violations")
    return report

# --- trends --------------------------------------------------------------

def record_trend(series: TrendSeries, report: QualityReport) -> TrendSeries:
    """
    Append a report to a trend series.
    exceptions:
        NonMonotoneTimestampError: the report is not newer than the last point
    """
    if series.points and report.run_timestamp <= series.points[-1].run_timestamp:
        raise NonMonotoneTimestampError(
            f"run {report.run_timestamp.isoformat()} is not after {series.points[-1].run_timestamp.isoformat()}")
    point = TrendPoint(run_timestamp=report.run_timestamp, aggregate=report.aggregate,
                       per_dimension=dict(report.per_dimension))
    return TrendSeries(dataset_id=series.dataset_id, points=list(series.points) + [point])

def trend_direction(series: TrendSeries, tolerance: float = WEIGHT_TOLERANCE) -> TrendDirection:
    if len(series.points) < 2:
        return TrendDirection.STABLE
    delta = series.points[-1].aggregate - series.points[-2].aggregate
    if delta > tolerance:
        return TrendDirection.IMPROVING
    if delta < -tolerance:
        return TrendDirection.DECLINING
    return TrendDirection.STABLE

# --- strategy ------------------------------------------------------------

def recommend_strategy(strategy_input: StrategyInput, cuts: Tuple[float, float] = (0.5, 0.5)) -> Strategy:
    """
    Measure portfolio: unimportant data is left alone, important data gets
    reactive measures when it rarely changes and proactive ones otherwise.
    """
    importance_cut, frequency_cut = cuts
    if not (0.0 < importance_cut < 1.0 and 0.0 < frequency_cut < 1.0):
        raise ConfigInvalidError(f"strategy cuts must lie in (0, 1), got {cuts}")
    if strategy_input.importance < importance_cut:
        return Strategy.LAISSEZ_FAIRE
    if strategy_input.change_frequency < frequency_cut:
        return Strategy.REACTIVE
    return Strategy.PROACTIVE
