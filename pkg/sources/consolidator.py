"""
Consolidation stage: merge each match cluster into one golden record and
push the canonical values back to the cluster members.
"""

from collections import defaultdict
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator

from sources.logger import Logger
from sources.render import render_slot
from sources.schemas import (CleansedRecord, DefectCode, FieldState, GoldenRecord, MatchCluster,
                             PersonName, RecordRef, StructuredAddress)

logger = Logger("consolidator.log")

SLOTS = ("author_id", "name", "identifier", "birth_date", "address")

class SurvivorshipRule(str, Enum):
    MAJORITY = "MAJORITY"
    MOST_COMPLETE = "MOST_COMPLETE"
    LONGEST = "LONGEST"
    FIRST_SEEN = "FIRST_SEEN"

class SurvivorshipPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    rule_order: Tuple[SurvivorshipRule, ...] = Field(default=(
        SurvivorshipRule.MAJORITY,
        SurvivorshipRule.MOST_COMPLETE,
        SurvivorshipRule.LONGEST,
        SurvivorshipRule.FIRST_SEEN,
    ), min_length=1)

    @field_validator("rule_order")
    @classmethod
    def first_seen_last(cls, rules: Tuple[SurvivorshipRule, ...]) -> Tuple[SurvivorshipRule, ...]:
        if rules[-1] != SurvivorshipRule.FIRST_SEEN:
            raise ValueError("FIRST_SEEN must close the rule order as the deterministic tie-breaker")
        if len(set(rules)) != len(rules):
            raise ValueError("survivorship rules must not repeat")
        return rules

class Candidate:
    """One distinct value of a field and the member refs holding it."""

    def __init__(self, value):
        self.value = value
        self.support: List[RecordRef] = []

    @property
    def first_seen(self) -> RecordRef:
        return min(self.support)

    def completeness(self) -> int:
        if isinstance(self.value, StructuredAddress):
            return self.value.completeness
        if isinstance(self.value, PersonName):
            return sum(1 for part in (self.value.first, self.value.middle, self.value.last) if part)
        return 1

    def length(self, slot: str) -> int:
        return len(render_slot(slot, self.value) or "")

def _candidates(values: Iterable[Tuple[object, RecordRef]]) -> List[Candidate]:
    by_value: Dict[object, Candidate] = {}
    for value, ref in values:
        if value is None:
            continue
        by_value.setdefault(value, Candidate(value)).support.append(ref)
    return list(by_value.values())

def survive(candidates: List[Candidate], policy: SurvivorshipPolicy, slot: str) -> Optional[Candidate]:
    """Narrow the candidates rule by rule until one remains."""
    remaining = list(candidates)
    for rule in policy.rule_order:
        if len(remaining) <= 1:
            break
        if rule == SurvivorshipRule.MAJORITY:
            metric = lambda c: len(c.support)
        elif rule == SurvivorshipRule.MOST_COMPLETE:
            metric = lambda c: c.completeness()
        elif rule == SurvivorshipRule.LONGEST:
            metric = lambda c: c.length(slot)
        else:
            best = min(c.first_seen for c in remaining)
            remaining = [c for c in remaining if c.first_seen == best]
            continue
        top = max(metric(c) for c in remaining)
        remaining = [c for c in remaining if metric(c) == top]
    return remaining[0] if remaining else None

# --- canonicalization ----------------------------------------------------

def _expand_initial(name: PersonName, members: List[CleansedRecord], policy: SurvivorshipPolicy) -> PersonName:
    """Replace an initial by a full first name of the cluster sharing its letter and last name."""
    if not name.first_is_initial:
        return name
    full = _candidates(
        (m.name.first, m.ref) for m in members
        if m.name is not None and m.name.first and not m.name.first_is_initial
        and m.name.last.lower() == name.last.lower()
        and m.name.first[0].lower() == name.first.lower()
    )
    chosen = survive(full, policy, "first_name")
    if chosen is None:
        return name
    return PersonName(first=chosen.value, last=name.last)

def canonical_name(name: PersonName, members: List[CleansedRecord], policy: SurvivorshipPolicy) -> PersonName:
    """First and last name only, initials expanded; titles and middle names never survive."""
    expanded = _expand_initial(name, members, policy)
    return PersonName(first=expanded.first, last=expanded.last, first_is_initial=expanded.first_is_initial)

def address_group(address: StructuredAddress) -> Tuple[Optional[str], Tuple[str, ...]]:
    return (address.zip_code, address.street_core)

def _address_representatives(members: List[CleansedRecord],
                             policy: SurvivorshipPolicy) -> Dict[tuple, StructuredAddress]:
    groups: Dict[tuple, List[Tuple[StructuredAddress, RecordRef]]] = defaultdict(list)
    for member in members:
        if member.address is not None:
            groups[address_group(member.address)].append((member.address, member.ref))
    return {key: survive(_candidates(values), policy, "address").value for key, values in groups.items()}

def canonical_values(members: List[CleansedRecord], slot: str,
                     policy: SurvivorshipPolicy) -> List[Tuple[object, RecordRef]]:
    """(canonical value, ref) per member of one field."""
    if slot == "name":
        return [(canonical_name(m.name, members, policy) if m.name else None, m.ref) for m in members]
    if slot == "address":
        representatives = _address_representatives(members, policy)
        return [(representatives[address_group(m.address)] if m.address else None, m.ref) for m in members]
    return [(getattr(m, slot), m.ref) for m in members]

# --- operations ----------------------------------------------------------

def _members_of(cluster: MatchCluster, records) -> List[CleansedRecord]:
    by_ref = records if isinstance(records, dict) else {r.ref: r for r in records}
    return sorted((by_ref[ref] for ref in cluster.members), key=lambda r: r.ref.sort_key)

def consolidate(cluster: MatchCluster, records, policy: Optional[SurvivorshipPolicy] = None) -> GoldenRecord:
    """
    Merge one cluster into a golden record.
    Args:
        cluster (MatchCluster): The cluster, members given by reference
        records: The cleansed records, a list or a ref -> record mapping
        policy (SurvivorshipPolicy, optional): Defaults to MAJORITY, MOST_COMPLETE, LONGEST, FIRST_SEEN
    Returns:
        GoldenRecord: per field the surviving canonical value and the member refs holding it
    """
    policy = policy or SurvivorshipPolicy()
    members = _members_of(cluster, records)
    slot_fields = {}
    for member in members:
        for slot, field in member.slot_fields.items():
            slot_fields.setdefault(slot, field)
    values = {}
    lineage = {}
    for slot in SLOTS:
        winner = survive(_candidates(canonical_values(members, slot, policy)), policy, slot)
        if winner is None:
            continue
        values[slot] = winner.value
        lineage[slot_fields.get(slot, slot)] = tuple(sorted(winner.support))
    golden = GoldenRecord(entity_ref=members[0].ref, lineage=lineage,
                          members=tuple(m.ref for m in members), **values)
    logger.info(f"Consolidated {len(members)} records into golden record {golden.entity_ref}")
    return golden

def backpropagate(cluster: MatchCluster, golden: GoldenRecord, records) -> List[CleansedRecord]:
    """
    Push golden values back to the members: initials expand to the golden first
    name, addresses of the golden address group take the golden address.
    Returns the members in ref order; untouched members are returned as is.
    """
    updated = []
    for member in _members_of(cluster, records):
        changes = {}
        status = dict(member.field_status)
        name_field = member.field_for("name")
        if member.name is not None and member.name.first_is_initial and golden.name is not None \
                and golden.name.first and not golden.name.first_is_initial \
                and golden.name.last.lower() == member.name.last.lower() \
                and golden.name.first[0].lower() == member.name.first.lower():
            changes["name"] = member.name.model_copy(update={"first": golden.name.first, "first_is_initial": False})
            status[name_field] = status[name_field].with_code(FieldState.CORRECTED, DefectCode.INCOMPLETE)
        address_field = member.field_for("address")
        if member.address is not None and golden.address is not None \
                and address_group(member.address) == address_group(golden.address) \
                and member.address != golden.address:
            changes["address"] = golden.address
            status[address_field] = status[address_field].with_code(FieldState.CORRECTED, DefectCode.TYPO)
        if changes:
            logger.info(f"Back-propagated {sorted(changes)} to {member.ref}")
            updated.append(member.model_copy(update={**changes, "field_status": status}))
        else:
            updated.append(member)
    return updated

def collapse_members(members: List[CleansedRecord], golden: GoldenRecord) -> List[CleansedRecord]:
    """Members carrying the golden Author ID, i.e. the duplicates of the surviving identity."""
    if golden.author_id is None:
        return list(members)
    return [m for m in members if m.author_id == golden.author_id]

def consolidate_all(clusters: List[MatchCluster], records: List[CleansedRecord],
                    policy: Optional[SurvivorshipPolicy] = None):
    """Golden records, back-propagated members and the collapsed consolidation rows, in cluster order."""
    by_ref = {r.ref: r for r in records}
    goldens, propagated, collapsed = [], [], []
    for match_cluster in clusters:
        golden = consolidate(match_cluster, by_ref, policy)
        members = backpropagate(match_cluster, golden, by_ref)
        goldens.append(golden)
        propagated.extend(members)
        collapsed.extend(collapse_members(members, golden))
    return goldens, propagated, collapsed

def lineage_report(goldens: List[GoldenRecord]) -> dict:
    return {"golden_records": [g.jsonify() for g in goldens]}

