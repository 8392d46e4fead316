"""
Matching stage: blocking, field comparators and threshold clustering.
"""

from collections import defaultdict
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import Levenshtein
from pydantic import BaseModel, ConfigDict, Field, field_validator

from sources.logger import Logger
from sources.schemas import CleansedRecord, MatchCluster, MatchPair, PersonName, RecordRef

logger = Logger("matcher.log")

COMPARATORS = ("id_exact", "name_sim", "date_sim", "address_sim")

class BlockingKey(str, Enum):
    LAST_NAME = "LAST_NAME"
    NONE = "NONE"

class MatchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    weights: Dict[str, float] = Field(default_factory=lambda: {
        "id_exact": 0.4, "name_sim": 0.3, "date_sim": 0.15, "address_sim": 0.15,
    })
    match_threshold: float = Field(default=0.75, ge=0.0, le=1.0)
    blocking_key: BlockingKey = BlockingKey.LAST_NAME

    @field_validator("weights")
    @classmethod
    def check_weights(cls, weights: Dict[str, float]) -> Dict[str, float]:
        unknown = set(weights) - set(COMPARATORS)
        if unknown:
            raise ValueError(f"unknown comparators: {sorted(unknown)}")
        if any(w < 0 for w in weights.values()):
            raise ValueError("comparator weights must be >= 0")
        if sum(weights.values()) <= 0:
            raise ValueError("comparator weights must sum to more than 0")
        return weights

def edit_similarity(s1: str, s2: str) -> float:
    """Normalized Levenshtein similarity (0.0-1.0)."""
    if not s1 or not s2:
        return 0.0
    distance = Levenshtein.distance(s1, s2)
    return 1.0 - distance / max(len(s1), len(s2))

def jaccard(a, b) -> float:
    a, b = set(a), set(b)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)

def id_exact(a: CleansedRecord, b: CleansedRecord) -> Optional[float]:
    if a.identifier is None or b.identifier is None:
        return None
    return 1.0 if a.identifier == b.identifier else 0.0

def _first_name_factor(a: PersonName, b: PersonName) -> float:
    if a.first is None or b.first is None:
        return 1.0
    first_a, first_b = a.first.lower(), b.first.lower()
    if first_a == first_b:
        return 1.0
    if a.first_is_initial or b.first_is_initial:
        # an initial is compatible with any name sharing its letter
        if first_a[0] == first_b[0]:
            return 1.0
    return edit_similarity(first_a, first_b)

def name_sim(a: CleansedRecord, b: CleansedRecord) -> Optional[float]:
    if a.name is None or b.name is None:
        return None
    last = edit_similarity(a.name.last.lower(), b.name.last.lower())
    return last * _first_name_factor(a.name, b.name)

def date_sim(a: CleansedRecord, b: CleansedRecord) -> Optional[float]:
    if a.birth_date is None or b.birth_date is None:
        return None
    da, db = a.birth_date, b.birth_date
    if da == db:
        return 1.0
    if da.year == db.year and da.day == db.month and da.month == db.day:
        return 0.5
    differing = sum(1 for x, y in ((da.year, db.year), (da.month, db.month), (da.day, db.day)) if x != y)
    return 0.5 if differing == 1 else 0.0

def address_sim(a: CleansedRecord, b: CleansedRecord) -> Optional[float]:
    if a.address is None or b.address is None:
        return None
    x, y = a.address, b.address
    parts = []
    if x.street_key and y.street_key:
        parts.append(jaccard(x.street_key, y.street_key))
    if x.zip_code and y.zip_code:
        parts.append(1.0 if x.zip_code == y.zip_code else 0.0)
    if not parts and x.city and y.city:
        parts.append(1.0 if x.city.lower() == y.city.lower() else 0.0)
    if not parts:
        return None
    return sum(parts) / len(parts)

COMPARATOR_FUNCTIONS = {
    "id_exact": id_exact,
    "name_sim": name_sim,
    "date_sim": date_sim,
    "address_sim": address_sim,
}

def compare(a: CleansedRecord, b: CleansedRecord, config: Optional[MatchConfig] = None) -> MatchPair:
    """
    Weighted average of the non-abstaining comparators.
    Args:
        a (CleansedRecord): First record
        b (CleansedRecord): Second record
        config (MatchConfig, optional): Weights, defaults to the built-in ones
    Returns:
        MatchPair: left is the smaller ref, so compare(a, b) == compare(b, a)
    """
    config = config or MatchConfig()
    if b.ref < a.ref:
        a, b = b, a
    evidence = {}
    total = 0.0
    weight_sum = 0.0
    for name, weight in config.weights.items():
        if weight == 0:
            continue
        sub = COMPARATOR_FUNCTIONS[name](a, b)
        if sub is None:
            continue
        evidence[name] = sub
        total += weight * sub
        weight_sum += weight
    score = total / weight_sum if weight_sum > 0 else 0.0
    return MatchPair(left=a.ref, right=b.ref, score=min(1.0, max(0.0, score)), evidence=evidence)

def _ordered(records: List[CleansedRecord]) -> List[CleansedRecord]:
    return sorted(records, key=lambda r: r.ref.sort_key)

def block(records: List[CleansedRecord], config: Optional[MatchConfig] = None) -> List[Tuple[CleansedRecord, CleansedRecord]]:
    """
    Candidate pairs. LAST_NAME only pairs records sharing a normalized last
    name; records without a name join no block. NONE pairs everything.
    """
    config = config or MatchConfig()
    ordered = _ordered(records)
    if config.blocking_key == BlockingKey.NONE:
        return list(combinations(ordered, 2))
    blocks = defaultdict(list)
    for record in ordered:
        if record.name is not None:
            blocks[record.name.last.lower().rstrip('.')].append(record)
    pairs = []
    for key in sorted(blocks):
        pairs.extend(combinations(blocks[key], 2))
    return pairs

def score_pairs(records: List[CleansedRecord], config: Optional[MatchConfig] = None) -> List[MatchPair]:
    config = config or MatchConfig()
    candidates = block(records, config)
    pairs = [compare(a, b, config) for a, b in candidates]
    logger.info(f"Scored {len(pairs)} candidate pairs over {len(records)} records "
                f"({config.blocking_key.value} blocking)")
    return pairs

class UnionFind:
    """
    Disjoint sets over record refs; the root is always the smallest ref so
    the result does not depend on union order.
    """

    def __init__(self):
        self.parent = {}

    def find(self, x):
        if x not in self.parent:
            self.parent[x] = x
            return x
        if self.parent[x] != x:
            self.parent[x] = self.find(self.parent[x])
        return self.parent[x]

    def union(self, x, y):
        px = self.find(x)
        py = self.find(y)
        self.parent[px] = self.parent[py] = min(px, py)

def cluster(pairs: List[MatchPair], records: List[CleansedRecord],
            config: Optional[MatchConfig] = None, threshold: Optional[float] = None) -> List[MatchCluster]:
    """
    Transitive closure over pairs scoring at least the threshold.
    Args:
        pairs: Scored candidate pairs
        records: Every record of the dataset, each ends up in exactly one cluster
        config (MatchConfig, optional): Supplies the default threshold
        threshold (float, optional): Override, may exceed 1 to keep every record apart
    Returns:
        List[MatchCluster]: members sorted by (source_id, row_number), clusters by first member
    """
    config = config or MatchConfig()
    threshold = config.match_threshold if threshold is None else threshold
    uf = UnionFind()
    for record in records:
        uf.find(record.ref)
    accepted = [pair for pair in pairs if pair.score >= threshold]
    for pair in accepted:
        uf.union(pair.left, pair.right)
    groups: Dict[RecordRef, List[RecordRef]] = defaultdict(list)
    for record in records:
        groups[uf.find(record.ref)].append(record.ref)
    supporting: Dict[RecordRef, List[MatchPair]] = defaultdict(list)
    for pair in accepted:
        supporting[uf.find(pair.left)].append(pair)
    clusters = []
    for root in sorted(groups):
        members = sorted(set(groups[root]))
        links = sorted(supporting[root], key=lambda p: (p.left.sort_key, p.right.sort_key))
        clusters.append(MatchCluster(members=members, pairs=links))
    logger.info(f"Clustered {len(records)} records into {len(clusters)} clusters at threshold {threshold}")
    return clusters

def match_records(records: List[CleansedRecord], config: Optional[MatchConfig] = None,
                  threshold: Optional[float] = None) -> Tuple[List[MatchPair], List[MatchCluster]]:
    config = config or MatchConfig()
    pairs = score_pairs(records, config)
    return pairs, cluster(pairs, records, config, threshold)

def clusters_report(clusters: List[MatchCluster]) -> dict:
    return {"clusters": [c.jsonify() for c in clusters]}
