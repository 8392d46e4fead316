"""
Shared state of a pipeline run, passed from stage to stage and optionally
dumped to a JSON file so single-stage commands chain across invocations.
"""

import os
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field, ValidationError

from sources.errors import IOFailureError
from sources.logger import Logger
from sources.schemas import (CleansedRecord, FieldProfile, GoldenRecord, MatchCluster, MatchPair,
                             QualityReport, RawRecord, StageIssue, Strategy, TrendSeries)

logger = Logger("artifacts.log")

class StageName(str, Enum):
    PROFILE = "PROFILE"
    ASSESS = "ASSESS"
    CLEANSE = "CLEANSE"
    ENRICH = "ENRICH"
    MATCH = "MATCH"
    CONSOLIDATE = "CONSOLIDATE"

# artifacts produced by each stage, in pipeline order
STAGE_OUTPUTS = {
    StageName.CLEANSE: ("cleansed",),
    StageName.ENRICH: ("enriched",),
    StageName.MATCH: ("pairs", "clusters"),
    StageName.CONSOLIDATE: ("golden", "propagated", "consolidated"),
}

class StageArtifacts(BaseModel):
    dataset_id: str
    raw: Optional[List[RawRecord]] = None
    issues: List[StageIssue] = Field(default_factory=list)
    profile: Optional[List[FieldProfile]] = None
    cleansed: Optional[List[CleansedRecord]] = None
    enriched: Optional[List[CleansedRecord]] = None
    pairs: Optional[List[MatchPair]] = None
    clusters: Optional[List[MatchCluster]] = None
    golden: Optional[List[GoldenRecord]] = None
    # every cluster member after back-propagation, in record order
    propagated: Optional[List[CleansedRecord]] = None
    # members sharing their golden record's Author ID
    consolidated: Optional[List[CleansedRecord]] = None
    quality_before: Optional[QualityReport] = None
    quality_after: Optional[QualityReport] = None
    trend: Optional[TrendSeries] = None
    strategy: Optional[Strategy] = None

    def match_input(self) -> Optional[List[CleansedRecord]]:
        """Enriched records when enrichment ran, cleansed records otherwise."""
        return self.enriched if self.enriched is not None else self.cleansed

    def with_stage_output(self, stage: StageName, issues: Optional[List[StageIssue]] = None,
                          **outputs) -> "StageArtifacts":
        """
        New artifacts holding a stage's outputs; outputs of later stages are dropped
        since they no longer derive from the current data.
        """
        update = dict(outputs)
        order = list(STAGE_OUTPUTS)
        if stage in STAGE_OUTPUTS:
            for later in order[order.index(stage) + 1:]:
                for name in STAGE_OUTPUTS[later]:
                    update.setdefault(name, None)
            update.setdefault("quality_after", None)
        if issues:
            update["issues"] = list(self.issues) + list(issues)
        return self.model_copy(update=update)

    def save(self, path: str) -> None:
        directory = os.path.dirname(path)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(path, 'w', encoding='utf-8') as f:
                f.write(self.model_dump_json(indent=1))
        except OSError as e:
            raise IOFailureError(f"cannot write stage dump {path}: {e}")
        logger.info(f"Saved stage artifacts to {path}")

    @classmethod
    def load(cls, path: str) -> "StageArtifacts":
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return cls.model_validate_json(f.read())
        except OSError as e:
            raise IOFailureError(f"cannot read stage dump {path}: {e}")
        except ValidationError as e:
            raise IOFailureError(f"stage dump {path} is not valid: {e.error_count()} errors")
