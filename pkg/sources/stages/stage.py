"""
define a generic pipeline stage, every step of the cleansing process is one.

A stage reads the artifacts of earlier stages and returns new artifacts with
its own outputs added:

    artifacts = CleanseStage(config, resources).run(artifacts)

Stages never modify the artifacts they receive.
"""

import os
from abc import abstractmethod
from dataclasses import dataclass
from time import perf_counter
from typing import Optional, Tuple

from sources.artifacts import StageArtifacts, StageName
from sources.config import PipelineConfig
from sources.enricher import Gazetteer, load_gazetteer
from sources.errors import MissingPrerequisiteError
from sources.lexicons import Lexicons, load_lexicons
from sources.logger import Logger
from sources.standardizer import NameEvidence, Standardizer
from sources.trend_store import TrendStore

@dataclass
class PipelineResources:
    """Read-only reference data shared by every stage of a run."""
    lexicons: Lexicons
    gazetteer: Gazetteer
    trend_store: Optional[TrendStore] = None

    def standardizer(self, config: PipelineConfig, evidence: Optional[NameEvidence] = None) -> Standardizer:
        return Standardizer(schema=config.record_schema, lexicons=self.lexicons, gazetteer=self.gazetteer,
                            settings=config.standardizer, evidence=evidence)

def load_resources(config: PipelineConfig, keep_trend: bool = True) -> PipelineResources:
    """
    Load lexicons and gazetteer named by the config.
    Args:
        config (PipelineConfig): The validated configuration
        keep_trend (bool): Persist quality trends under <out_dir>/reports
    Returns:
        PipelineResources: lexicons already carry the gazetteer's postal codes and cities
    """
    gazetteer = load_gazetteer(config.gazetteer_path)
    lexicons = load_lexicons(**config.lexicon_paths).with_gazetteer(gazetteer)
    store = TrendStore(os.path.join(config.out_dir, "reports")) if keep_trend else None
    return PipelineResources(lexicons=lexicons, gazetteer=gazetteer, trend_store=store)

class Stage():
    """
    Abstract class for all stages.
    """
    def __init__(self, config: PipelineConfig, resources: PipelineResources):
        self.tag: StageName = None
        self.name = "undefined"
        self.description = "undefined"
        # artifact fields that must be present before execute()
        self.requires: Tuple[str, ...] = ()
        self.config = config
        self.resources = resources
        self.logger = Logger("stages.log")

    def missing_prerequisites(self, artifacts: StageArtifacts) -> Tuple[str, ...]:
        return tuple(name for name in self.requires if getattr(artifacts, name) is None)

    def run(self, artifacts: StageArtifacts) -> StageArtifacts:
        """
        Check prerequisites, then execute.
        exceptions:
            MissingPrerequisiteError: an earlier stage has not produced its output
        """
        missing = self.missing_prerequisites(artifacts)
        if missing:
            raise MissingPrerequisiteError(f"{self.name} needs {', '.join(missing)}; run the earlier stages first")
        start_time = perf_counter()
        result = self.execute(artifacts)
        self.logger.info(f"{self.name} finished in {perf_counter() - start_time:.3f}s")
        return result

    @abstractmethod
    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        """
        Abstract method that must be implemented by child classes to perform the stage.
        Args:
            artifacts (StageArtifacts): Outputs of the earlier stages
        Returns:
            StageArtifacts: new artifacts with this stage's outputs
        """
        pass
