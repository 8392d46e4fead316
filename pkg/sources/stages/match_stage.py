from typing import Optional

from sources.artifacts import StageArtifacts, StageName
from sources.matcher import match_records
from sources.stages.stage import Stage

class MatchStage(Stage):
    def __init__(self, config, resources, threshold: Optional[float] = None):
        super().__init__(config, resources)
        self.tag = StageName.MATCH
        self.name = "Match"
        self.description = "Blocking, pair scoring and threshold clustering"
        self.requires = ("cleansed",)
        self.threshold = threshold

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        pairs, clusters = match_records(artifacts.match_input(), self.config.matching, self.threshold)
        return artifacts.with_stage_output(self.tag, pairs=pairs, clusters=clusters)
