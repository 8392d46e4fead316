from sources.artifacts import StageArtifacts, StageName
from sources.consolidator import consolidate_all
from sources.stages.stage import Stage

class ConsolidateStage(Stage):
    def __init__(self, config, resources):
        super().__init__(config, resources)
        self.tag = StageName.CONSOLIDATE
        self.name = "Consolidate"
        self.description = "Golden records by survivorship, canonical values pushed back to members"
        self.requires = ("cleansed", "clusters")

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        golden, propagated, consolidated = consolidate_all(artifacts.clusters, artifacts.match_input(),
                                                           self.config.survivorship)
        propagated = sorted(propagated, key=lambda record: record.ref.sort_key)
        return artifacts.with_stage_output(self.tag, golden=golden, propagated=propagated,
                                           consolidated=consolidated)
