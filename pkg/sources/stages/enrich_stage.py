from sources.artifacts import StageArtifacts, StageName
from sources.enricher import enrich_dataset
from sources.stages.stage import Stage

class EnrichStage(Stage):
    def __init__(self, config, resources):
        super().__init__(config, resources)
        self.tag = StageName.ENRICH
        self.name = "Enrich"
        self.description = "Geographic enhancement from the gazetteer"
        self.requires = ("cleansed",)

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        issues = []
        enriched = enrich_dataset(artifacts.cleansed, self.resources.gazetteer, issues)
        return artifacts.with_stage_output(self.tag, issues=issues, enriched=enriched)
