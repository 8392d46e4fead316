from sources.artifacts import StageArtifacts, StageName
from sources.parser_profiler import profile_dataset
from sources.stages.stage import Stage

class ProfileStage(Stage):
    def __init__(self, config, resources):
        super().__init__(config, resources)
        self.tag = StageName.PROFILE
        self.name = "Profile"
        self.description = "Pattern histogram of every schema field of the raw data"
        self.requires = ("raw",)

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        profile = profile_dataset(artifacts.raw, self.config.record_schema, self.resources.lexicons)
        return artifacts.with_stage_output(self.tag, profile=profile)
