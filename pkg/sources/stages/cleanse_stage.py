from sources.artifacts import StageArtifacts, StageName
from sources.record_model import validate_against_schema
from sources.schemas import StageIssue
from sources.stages.stage import Stage
from sources.standardizer import collect_name_evidence

class CleanseStage(Stage):
    def __init__(self, config, resources):
        super().__init__(config, resources)
        self.tag = StageName.CLEANSE
        self.name = "Cleanse"
        self.description = "Correction and standardization of every raw record"
        self.requires = ("raw",)

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        schema = self.config.record_schema
        issues = []
        for record in artifacts.raw:
            for field, defect in validate_against_schema(record, schema):
                issues.append(StageIssue(code=defect.value, message=f"required field {field} is MISSING",
                                         source_id=record.source_id, row_number=record.row_number, field=field))
        evidence = collect_name_evidence(artifacts.raw, schema, self.resources.lexicons)
        standardizer = self.resources.standardizer(self.config, evidence)
        cleansed = [standardizer.cleanse(record) for record in artifacts.raw]
        self.logger.info(f"Cleansed {len(cleansed)} records, {len(issues)} required fields missing")
        return artifacts.with_stage_output(self.tag, issues=issues, cleansed=cleansed)
