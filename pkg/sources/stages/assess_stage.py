import datetime
from typing import List, Optional

from sources.artifacts import StageArtifacts, StageName
from sources.config import PipelineConfig
from sources.errors import EmptyDatasetError
from sources.quality import (DimensionSpec, QualityContext, assess, default_dimension_specs,
                             parse_rule_entries, record_trend)
from sources.schemas import StageIssue, TrendSeries
from sources.stages.stage import Stage

ONE_TICK = datetime.timedelta(microseconds=1)

def build_quality_specs(config: PipelineConfig, context: QualityContext) -> List[DimensionSpec]:
    """Default specs for the configured weights, rules replaced where the config lists them."""
    specs = default_dimension_specs(config.record_schema, context, config.quality_weights)
    configured = []
    for spec in specs:
        entries = config.quality_rules.get(spec.dimension)
        if entries is not None:
            spec = spec.model_copy(update={"rules": parse_rule_entries(entries, config.record_schema, context)})
        configured.append(spec)
    return configured

class AssessStage(Stage):
    """
    Scores the raw data while nothing is consolidated yet, the back-propagated
    members afterwards; every report is appended to the dataset trend.
    """
    def __init__(self, config, resources, now: Optional[datetime.datetime] = None):
        super().__init__(config, resources)
        self.tag = StageName.ASSESS
        self.name = "Assess"
        self.description = "Weighted quality dimensions and acceptability verdict"
        self.requires = ("raw",)
        self.now = now

    def _run_timestamp(self, artifacts: StageArtifacts, series: TrendSeries) -> datetime.datetime:
        stamp = self.now or datetime.datetime.now(datetime.timezone.utc)
        if series.points and stamp <= series.points[-1].run_timestamp:
            stamp = series.points[-1].run_timestamp + ONE_TICK
        if artifacts.quality_before is not None and stamp <= artifacts.quality_before.run_timestamp:
            stamp = artifacts.quality_before.run_timestamp + ONE_TICK
        return stamp

    def _series(self, artifacts: StageArtifacts) -> TrendSeries:
        if artifacts.trend is not None:
            return artifacts.trend
        if self.resources.trend_store is not None:
            return self.resources.trend_store.load(artifacts.dataset_id)
        return TrendSeries(dataset_id=artifacts.dataset_id)

    def execute(self, artifacts: StageArtifacts) -> StageArtifacts:
        after = artifacts.propagated is not None
        records = artifacts.propagated if after else artifacts.raw
        series = self._series(artifacts)
        stamp = self._run_timestamp(artifacts, series)
        context = QualityContext(standardizer=self.resources.standardizer(self.config),
                                 timeliness_horizon_days=self.config.timeliness_horizon_days, now=stamp)
        try:
            report = assess(records, build_quality_specs(self.config, context), self.config.quality_threshold,
                            context, dataset_id=artifacts.dataset_id, run_timestamp=stamp)
        except EmptyDatasetError as e:
            self.logger.warning(str(e))
            issue = StageIssue(code=e.code, message=e.message)
            return artifacts.with_stage_output(self.tag, issues=[issue])
        if self.resources.trend_store is not None:
            series = self.resources.trend_store.append(report, series)
        else:
            series = record_trend(series, report)
        key = "quality_after" if after else "quality_before"
        return artifacts.with_stage_output(self.tag, **{key: report, "trend": series})
