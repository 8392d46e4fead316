"""
Orchestration of the cleansing process.

    PROFILE -> ASSESS -> CLEANSE -> ENRICH -> MATCH -> CONSOLIDATE -> ASSESS -> strategy

Each step is one `run_stage` call on the shared StageArtifacts, so chaining
single stages gives exactly what `run_pipeline` gives.
"""

import os
import csv
import json
from typing import List, Optional, Union

from sources.artifacts import StageArtifacts, StageName
from sources.config import PipelineConfig
from sources.consolidator import lineage_report
from sources.errors import ConfigInvalidError, IOFailureError
from sources.logger import Logger
from sources.matcher import clusters_report
from sources.quality import recommend_strategy, trend_direction
from sources.record_model import load_dataset
from sources.render import ENRICHED_COLUMNS, TABLE_COLUMNS, cleansed_row, golden_row, render_enriched_row
from sources.schemas import StageIssue, StrategyInput
from sources.utility import timer_decorator
from sources.stages import (AssessStage, CleanseStage, ConsolidateStage, EnrichStage, MatchStage,
                            PipelineResources, ProfileStage, load_resources)

logger = Logger("pipeline.log")

STAGE_CLASSES = {
    StageName.PROFILE: ProfileStage,
    StageName.ASSESS: AssessStage,
    StageName.CLEANSE: CleanseStage,
    StageName.ENRICH: EnrichStage,
    StageName.MATCH: MatchStage,
    StageName.CONSOLIDATE: ConsolidateStage,
}

PIPELINE_ORDER = (
    StageName.PROFILE,
    StageName.ASSESS,
    StageName.CLEANSE,
    StageName.ENRICH,
    StageName.MATCH,
    StageName.CONSOLIDATE,
    StageName.ASSESS,
)

def ingest(input_path: Optional[str], config: PipelineConfig) -> StageArtifacts:
    """Load the input dataset into fresh artifacts; malformed rows become issues."""
    path = input_path or config.input_path
    if path is None:
        raise ConfigInvalidError("no input dataset given and none configured")
    issues: List[StageIssue] = []
    raw = load_dataset(path, config.record_schema, config.input_format, issues=issues)
    return StageArtifacts(dataset_id=config.dataset_id, raw=raw, issues=issues)

def run_stage(stage: Union[StageName, str], artifacts: StageArtifacts, config: PipelineConfig,
              resources: Optional[PipelineResources] = None, **options) -> StageArtifacts:
    """
    Execute one stage on the given artifacts.
    Args:
        stage (StageName): PROFILE, ASSESS, CLEANSE, ENRICH, MATCH or CONSOLIDATE
        artifacts (StageArtifacts): Outputs of earlier stages
        config (PipelineConfig): The configuration
        resources (PipelineResources, optional): Loaded from the config when omitted
        options: Stage specific, e.g. threshold for MATCH
    Returns:
        StageArtifacts: new artifacts, the given ones are untouched
    exceptions:
        MissingPrerequisiteError: an earlier stage output is missing
    """
    resources = resources or load_resources(config)
    if not isinstance(stage, StageName):
        stage = StageName(stage.upper())
    stage_class = STAGE_CLASSES[stage]
    return stage_class(config, resources, **options).run(artifacts)

def recommend(artifacts: StageArtifacts, config: PipelineConfig) -> StageArtifacts:
    strategy = recommend_strategy(StrategyInput(importance=config.importance, change_frequency=config.change_frequency),
                                  config.strategy_cuts)
    logger.info(f"Recommended strategy {strategy.value} for {artifacts.dataset_id}")
    return artifacts.model_copy(update={"strategy": strategy})

@timer_decorator
def run_pipeline(input_path: Optional[str], config: PipelineConfig,
                 resources: Optional[PipelineResources] = None, write: bool = True) -> StageArtifacts:
    """
    Run every stage in order and write the output files.
    Dirty data never aborts the run; violations and issues end up in the reports.
    """
    resources = resources or load_resources(config)
    artifacts = ingest(input_path, config)
    for stage in PIPELINE_ORDER:
        artifacts = run_stage(stage, artifacts, config, resources)
    artifacts = recommend(artifacts, config)
    if write:
        write_outputs(artifacts, config.out_dir)
    return artifacts

# --- output files --------------------------------------------------------

def _write_table(path: str, header: List[str], rows: List[List[str]]) -> None:
    try:
        with open(path, 'w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise IOFailureError(f"cannot write {path}: {e}")

def _write_json(path: str, data) -> None:
    try:
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f, ensure_ascii=False, indent=2, sort_keys=True)
            f.write("\n")
    except OSError as e:
        raise IOFailureError(f"cannot write {path}: {e}")

def write_outputs(artifacts: StageArtifacts, out_dir: str) -> List[str]:
    """
    Write every present artifact: data tables in the published column layout
    under out_dir, reports under out_dir/reports.
    Returns:
        List[str]: the written paths
    """
    reports_dir = os.path.join(out_dir, "reports")
    try:
        os.makedirs(reports_dir, exist_ok=True)
    except OSError as e:
        raise IOFailureError(f"cannot create {reports_dir}: {e}")
    written = []
    tables = [
        ("cleansed.csv", TABLE_COLUMNS, artifacts.cleansed, cleansed_row),
        ("enriched.csv", ENRICHED_COLUMNS, artifacts.enriched, render_enriched_row),
        ("consolidated.csv", TABLE_COLUMNS, artifacts.consolidated, cleansed_row),
        ("cleansed_final.csv", TABLE_COLUMNS, artifacts.propagated, cleansed_row),
        ("golden.csv", TABLE_COLUMNS, artifacts.golden, golden_row),
    ]
    for filename, header, records, render in tables:
        if records is None:
            continue
        path = os.path.join(out_dir, filename)
        _write_table(path, header, [render(record) for record in records])
        written.append(path)
    reports = [
        ("profile.json", artifacts.profile, lambda p: {"fields": [f.jsonify() for f in p]}),
        ("quality_before.json", artifacts.quality_before, lambda r: r.jsonify()),
        ("quality_after.json", artifacts.quality_after, lambda r: r.jsonify()),
        ("clusters.json", artifacts.clusters, clusters_report),
        ("lineage.json", artifacts.golden, lineage_report),
    ]
    for filename, data, to_json in reports:
        if data is None:
            continue
        path = os.path.join(reports_dir, filename)
        _write_json(path, to_json(data))
        written.append(path)
    if artifacts.strategy is not None:
        path = os.path.join(reports_dir, "strategy.json")
        _write_json(path, {
            "strategy": artifacts.strategy.value,
            "trend": trend_direction(artifacts.trend).value if artifacts.trend is not None else None,
            "issues": [str(issue) for issue in artifacts.issues],
        })
        written.append(path)
    logger.info(f"Wrote {len(written)} output files to {out_dir}")
    return written
