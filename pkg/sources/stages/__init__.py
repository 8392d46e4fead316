from .stage import Stage, PipelineResources, load_resources
from .profile_stage import ProfileStage
from .assess_stage import AssessStage
from .cleanse_stage import CleanseStage
from .enrich_stage import EnrichStage
from .match_stage import MatchStage
from .consolidate_stage import ConsolidateStage

__all__ = ["Stage", "PipelineResources", "load_resources", "ProfileStage", "AssessStage",
           "CleanseStage", "EnrichStage", "MatchStage", "ConsolidateStage"]
