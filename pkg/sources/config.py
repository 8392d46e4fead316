"""
Pipeline configuration: one config.ini file read with configparser and
validated into a PipelineConfig model.
"""

import os
import configparser
from typing import Dict, List, Optional, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from sources.consolidator import SurvivorshipPolicy
from sources.errors import ConfigInvalidError
from sources.logger import Logger
from sources.matcher import COMPARATORS, MatchConfig
from sources.quality import WEIGHT_TOLERANCE
from sources.record_model import DatasetFormat
from sources.schemas import Dimension, FieldKind, FieldSchema, validate_schema
from sources.standardizer import StandardizerSettings

load_dotenv()
logger = Logger("config.log")

LEXICON_KEYS = ("titles", "street_types", "state_codes", "given_names", "countries")

class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    config_dir: str
    dataset_id: str = Field(min_length=1)
    input_path: Optional[str] = None
    input_format: DatasetFormat = DatasetFormat.DELIMITED
    out_dir: str
    record_schema: List[FieldSchema]
    lexicon_paths: Dict[str, str]
    gazetteer_path: str
    standardizer: StandardizerSettings = StandardizerSettings()
    matching: MatchConfig = MatchConfig()
    survivorship: SurvivorshipPolicy = SurvivorshipPolicy()
    quality_threshold: float = Field(default=0.8, ge=0.0, le=1.0)
    timeliness_horizon_days: int = Field(default=365, ge=0)
    quality_weights: Dict[Dimension, float]
    quality_rules: Dict[Dimension, List[str]] = Field(default_factory=dict)
    strategy_cuts: Tuple[float, float] = (0.5, 0.5)
    importance: float = Field(default=0.5, ge=0.0, le=1.0)
    change_frequency: float = Field(default=0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def files_exist(self) -> "PipelineConfig":
        validate_schema(self.record_schema)
        for name, path in list(self.lexicon_paths.items()) + [("gazetteer", self.gazetteer_path)]:
            if not os.path.isfile(path):
                raise ValueError(f"{name} file not found: {path}")
        for cut in self.strategy_cuts:
            if not 0.0 < cut < 1.0:
                raise ValueError(f"strategy cuts must lie in (0, 1), got {self.strategy_cuts}")
        total = sum(self.quality_weights.values())
        if any(w < 0 for w in self.quality_weights.values()) or abs(total - 1.0) > WEIGHT_TOLERANCE:
            raise ValueError(f"quality weights must be >= 0 and sum to 1, got {total}")
        return self

def _resolve(config_dir: str, path: str) -> str:
    path = os.path.expanduser(path.strip())
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(config_dir, path))

def _split(value: str) -> List[str]:
    return [part.strip() for part in value.split(",") if part.strip()]

def parse_schema_section(section: configparser.SectionProxy) -> List[FieldSchema]:
    fields = []
    for name, spec in section.items():
        parts = [part.upper() for part in _split(spec)]
        if not parts:
            raise ConfigInvalidError(f"schema field '{name}' has no kind")
        try:
            kind = FieldKind(parts[0])
        except ValueError:
            raise ConfigInvalidError(f"schema field '{name}' has unknown kind '{parts[0]}'")
        required = len(parts) > 1 and parts[1] == "REQUIRED"
        fields.append(FieldSchema(name=name.strip(), kind=kind, required=required))
    return fields

def _match_config(parser: configparser.ConfigParser) -> MatchConfig:
    if not parser.has_section("MATCHING"):
        return MatchConfig()
    section = parser["MATCHING"]
    weights = {name: section.getfloat(f"weight_{name}") for name in COMPARATORS
               if section.get(f"weight_{name}") is not None}
    return MatchConfig(
        weights=weights or MatchConfig().weights,
        match_threshold=section.getfloat("match_threshold", 0.75),
        blocking_key=section.get("blocking_key", "LAST_NAME").strip().upper(),
    )

def _quality(parser: configparser.ConfigParser) -> Tuple[Dict[Dimension, float], Dict[Dimension, List[str]]]:
    weights = {}
    rules = {}
    section = parser["QUALITY"] if parser.has_section("QUALITY") else {}
    for dimension in Dimension:
        weight = section.get(f"weight_{dimension.value.lower()}") if section else None
        if weight is not None:
            weights[dimension] = float(weight)
        rule_section = f"QUALITY.{dimension.value}"
        if parser.has_section(rule_section):
            rules[dimension] = _split(parser[rule_section].get("rules", ""))
    if not weights:
        weights = {dimension: 0.25 for dimension in Dimension}
    return weights, rules

def load_config(path: str) -> PipelineConfig:
    """
    Read and validate a pipeline config file.
    Relative paths resolve against the directory of the file; RIS_OUT_DIR
    overrides the output directory.
    Args:
        path (str): The config.ini path
    Returns:
        PipelineConfig: the validated configuration
    exceptions:
        ConfigInvalidError: unreadable, incomplete or inconsistent configuration
    """
    if not os.path.isfile(path):
        raise ConfigInvalidError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    parser.optionxform = str
    try:
        parser.read(path, encoding="utf-8")
        config_dir = os.path.dirname(os.path.abspath(path))
        main = parser["MAIN"]
        lexicons = parser["LEXICONS"]
        standardizer = parser["STANDARDIZER"] if parser.has_section("STANDARDIZER") else {}
        strategy = parser["STRATEGY"] if parser.has_section("STRATEGY") else {}
        weights, rules = _quality(parser)
        quality = parser["QUALITY"] if parser.has_section("QUALITY") else {}
        input_path = main.get("input")
        config = PipelineConfig(
            config_dir=config_dir,
            dataset_id=main.get("dataset_id", "dataset"),
            input_path=_resolve(config_dir, input_path) if input_path else None,
            input_format=main.get("input_format", "DELIMITED").strip().upper(),
            out_dir=_resolve(config_dir, os.getenv("RIS_OUT_DIR") or main.get("out_dir", "out")),
            record_schema=parse_schema_section(parser["SCHEMA"]),
            lexicon_paths={key: _resolve(config_dir, lexicons[key]) for key in LEXICON_KEYS},
            gazetteer_path=_resolve(config_dir, parser["GAZETTEER"]["path"]),
            standardizer=StandardizerSettings(
                two_digit_year_pivot=int(standardizer.get("two_digit_year_pivot", 30)),
                enable_yymmdd_heuristics=str(standardizer.get("enable_yymmdd_heuristics", "False")).strip().lower()
                in ("1", "true", "yes", "on"),
                id_placeholders=tuple(_split(standardizer.get("id_placeholders", "0000-0000-0000-0000"))),
            ),
            matching=_match_config(parser),
            survivorship=SurvivorshipPolicy(rule_order=tuple(
                rule.upper() for rule in _split(parser.get("SURVIVORSHIP", "rule_order",
                                                           fallback="MAJORITY, MOST_COMPLETE, LONGEST, FIRST_SEEN")))),
            quality_threshold=float(quality.get("threshold", 0.8)) if quality else 0.8,
            timeliness_horizon_days=int(quality.get("timeliness_horizon_days", 365)) if quality else 365,
            quality_weights=weights,
            quality_rules=rules,
            strategy_cuts=(float(strategy.get("importance_cut", 0.5)), float(strategy.get("frequency_cut", 0.5))),
            importance=float(strategy.get("importance", 0.5)),
            change_frequency=float(strategy.get("change_frequency", 0.5)),
        )
    except ConfigInvalidError:
        raise
    except (configparser.Error, KeyError, ValueError, ValidationError) as e:
        raise ConfigInvalidError(f"invalid config {path}: {e}")
    logger.info(f"Loaded config {path} for dataset {config.dataset_id}")
    return config
