#!/usr/bin python3

import os
import sys
import argparse

from sources.artifacts import StageArtifacts, StageName
from sources.config import load_config
from sources.errors import CleansingError, ConfigInvalidError, IOFailureError, MissingPrerequisiteError
from sources.pipeline import ingest, run_pipeline, run_stage, write_outputs
from sources.quality import recommend_strategy
from sources.schemas import StrategyInput
from sources.stages import load_resources
from sources.utility import format_score, pretty_print

EXIT_CODES = {
    ConfigInvalidError: 1,
    IOFailureError: 2,
    MissingPrerequisiteError: 3,
}

STAGE_COMMANDS = {
    "profile": StageName.PROFILE,
    "assess": StageName.ASSESS,
    "cleanse": StageName.CLEANSE,
    "enrich": StageName.ENRICH,
    "match": StageName.MATCH,
    "consolidate": StageName.CONSOLIDATE,
}

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ris-cleanse",
                                     description="Rule-driven cleansing of research information data")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default="config.ini", help="pipeline config file")
    common.add_argument("--input", default=None, help="input dataset, defaults to [MAIN] input")
    common.add_argument("--out-dir", default=None, help="output directory, defaults to [MAIN] out_dir")
    common.add_argument("--stage-dump", default=None,
                        help="artifacts file read before and written after a single stage")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in STAGE_COMMANDS:
        sub = subparsers.add_parser(command, parents=[common], help=f"run the {command} stage only")
        if command == "match":
            sub.add_argument("--threshold", type=float, default=None,
                             help="match threshold override, above 1 keeps every record apart")
    subparsers.add_parser("run", parents=[common], help="run the whole pipeline")
    rec = subparsers.add_parser("recommend", parents=[common], help="recommend a cleansing strategy")
    rec.add_argument("--importance", type=float, default=None)
    rec.add_argument("--frequency", type=float, default=None)
    return parser

def _print_summary(artifacts: StageArtifacts) -> None:
    if artifacts.quality_before is not None:
        pretty_print(f"Quality before: {format_score(artifacts.quality_before.aggregate)}", color="output")
    if artifacts.quality_after is not None:
        verdict = "acceptable" if artifacts.quality_after.acceptable else "not acceptable"
        pretty_print(f"Quality after:  {format_score(artifacts.quality_after.aggregate)} ({verdict})", color="output")
    if artifacts.golden is not None:
        pretty_print(f"Golden records: {len(artifacts.golden)}", color="output")
    if artifacts.strategy is not None:
        pretty_print(f"Recommended strategy: {artifacts.strategy.value}", color="success")
    for issue in artifacts.issues:
        pretty_print(str(issue), color="warning")

def run_single_stage(args, config) -> StageArtifacts:
    artifacts = None
    if args.stage_dump and os.path.exists(args.stage_dump):
        artifacts = StageArtifacts.load(args.stage_dump)
    if artifacts is None or (args.input and artifacts.raw is None):
        artifacts = ingest(args.input, config)
    options = {}
    if args.command == "match" and args.threshold is not None:
        options["threshold"] = args.threshold
    artifacts = run_stage(STAGE_COMMANDS[args.command], artifacts, config, load_resources(config), **options)
    write_outputs(artifacts, config.out_dir)
    if args.stage_dump:
        artifacts.save(args.stage_dump)
    return artifacts

def run_recommend(args, config) -> None:
    strategy_input = StrategyInput(
        importance=config.importance if args.importance is None else args.importance,
        change_frequency=config.change_frequency if args.frequency is None else args.frequency,
    )
    strategy = recommend_strategy(strategy_input, config.strategy_cuts)
    pretty_print(f"Recommended strategy: {strategy.value}", color="success")

def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.out_dir:
            config = config.model_copy(update={"out_dir": os.path.abspath(args.out_dir)})
        if args.command == "run":
            pretty_print("Running the cleansing pipeline...", color="status")
            artifacts = run_pipeline(args.input, config)
        elif args.command == "recommend":
            run_recommend(args, config)
            return 0
        else:
            artifacts = run_single_stage(args, config)
        _print_summary(artifacts)
        pretty_print(f"Outputs written to {config.out_dir}", color="success")
        return 0
    except CleansingError as e:
        pretty_print(str(e), color="failure")
        for error_class, code in EXIT_CODES.items():
            if isinstance(e, error_class):
                return code
        return 1
    except ValueError as e:
        pretty_print(f"CONFIG_INVALID: {e}", color="failure")
        return 1

if __name__ == "__main__":
    sys.exit(main())
